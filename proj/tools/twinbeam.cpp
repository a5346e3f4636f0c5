// twinbeam <subcommand> [--config <path>] [--out <dir>] [--<key> <value> ...]

#include "twinbeam/twinbeam.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace {

int report(tb_status st) {
  std::fprintf(stderr, "twinbeam: %s: %s\n", tb_status_name(st), tb_last_error());
  return tb_exit_code(st);
}

// Leftover "--key value" and "--key=value" arguments become config overrides.
bool overrides(const std::vector<std::string>& rest,
               std::vector<std::pair<std::string, std::string>>& out) {
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& a = rest[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) {
      std::fprintf(stderr, "twinbeam: unexpected argument '%s'\n", a.c_str());
      return false;
    }
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
    } else if (i + 1 < rest.size()) {
      out.emplace_back(a.substr(2), rest[++i]);
    } else {
      std::fprintf(stderr, "twinbeam: missing value for '%s'\n", a.c_str());
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimode twin-beam simulator"};
  app.require_subcommand(1);
  app.footer("Config keys: twinbeam --list-keys");

  std::string config_path, out_dir;
  for (std::size_t i = 0; i < tb_subcommand_count(); ++i) {
    CLI::App* sub = app.add_subcommand(tb_subcommand_name(i));
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "Output directory");
    sub->allow_extras();
  }

  try {
    if (argc > 1 && std::string(argv[1]) == "--list-keys") {
      for (std::size_t i = 0; i < tb_config_key_count(); ++i) {
        std::printf("%s\n", tb_config_key_name(i));
      }
      return 0;
    }
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::vector<std::pair<std::string, std::string>> kv;
  if (!overrides(sub->remaining(), kv)) return 2;

  tb_config* cfg = nullptr;
  tb_status st = config_path.empty() ? tb_config_default(&cfg)
                                     : tb_config_from_file(config_path.c_str(), &cfg);
  if (st != TB_OK) return report(st);
  if (!out_dir.empty()) kv.emplace_back("out_dir", out_dir);
  for (const auto& [k, v] : kv) {
    st = tb_config_set(cfg, k.c_str(), v.c_str());
    if (st != TB_OK) {
      tb_config_free(cfg);
      return report(st);
    }
  }
  st = tb_run(cfg, sub->get_name().c_str());
  tb_config_free(cfg);
  if (st != TB_OK) return report(st);
  return 0;
}
