#include "twinbeam/dispatch.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace twinbeam;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

RunConfig scratch(const std::string& tag) {
  RunConfig cfg;
  cfg.grid1d_n_side = 96;
  cfg.out_dir = (fs::temp_directory_path() / ("twinbeam_dispatch_" + tag)).string();
  fs::remove_all(cfg.out_dir);
  return cfg;
}

}  // namespace

TEST_CASE("angle-sweep writes CSV, JSON sidecar, config echo and log") {
  const RunConfig cfg = scratch("sweep");
  run_subcommand("angle-sweep", cfg);
  const fs::path dir(cfg.out_dir);
  const std::string csv = slurp(dir / "angle-sweep.csv");
  CHECK(csv.rfind("theta_mrad,gain,noise_db\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "angle-sweep.json"));
  CHECK(j["subcommand"] == "angle-sweep");
  CHECK(j["metadata"].contains("slit_equivalent_factor"));
  CHECK(fs::exists(dir / "angle-sweep.log"));
  // The echoed config parses back to the same resolved config.
  const RunConfig back = parse_config_text(slurp(dir / "config.resolved.json"));
  CHECK(to_json(back) == to_json(cfg));
}

TEST_CASE("repeated runs give identical data files") {
  const RunConfig cfg = scratch("repeat");
  run_subcommand("mandel-probe", cfg);
  const std::string csv1 = slurp(fs::path(cfg.out_dir) / "mandel-probe.csv");
  const std::string json1 = slurp(fs::path(cfg.out_dir) / "mandel-probe.json");
  run_subcommand("mandel-probe", cfg);
  CHECK(csv1 == slurp(fs::path(cfg.out_dir) / "mandel-probe.csv"));
  CHECK(json1 == slurp(fs::path(cfg.out_dir) / "mandel-probe.json"));
}

TEST_CASE("oracle-verify passes its gate") {
  const RunConfig cfg = scratch("oracle");
  CHECK_NOTHROW(run_subcommand("oracle-verify", cfg));
  const auto j = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "oracle-verify.json"));
  CHECK(j["passed"] == true);
}

TEST_CASE("unknown subcommand and exit codes") {
  const RunConfig cfg = scratch("unknown");
  CHECK_THROWS_AS(run_subcommand("plot", cfg), Error);
  CHECK(exit_code(ErrorKind::config) == 2);
  CHECK(exit_code(ErrorKind::invalid_argument) == 2);
  CHECK(exit_code(ErrorKind::numerical_failure) == 3);
  CHECK(exit_code(ErrorKind::ambiguous_projection) == 3);
  CHECK(exit_code(ErrorKind::io) == 1);
  CHECK(subcommands().size() == 7);
}
