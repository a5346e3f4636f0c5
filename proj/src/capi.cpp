#include "twinbeam/twinbeam.h"

#include "twinbeam/config.hpp"
#include "twinbeam/dispatch.hpp"
#include "twinbeam/experiments.hpp"

#include <cstring>
#include <new>
#include <string>

struct tb_config {
  twinbeam::RunConfig cfg;
};

struct tb_amplifier {
  twinbeam::Amplifier amp;
};

namespace {

thread_local std::string last_error;

tb_status status_of(twinbeam::ErrorKind kind) {
  using twinbeam::ErrorKind;
  switch (kind) {
    case ErrorKind::invalid_argument: return TB_ERR_INVALID_ARGUMENT;
    case ErrorKind::numerical_failure: return TB_ERR_NUMERICAL;
    case ErrorKind::truncation: return TB_ERR_TRUNCATION;
    case ErrorKind::undefined_q: return TB_ERR_UNDEFINED_Q;
    case ErrorKind::undefined_fringe_count: return TB_ERR_UNDEFINED_FRINGES;
    case ErrorKind::inconsistent_widths: return TB_ERR_INCONSISTENT_WIDTHS;
    case ErrorKind::ambiguous_projection: return TB_ERR_AMBIGUOUS;
    case ErrorKind::config: return TB_ERR_CONFIG;
    case ErrorKind::io: return TB_ERR_IO;
  }
  return TB_ERR_INTERNAL;
}

// Runs f, translating exceptions into a status and the thread's last error.
template <class F>
tb_status guarded(F&& f) {
  try {
    f();
    return TB_OK;
  } catch (const twinbeam::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return TB_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) twinbeam::fail(twinbeam::ErrorKind::invalid_argument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* tb_last_error(void) { return last_error.c_str(); }

const char* tb_status_name(tb_status status) {
  switch (status) {
    case TB_OK: return "ok";
    case TB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case TB_ERR_NUMERICAL: return "numerical_failure";
    case TB_ERR_TRUNCATION: return "truncation";
    case TB_ERR_UNDEFINED_Q: return "undefined_q";
    case TB_ERR_UNDEFINED_FRINGES: return "undefined_fringe_count";
    case TB_ERR_INCONSISTENT_WIDTHS: return "inconsistent_widths";
    case TB_ERR_AMBIGUOUS: return "ambiguous_projection";
    case TB_ERR_CONFIG: return "config";
    case TB_ERR_IO: return "io";
    case TB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int tb_exit_code(tb_status status) {
  using twinbeam::ErrorKind;
  switch (status) {
    case TB_OK: return 0;
    case TB_ERR_INVALID_ARGUMENT: return twinbeam::exit_code(ErrorKind::invalid_argument);
    case TB_ERR_CONFIG: return twinbeam::exit_code(ErrorKind::config);
    case TB_ERR_NUMERICAL:
    case TB_ERR_TRUNCATION:
    case TB_ERR_UNDEFINED_Q:
    case TB_ERR_UNDEFINED_FRINGES:
    case TB_ERR_INCONSISTENT_WIDTHS:
    case TB_ERR_AMBIGUOUS:
      return twinbeam::exit_code(ErrorKind::numerical_failure);
    default:
      return 1;
  }
}

void tb_string_free(char* s) { delete[] s; }

tb_status tb_config_default(tb_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new tb_config{};
  });
}

tb_status tb_config_from_text(const char* json_text, tb_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new tb_config{twinbeam::parse_config_text(json_text)};
  });
}

tb_status tb_config_from_file(const char* path, tb_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tb_config{twinbeam::parse_config_file(path)};
  });
}

tb_status tb_config_set(tb_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    twinbeam::RunConfig next = cfg->cfg;
    twinbeam::set_config_value(next, key, value);
    cfg->cfg = std::move(next);
  });
}

tb_status tb_config_to_json(const tb_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = copy_string(twinbeam::to_json(cfg->cfg).dump(2));
  });
}

void tb_config_free(tb_config* cfg) { delete cfg; }

size_t tb_config_key_count(void) { return twinbeam::config_keys().size(); }

const char* tb_config_key_name(size_t index) {
  static const std::vector<std::string> keys = twinbeam::config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

size_t tb_subcommand_count(void) { return twinbeam::subcommands().size(); }

const char* tb_subcommand_name(size_t index) {
  const auto& names = twinbeam::subcommands();
  return index < names.size() ? names[index].c_str() : nullptr;
}

tb_status tb_run(const tb_config* cfg, const char* subcommand) {
  return guarded([&] {
    need(cfg, "config");
    need(subcommand, "subcommand");
    twinbeam::run_subcommand(subcommand, cfg->cfg);
  });
}

tb_status tb_phase_mismatch_angle(double wavelength_m, double cell_length_m,
                                  double* theta_m_mrad) {
  return guarded([&] {
    need(theta_m_mrad, "theta_m_mrad");
    *theta_m_mrad = 1e3 * twinbeam::phase_mismatch_angle(wavelength_m, cell_length_m);
  });
}

tb_status tb_mode_count_estimate(double theta0, double delta_theta, double theta_c,
                                 double* total) {
  return guarded([&] {
    need(total, "total");
    *total = twinbeam::mode_count_estimate(theta0, delta_theta, theta_c).total;
  });
}

tb_status tb_amplifier_build(const tb_config* cfg, tb_geometry geometry, tb_amplifier** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    twinbeam::Geometry g;
    switch (geometry) {
      case TB_POLAR_CUT: g = twinbeam::Geometry::polar_cut; break;
      case TB_AZIMUTHAL_CUT: g = twinbeam::Geometry::azimuthal_cut; break;
      case TB_PLANE: g = twinbeam::Geometry::plane; break;
      default: twinbeam::fail(twinbeam::ErrorKind::invalid_argument, "unknown geometry");
    }
    *out = new tb_amplifier{twinbeam::build_amplifier(cfg->cfg, g)};
  });
}

void tb_amplifier_free(tb_amplifier* amp) { delete amp; }

tb_status tb_amplifier_scale(const tb_amplifier* amp, double* s0) {
  return guarded([&] {
    need(amp, "amplifier");
    need(s0, "s0");
    *s0 = amp->amp.gain.s0;
  });
}

tb_status tb_amplifier_schmidt(const tb_amplifier* amp, size_t* rank, double* s_max) {
  return guarded([&] {
    need(amp, "amplifier");
    const auto& s = amp->amp.schmidt();
    if (rank) *rank = static_cast<size_t>(s.rank());
    if (s_max) *s_max = s.rank() > 0 ? s.s[0] : 0.0;
  });
}

tb_status tb_amplifier_gain(const tb_amplifier* amp, double x, double y, double waist,
                            double* gain) {
  return guarded([&] {
    need(amp, "amplifier");
    need(gain, "gain");
    const auto seed = twinbeam::gaussian_mode(amp->amp.grid, {x, y}, waist);
    *gain = twinbeam::effective_gain(amp->amp.schmidt(), seed);
  });
}

tb_status tb_amplifier_difference_noise_db(const tb_amplifier* amp, double x, double y,
                                           double waist, double eta, double* noise_db) {
  return guarded([&] {
    need(amp, "amplifier");
    need(noise_db, "noise_db");
    twinbeam::require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
    const auto seed = twinbeam::gaussian_mode(amp->amp.grid, {x, y}, waist);
    const auto out = amp->amp.amplify(seed, 1e6);
    *noise_db = twinbeam::difference_noise(out, eta).rel_sql_db;
  });
}

}  // extern "C"
