#include "twinbeam/dispatch.hpp"

#include "twinbeam/experiments.hpp"
#include "twinbeam/format.hpp"
#include "twinbeam/oracle.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace twinbeam {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Output {
  std::string csv;
  json summary;
  std::vector<std::pair<std::string, std::string>> extra;  // file name, content
};

// Missing aux values stay empty in the CSV.
std::string cell(const ScanResult& r, std::size_t i) {
  return i < r.aux.size() ? fmt_double(r.aux[i]) : std::string();
}

void append_series(std::ostringstream& os, const ScanResult& r) {
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    os << r.name << ',' << fmt_double(r.points[i].first) << ','
       << fmt_double(r.points[i].second) << ',' << cell(r, i) << '\n';
  }
}

json decisions(const RunConfig& cfg) {
  return {{"calibration_label", cfg.calibration_label},
          {"slit_deconvolution", "top-hat slits replaced by equivalent Gaussians "
                                 "(matched second moment), subtracted in quadrature"},
          {"slit_equivalent_factor", kSlitEquivalentFactor},
          {"seed_waist_mrad", cfg.seed_waist_mrad},
          {"spot_waist_mrad", cfg.spot_waist_mrad},
          {"lg_waist_mrad", cfg.lg_waist_mrad},
          {"two_spot_pair_masks", "half planes split at theta_y = 0"},
          {"technical_noise", "none modeled"}};
}

json amplifier_json(const Amplifier& a) {
  return {{"s0", a.gain.s0},
          {"schmidt_rank", a.schmidt().rank()},
          {"n_side", a.grid.n_side()},
          {"half_extent_mrad", a.grid.half_extent()},
          {"calibration_waist_mrad", a.calibration_waist}};
}

Output angle_sweep(const RunConfig& cfg) {
  const Amplifier amp = build_amplifier(cfg, Geometry::polar_cut);
  const AngleSweep s = run_angle_sweep(cfg, amp);
  std::ostringstream os;
  os << "theta_mrad,gain,noise_db\n";
  for (std::size_t i = 0; i < s.noise.points.size(); ++i) {
    os << fmt_double(s.noise.points[i].first) << ',' << fmt_double(s.gain.points[i].second)
       << ',' << fmt_double(s.noise.points[i].second) << '\n';
  }
  return {os.str(),
          {{"series", {to_json(s.gain), to_json(s.noise)}}, {"amplifier", amplifier_json(amp)}},
          {}};
}

Output mandel_probe(const RunConfig& cfg) {
  const Amplifier amp = build_amplifier(cfg, Geometry::polar_cut);
  const MandelProbe m = run_mandel_probe(cfg, amp);
  std::ostringstream os;
  os << "series,transmission,mandel_q,iris_diameter_mrad\n";
  append_series(os, m.attenuation);
  append_series(os, m.clipping);
  return {os.str(),
          {{"series", {to_json(m.attenuation), to_json(m.clipping)}},
           {"amplifier", amplifier_json(amp)}},
          {}};
}

Output mandel_diff(const RunConfig& cfg) {
  const Amplifier amp = build_amplifier(cfg, Geometry::polar_cut);
  const MandelDiff m = run_mandel_diff(cfg, amp);
  std::ostringstream os;
  os << "series,transmission,mandel_q,edge_offset_mrad\n";
  append_series(os, m.attenuation);
  append_series(os, m.symmetric);
  append_series(os, m.antisymmetric);
  return {os.str(),
          {{"series", {to_json(m.attenuation), to_json(m.symmetric), to_json(m.antisymmetric)}},
           {"amplifier", amplifier_json(amp)}},
          {}};
}

Output slit_scan(const RunConfig& cfg) {
  const Amplifier polar = build_amplifier(cfg, Geometry::polar_cut);
  const Amplifier azim = build_amplifier(cfg, Geometry::azimuthal_cut);
  const ScanResult a = run_slit_scan(cfg, SlitOrientation::azimuthal, polar);
  const ScanResult p = run_slit_scan(cfg, SlitOrientation::polar, azim);
  std::ostringstream os;
  os << "series,probe_slit_mrad,noise_db,probe_power_fraction\n";
  append_series(os, a);
  append_series(os, p);
  json summary{{"series", {to_json(a), to_json(p)}},
               {"amplifier", {{"polar_cut", amplifier_json(polar)},
                              {"azimuthal_cut", amplifier_json(azim)}}}};
  const auto ia = a.derived.find("theta_c_mrad");
  const auto ip = p.derived.find("theta_c_mrad");
  summary["theta_c_mean_mrad"] =
      ia != a.derived.end() && ip != p.derived.end() ? json(0.5 * (ia->second + ip->second))
                                                     : json(nullptr);
  return {os.str(), summary, {}};
}

Output two_spot(const RunConfig& cfg) {
  const Amplifier amp = build_amplifier(cfg, Geometry::plane);
  const TwoSpot t = run_two_spot(cfg, amp);
  std::ostringstream os;
  os << "case,noise_db\n";
  for (const auto& [name, v] : {std::pair{"joint", t.joint_db},
                                {"pair_a", t.pair_a_db},
                                {"pair_b", t.pair_b_db},
                                {"pair_a_alone", t.pair_a_alone_db},
                                {"single_gaussian", t.single_gaussian_db}}) {
    os << name << ',' << fmt_double(v) << '\n';
  }
  json summary{{"series", {to_json(t.table)}}, {"amplifier", amplifier_json(amp)}};
  if (t.overlap_warning) summary["warning"] = "spots overlap by more than 50% in power";
  return {os.str(), summary, {}};
}

std::string interferogram_csv(const TransverseGrid& g, const Interferogram& f) {
  std::ostringstream os;
  os << "theta_x_mrad,theta_y_mrad,intensity\n";
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Point q = g.position(p);
    os << fmt_double(q.x) << ',' << fmt_double(q.y) << ','
       << fmt_double(f.intensity[static_cast<Eigen::Index>(p)]) << '\n';
  }
  return os.str();
}

Output lg(const RunConfig& cfg) {
  const Amplifier amp = build_amplifier(cfg, Geometry::plane);
  const LgResult r = run_lg(cfg, cfg.ell, amp);
  std::ostringstream os;
  os << "ell,conjugate_overlap\n";
  for (std::size_t i = 0; i < r.conjugate_overlaps.size(); ++i) {
    os << static_cast<int>(i) - 3 << ',' << fmt_double(r.conjugate_overlaps[i]) << '\n';
  }
  json summary{{"ell", r.ell},
               {"conjugate_ell", r.conjugate_ell},
               {"probe_fringes", r.probe_interferogram.fringe_count},
               {"conjugate_fringes", r.conjugate_interferogram.fringe_count},
               {"squeezing_db", r.squeezing_db},
               {"amplifier", amplifier_json(amp)}};
  return {os.str(),
          summary,
          {{"lg_probe_interferogram.csv", interferogram_csv(amp.grid, r.probe_interferogram)},
           {"lg_conjugate_interferogram.csv",
            interferogram_csv(amp.grid, r.conjugate_interferogram)}}};
}

Output oracle_verify(const RunConfig&, bool& failed) {
  std::ostringstream os;
  os << "scenario,weights,gaussian_mean,oracle_mean,gaussian_var,oracle_var,"
        "gaussian_q,oracle_q,deviation\n";
  double worst = 0.0;
  json rows = json::array();
  for (const auto& sc : oracle_battery()) {
    const OracleComparison c = compare_gaussian_fock(sc);
    worst = std::max(worst, c.max_deviation);
    rows.push_back({{"scenario", c.scenario}, {"max_deviation", c.max_deviation}});
    for (const auto& w : c.checks) {
      os << c.scenario << ',' << w.weights << ',' << fmt_double(w.gaussian_mean) << ','
         << fmt_double(w.oracle_mean) << ',' << fmt_double(w.gaussian_var) << ','
         << fmt_double(w.oracle_var) << ',' << (w.q_defined ? fmt_double(w.gaussian_q) : "")
         << ',' << (w.q_defined ? fmt_double(w.oracle_q) : "") << ','
         << fmt_double(w.deviation) << '\n';
    }
  }
  failed = !(worst < kOracleTolerance);
  return {os.str(),
          {{"scenarios", rows},
           {"max_deviation", worst},
           {"tolerance", kOracleTolerance},
           {"passed", !failed}},
          {}};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  f.close();
  if (!f) fail(ErrorKind::io, "cannot write " + path.string());
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"angle-sweep", "mandel-probe", "mandel-diff",
                                              "slit-scan",   "two-spot",     "lg",
                                              "oracle-verify"};
  return names;
}

std::vector<std::string> run_subcommand(const std::string& name, const RunConfig& cfg) {
  cfg.validate();
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory " + dir.string());

  const auto started = std::chrono::steady_clock::now();
  std::ostringstream log;
  log << timestamp() << " start " << name << '\n';

  Output out;
  bool oracle_failed = false;
  if (name == "angle-sweep") out = angle_sweep(cfg);
  else if (name == "mandel-probe") out = mandel_probe(cfg);
  else if (name == "mandel-diff") out = mandel_diff(cfg);
  else if (name == "slit-scan") out = slit_scan(cfg);
  else if (name == "two-spot") out = two_spot(cfg);
  else if (name == "lg") out = lg(cfg);
  else if (name == "oracle-verify") out = oracle_verify(cfg, oracle_failed);
  else fail(ErrorKind::invalid_argument, "unknown subcommand '" + name + "'");

  json summary = out.summary;
  summary["subcommand"] = name;
  summary["config"] = to_json(cfg);
  summary["metadata"] = decisions(cfg);

  std::vector<std::string> written;
  auto emit = [&](const std::string& file, const std::string& content) {
    write_file(dir / file, content);
    written.push_back((dir / file).string());
  };
  emit(name + ".csv", out.csv);
  for (const auto& [file, content] : out.extra) emit(file, content);
  emit(name + ".json", summary.dump(2) + "\n");
  emit("config.resolved.json", to_json(cfg).dump(2) + "\n");

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  log << timestamp() << " done " << name << " in " << fmt_double(secs) << " s\n";
  write_file(dir / (name + ".log"), log.str());

  if (oracle_failed) {
    fail(ErrorKind::numerical_failure, "oracle deviation above tolerance");
  }
  return written;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::invalid_argument:
      return 2;
    case ErrorKind::numerical_failure:
    case ErrorKind::truncation:
    case ErrorKind::undefined_q:
    case ErrorKind::undefined_fringe_count:
    case ErrorKind::inconsistent_widths:
    case ErrorKind::ambiguous_projection:
      return 3;
    case ErrorKind::io:
      break;
  }
  return 1;
}

}  // namespace twinbeam
