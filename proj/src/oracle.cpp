#include "twinbeam/oracle.hpp"

#include "twinbeam/errors.hpp"
#include "twinbeam/gaussian_state.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace twinbeam {

namespace {

std::size_t tuple_count(int n_modes, int n_max) {
  std::size_t n = 1;
  for (int i = 0; i < n_modes; ++i) n *= static_cast<std::size_t>(n_max + 1);
  return n;
}

std::vector<int> decode(std::size_t idx, int n_modes, int n_max) {
  std::vector<int> n(static_cast<std::size_t>(n_modes));
  for (auto& v : n) {
    v = static_cast<int>(idx % static_cast<std::size_t>(n_max + 1));
    idx /= static_cast<std::size_t>(n_max + 1);
  }
  return n;
}

void check_shape(int n_modes, int n_max) {
  require(n_modes >= 1 && n_modes <= 3, "oracle supports one to three modes");
  require(n_max >= 2, "oracle truncation must be at least 2");
  require(tuple_count(n_modes, n_max) <= 4'000'000, "oracle state too large");
}

void check_leakage(const FockState& s) {
  const double leak = s.leakage();
  if (leak > kLeakageTolerance) {
    fail(ErrorKind::truncation, "Fock truncation leakage " + std::to_string(leak) +
                                    " exceeds tolerance; raise n_max");
  }
}

}  // namespace

std::size_t FockState::index(const std::vector<int>& n) const {
  require(static_cast<int>(n.size()) == n_modes, "Fock tuple has the wrong length");
  std::size_t idx = 0, stride = 1;
  for (int v : n) {
    require(v >= 0 && v <= n_max, "photon number outside truncation");
    idx += static_cast<std::size_t>(v) * stride;
    stride *= static_cast<std::size_t>(n_max + 1);
  }
  return idx;
}

double FockState::leakage() const {
  double inside = 0.0;
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    const auto n = decode(static_cast<std::size_t>(i), n_modes, n_max);
    bool in = true;
    for (int v : n) in = in && v <= n_max - 2;
    if (in) inside += std::norm(amplitudes[i]);
  }
  return std::max(0.0, 1.0 - inside);
}

int suggested_n_max(double s, double alpha_sq) {
  const double sh = std::sinh(s);
  return static_cast<int>(std::ceil(8.0 * (sh * sh + alpha_sq))) + 20;
}

FockState fock_vacuum(int n_modes, int n_max) {
  check_shape(n_modes, n_max);
  FockState f{n_modes, n_max,
              Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(tuple_count(n_modes, n_max)))};
  f.amplitudes[0] = 1.0;
  return f;
}

FockState fock_coherent(const std::vector<std::complex<double>>& alphas, int n_max) {
  const int k = static_cast<int>(alphas.size());
  check_shape(k, n_max);
  // Single-mode coefficients e^{-|a|^2/2} a^n / sqrt(n!).
  std::vector<Eigen::VectorXcd> single;
  for (const auto& a : alphas) {
    Eigen::VectorXcd c(n_max + 1);
    c[0] = std::exp(-0.5 * std::norm(a));
    for (int n = 1; n <= n_max; ++n) c[n] = c[n - 1] * a / std::sqrt(double(n));
    single.push_back(std::move(c));
  }
  FockState f{k, n_max,
              Eigen::VectorXcd(static_cast<Eigen::Index>(tuple_count(k, n_max)))};
  for (Eigen::Index i = 0; i < f.amplitudes.size(); ++i) {
    const auto n = decode(static_cast<std::size_t>(i), k, n_max);
    std::complex<double> v = 1.0;
    for (int m = 0; m < k; ++m) v *= single[m][n[m]];
    f.amplitudes[i] = v;
  }
  return f;
}

FockState fock_two_mode_squeeze(double s, std::complex<double> seed_alpha, int n_max,
                                SqueezeMethod method) {
  require(std::isfinite(s) && s >= 0.0, "squeeze parameter must be non-negative");
  check_shape(2, n_max);
  if (seed_alpha == 0.0 && method == SqueezeMethod::automatic) {
    FockState f = fock_vacuum(2, n_max);
    f.amplitudes[0] = 0.0;
    const double t = -std::tanh(s);
    double c = 1.0 / std::cosh(s);
    for (int n = 0; n <= n_max; ++n, c *= t) f.amplitudes[f.index({n, n})] = c;
    check_leakage(f);
    return f;
  }
  const FockState in = fock_coherent({seed_alpha, 0.0}, n_max);
  FockState out = fock_vacuum(2, n_max);
  out.amplitudes.setZero();
  // The generator s (a b - a^dag b^dag) conserves n_a - n_b; exponentiate
  // each block separately. Block basis: n_b = k, n_a = k + delta.
  for (int delta = -n_max; delta <= n_max; ++delta) {
    const int k0 = std::max(0, -delta);
    const int k1 = std::min(n_max, n_max - delta);
    const int dim = k1 - k0 + 1;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 1; i < dim; ++i) {
      const double k = k0 + i;
      const double e = s * std::sqrt((k + delta) * k);
      g(i - 1, i) = e;
      g(i, i - 1) = -e;
    }
    const Eigen::MatrixXd u = g.exp();
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = in.amplitudes[in.index({k0 + i + delta, k0 + i})];
    const Eigen::VectorXcd w = u.cast<std::complex<double>>() * v;
    for (int i = 0; i < dim; ++i) out.amplitudes[out.index({k0 + i + delta, k0 + i})] = w[i];
  }
  check_leakage(out);
  return out;
}

NumberDistribution number_distribution(const FockState& state) {
  return {state.n_modes, state.n_max, state.amplitudes.cwiseAbs2()};
}

NumberDistribution fock_thermal(double nbar, int n_max) {
  require(std::isfinite(nbar) && nbar >= 0.0, "thermal mean must be non-negative");
  check_shape(1, n_max);
  NumberDistribution d{1, n_max, Eigen::VectorXd(n_max + 1)};
  const double r = nbar / (nbar + 1.0);
  double p = 1.0 / (nbar + 1.0);
  for (int n = 0; n <= n_max; ++n, p *= r) d.p[n] = p;
  if (1.0 - d.p.sum() > kLeakageTolerance) {
    fail(ErrorKind::truncation, "thermal distribution truncated; raise n_max");
  }
  return d;
}

NumberDistribution fock_loss(const NumberDistribution& d, int mode, double eta) {
  require(mode >= 0 && mode < d.n_modes, "mode index out of range");
  require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0,
          "transmission must lie in [0, 1]");
  const int nm = d.n_max;
  // binom(n, k) eta^k (1 - eta)^(n - k) by the Pascal recursion.
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nm + 1, nm + 1);
  b(0, 0) = 1.0;
  for (int n = 1; n <= nm; ++n) {
    for (int k = 0; k <= n; ++k) {
      b(n, k) = (1.0 - eta) * b(n - 1, k) + (k > 0 ? eta * b(n - 1, k - 1) : 0.0);
    }
  }
  NumberDistribution out{d.n_modes, nm, Eigen::VectorXd::Zero(d.p.size())};
  std::size_t stride = 1;
  for (int m = 0; m < mode; ++m) stride *= static_cast<std::size_t>(nm + 1);
  for (Eigen::Index i = 0; i < d.p.size(); ++i) {
    if (d.p[i] == 0.0) continue;
    const auto idx = static_cast<std::size_t>(i);
    const int n = static_cast<int>((idx / stride) % static_cast<std::size_t>(nm + 1));
    const std::size_t base = idx - static_cast<std::size_t>(n) * stride;
    for (int k = 0; k <= n; ++k) {
      out.p[static_cast<Eigen::Index>(base + static_cast<std::size_t>(k) * stride)] +=
          d.p[i] * b(n, k);
    }
  }
  return out;
}

NumberDistribution fock_loss(const FockState& s, int mode, double eta) {
  return fock_loss(number_distribution(s), mode, eta);
}

NumberStats fock_number_stats(const NumberDistribution& d,
                              const std::vector<double>& weights) {
  require(static_cast<int>(weights.size()) == d.n_modes,
          "weight vector has the wrong length");
  double m1 = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < d.p.size(); ++i) {
    if (d.p[i] == 0.0) continue;
    const auto n = decode(static_cast<std::size_t>(i), d.n_modes, d.n_max);
    double x = 0.0;
    for (int m = 0; m < d.n_modes; ++m) x += weights[m] * n[m];
    m1 += d.p[i] * x;
    m2 += d.p[i] * x * x;
  }
  return {m1, m2 - m1 * m1};
}

NumberStats fock_number_stats(const FockState& s, const std::vector<double>& weights) {
  return fock_number_stats(number_distribution(s), weights);
}

namespace {

struct BeamWeights {
  const char* name;
  double probe, conj;
};

constexpr BeamWeights kWeights[] = {
    {"probe", 1.0, 0.0}, {"conjugate", 0.0, 1.0}, {"sum", 1.0, 1.0},
    {"difference", 1.0, -1.0}};

void check_limits(const OracleScenario& sc) {
  for (int k = 0; k < 2; ++k) {
    require(sc.s[k] >= 0.0 && sc.s[k] <= 0.5 + 1e-12,
            "oracle scenarios need 0 <= s <= 0.5");
    require(std::norm(sc.alpha[k]) <= 4.0 + 1e-12,
            "oracle scenarios need |alpha|^2 <= 4");
  }
  require(sc.eta_probe >= 0.0 && sc.eta_probe <= 1.0 && sc.eta_conj >= 0.0 &&
              sc.eta_conj <= 1.0,
          "transmissions must lie in [0, 1]");
}

// Gaussian side: two probe and two conjugate pixel modes of unit area with a
// diagonal kernel, pushed through the public state operations.
GaussianState gaussian_output(const OracleScenario& sc) {
  const auto grid = make_grid(1.0, 2, 1);
  CouplingKernel k{grid, Eigen::MatrixXd::Zero(2, 2), false};
  k.kappa(0, 0) = sc.s[0];
  k.kappa(1, 1) = sc.s[1];
  const auto t = bogoliubov_from_schmidt(schmidt_decompose(k, SchmidtMethod::svd));
  GaussianState st = vacuum_state(2);
  for (int p = 0; p < 2; ++p) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(2);
    e[p] = 1.0;
    st = seed_coherent(st, Beam::probe, ModeField::from_coefficients(grid, e),
                       sc.alpha[p]);
  }
  st = apply_bogoliubov(st, t);
  st = apply_mask(st, Beam::probe, attenuator_mask(grid, sc.eta_probe));
  return apply_mask(st, Beam::conjugate, attenuator_mask(grid, sc.eta_conj));
}

double rel(double g, double o, double denom) {
  const double d = std::abs(g - o);
  return denom > 0.0 ? d / denom : d;
}

}  // namespace

OracleComparison compare_gaussian_fock(const OracleScenario& sc, int n_max) {
  check_limits(sc);
  // Oracle pairs: number distributions after loss.
  std::vector<NumberDistribution> pairs;
  for (int k = 0; k < 2; ++k) {
    if (sc.s[k] == 0.0 && sc.alpha[k] == 0.0) continue;
    const int nm = n_max > 0 ? n_max : suggested_n_max(sc.s[k], std::norm(sc.alpha[k]));
    auto d = number_distribution(fock_two_mode_squeeze(sc.s[k], sc.alpha[k], nm));
    d = fock_loss(d, 0, sc.eta_probe);
    pairs.push_back(fock_loss(d, 1, sc.eta_conj));
  }
  const GaussianState g = gaussian_output(sc);

  OracleComparison out;
  out.scenario = sc.name;
  for (const auto& w : kWeights) {
    WeightCheck c;
    c.weights = w.name;
    double sql = 0.0;
    for (const auto& d : pairs) {
      const auto st = fock_number_stats(d, {w.probe, w.conj});
      c.oracle_mean += st.mean;
      c.oracle_var += st.var;
      sql += fock_number_stats(d, {std::abs(w.probe), std::abs(w.conj)}).mean;
    }
    const Eigen::VectorXd wv = beam_weights(2, w.probe, w.conj);
    c.gaussian_mean = photon_mean(g, wv);
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t l = 0; l < 4; ++l) {
        c.gaussian_var += wv[j] * wv[l] * photon_cov(g, j, l);
      }
    }
    c.deviation = std::max(rel(c.gaussian_mean, c.oracle_mean,
                               std::max(std::abs(c.oracle_mean), sql)),
                           rel(c.gaussian_var, c.oracle_var,
                               std::max(std::abs(c.oracle_var), sql)));
    c.q_defined = sql > 1e-12;
    if (c.q_defined) {
      const NoiseResult r = detector_noise(g, wv);
      c.gaussian_q = r.mandel_Q;
      c.oracle_q = c.oracle_var / sql - 1.0;
      c.deviation = std::max({c.deviation,
                              rel(r.var_N, c.oracle_var, std::max(std::abs(c.oracle_var), sql)),
                              rel(c.gaussian_q, c.oracle_q,
                                  std::max(std::abs(c.oracle_q), 1.0))});
    }
    out.max_deviation = std::max(out.max_deviation, c.deviation);
    out.checks.push_back(std::move(c));
  }
  return out;
}

std::vector<OracleScenario> oracle_battery() {
  using C = std::complex<double>;
  auto pair = [](std::string name, double s, C a, double ep, double ec) {
    OracleScenario sc;
    sc.name = std::move(name);
    sc.s[0] = s;
    sc.alpha[0] = a;
    sc.eta_probe = ep;
    sc.eta_conj = ec;
    return sc;
  };
  std::vector<OracleScenario> b = {
      pair("vacuum", 0.0, 0.0, 1.0, 1.0),
      pair("coherent a2=1", 0.0, 1.0, 1.0, 1.0),
      pair("coherent a2=4 eta=0.5", 0.0, C(0.0, 2.0), 0.5, 0.5),
      pair("tmsv s=0.1", 0.1, 0.0, 1.0, 1.0),
      pair("tmsv s=0.3", 0.3, 0.0, 1.0, 1.0),
      pair("tmsv s=0.5", 0.5, 0.0, 1.0, 1.0),
      pair("tmsv s=0.5 eta=0.9", 0.5, 0.0, 0.9, 0.9),
      pair("tmsv s=0.3 eta=0.5", 0.3, 0.0, 0.5, 0.5),
      pair("seeded s=0.3 a2=1", 0.3, 1.0, 1.0, 1.0),
      pair("seeded s=0.5 a2=4", 0.5, 2.0, 1.0, 1.0),
      pair("seeded s=0.5 a2=4 eta=0.9", 0.5, C(std::sqrt(2.0), std::sqrt(2.0)), 0.9, 0.9),
      pair("seeded s=0.3 a2=1 eta=0.5", 0.3, C(0.0, 1.0), 0.5, 0.5),
      pair("seeded s=0.1 a2=4 eta=0.9/0.5", 0.1, 2.0, 0.9, 0.5),
  };
  OracleScenario two;
  two.name = "two pairs s=0.3/0.5 a2=1/0 eta=0.9";
  two.s[0] = 0.3;
  two.s[1] = 0.5;
  two.alpha[0] = 1.0;
  two.eta_probe = two.eta_conj = 0.9;
  b.push_back(two);
  OracleScenario degenerate;
  degenerate.name = "two pairs s=0.5/0.5 a2=1/4";
  degenerate.s[0] = degenerate.s[1] = 0.5;
  degenerate.alpha[0] = 1.0;
  degenerate.alpha[1] = C(0.0, -2.0);
  b.push_back(degenerate);
  return b;
}

}  // namespace twinbeam
