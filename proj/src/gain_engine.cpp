#include "twinbeam/gain_engine.hpp"

#include "twinbeam/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace twinbeam {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

Eigen::VectorXcd real_times(const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(m.rows());
  out.real() = m * v.real();
  out.imag() = m * v.imag();
  return out;
}

Eigen::VectorXcd real_transpose_times(const Eigen::MatrixXd& m,
                                      const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(m.cols());
  out.real() = m.transpose() * v.real();
  out.imag() = m.transpose() * v.imag();
  return out;
}

// Flip each pair so the largest-magnitude probe entry is positive.
void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index imax = 0;
    u.col(k).cwiseAbs().maxCoeff(&imax);
    if (u(imax, k) < 0.0) {
      u.col(k) *= -1.0;
      v.col(k) *= -1.0;
    }
  }
}

SchmidtDecomposition finish(const TransverseGrid& grid,
                            std::vector<double> values, Eigen::MatrixXd u,
                            Eigen::MatrixXd v) {
  // values are already >= 0; order descending, stable for determinism.
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return values[a] > values[b];
  });
  const double s_max = values.empty() ? 0.0 : values[order.front()];
  std::size_t rank = 0;
  if (s_max > 1e-300) {
    while (rank < order.size() &&
           values[order[rank]] >= kRelativeCutoff * s_max) {
      ++rank;
    }
  }
  SchmidtDecomposition out;
  out.grid = grid;
  out.s.resize(static_cast<Eigen::Index>(rank));
  out.probe_modes.resize(u.rows(), static_cast<Eigen::Index>(rank));
  out.conj_modes.resize(v.rows(), static_cast<Eigen::Index>(rank));
  for (std::size_t k = 0; k < rank; ++k) {
    out.s[k] = values[order[k]];
    out.probe_modes.col(k) = u.col(order[k]);
    out.conj_modes.col(k) = v.col(order[k]);
  }
  fix_signs(out.probe_modes, out.conj_modes);
  return out;
}

SchmidtDecomposition decompose_svd(const CouplingKernel& kernel) {
  const Eigen::MatrixXd k = kernel.coupling();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    fail(ErrorKind::numerical_failure, "kernel SVD did not converge");
  }
  const Eigen::VectorXd& sv = svd.singularValues();
  std::vector<double> values(sv.data(), sv.data() + sv.size());
  return finish(kernel.grid, std::move(values), svd.matrixU(), svd.matrixV());
}

// With kappa(i, j) == kappa(R j, R i), the reflected kernel K' = K R is
// symmetric. K' = W diag(lambda) W^T gives K = sum lambda_k w_k (R w_k)^T.
SchmidtDecomposition decompose_symmetric(const CouplingKernel& kernel) {
  const Eigen::Index n = kernel.kappa.rows();
  Eigen::MatrixXd sym = kernel.kappa.rowwise().reverse() *
                        kernel.grid.pixel_area();
  const double scale = sym.cwiseAbs().maxCoeff();
  const double asym = (sym - sym.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300)) return decompose_svd(kernel);

  Eigen::VectorXd lambda(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                     sym.data(), static_cast<lapack_int>(n), lambda.data());
  if (info != 0) {
    fail(ErrorKind::numerical_failure,
         "symmetric kernel eigensolver failed (info " + std::to_string(info) +
             ")");
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  Eigen::MatrixXd v = sym.colwise().reverse();
  for (Eigen::Index k = 0; k < n; ++k) {
    values[k] = std::abs(lambda[k]);
    if (lambda[k] < 0.0) v.col(k) *= -1.0;
  }
  return finish(kernel.grid, std::move(values), std::move(sym), std::move(v));
}

}  // namespace

void GainConfig::validate() const {
  require(std::isfinite(s0) && s0 >= 0.0, "s0 must be non-negative");
  require(std::isfinite(theta0) && theta0 >= 0.0, "theta0 must be non-negative");
  require(std::isfinite(wavelength) && wavelength > 0.0,
          "wavelength must be positive");
  require(std::isfinite(cell_length) && cell_length > 0.0,
          "cell_length must be positive");
  require(std::isfinite(pump_far_width) && pump_far_width > 0.0,
          "pump_far_width must be positive");
  require(std::isfinite(overlap_width) && overlap_width > 0.0,
          "overlap_width must be positive");
}

double phase_mismatch_angle(double wavelength, double cell_length) {
  require(wavelength > 0.0 && cell_length > 0.0,
          "wavelength and cell length must be positive");
  return std::sqrt(wavelength / cell_length);
}

double phase_matching_factor(const GainConfig& cfg, double theta) {
  const double t = theta * 1e-3;
  const double t0 = cfg.theta0 * 1e-3;
  return sinc(std::numbers::pi * cfg.cell_length * (t * t - t0 * t0) /
              (2.0 * cfg.wavelength));
}

double overlap_factor(const GainConfig& cfg, double theta) {
  const double d = (theta - cfg.theta0) / cfg.overlap_width;
  return std::exp(-d * d);
}

CouplingKernel build_kernel(const TransverseGrid& grid, const GainConfig& cfg) {
  cfg.validate();
  const std::size_t n = grid.size();
  // Physical positions of the probe and conjugate pixels.
  std::vector<Point> qp(n), qc(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point q = grid.position(i);
    if (!grid.is_2d() && grid.axis() == CutAxis::y) {
      qp[i] = {cfg.theta0, q.y};
      qc[i] = {-cfg.theta0, q.y};
    } else {
      qp[i] = qc[i] = q;
    }
  }
  std::vector<double> rp(n), rc(n);
  for (std::size_t i = 0; i < n; ++i) {
    rp[i] = std::hypot(qp[i].x, qp[i].y);
    rc[i] = std::hypot(qc[i].x, qc[i].y);
  }

  CouplingKernel k;
  k.grid = grid;
  k.reflection_symmetric = true;
  k.kappa.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double wp2 = cfg.pump_far_width * cfg.pump_far_width;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = qp[i].x + qc[j].x;
      const double dy = qp[i].y + qc[j].y;
      const double transverse = std::exp(-(dx * dx + dy * dy) / wp2);
      double value = 0.0;
      if (transverse > 1e-300) {
        const double mean_theta = 0.5 * (rp[i] + rc[j]);
        value = cfg.s0 * transverse * phase_matching_factor(cfg, mean_theta) *
                overlap_factor(cfg, mean_theta);
      }
      k.kappa(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
    }
  }
  return k;
}

CouplingKernel rank_one_kernel(double s, const ModeField& u, const ModeField& v) {
  require(u.grid == v.grid, "mode fields live on different grids");
  require(s >= 0.0, "squeeze parameter must be non-negative");
  require(u.amplitude.imag().cwiseAbs().maxCoeff() == 0.0 &&
              v.amplitude.imag().cwiseAbs().maxCoeff() == 0.0,
          "rank-one kernel needs real mode functions");
  CouplingKernel k;
  k.grid = u.grid;
  k.kappa = s * u.amplitude.real() * v.amplitude.real().transpose();
  return k;
}

ModeField SchmidtDecomposition::probe_mode(int i) const {
  require(i >= 0 && i < rank(), "Schmidt index out of range");
  return ModeField::from_coefficients(grid,
                                      probe_modes.col(i).cast<cplx>());
}

ModeField SchmidtDecomposition::conj_mode(int i) const {
  require(i >= 0 && i < rank(), "Schmidt index out of range");
  return ModeField::from_coefficients(grid, conj_modes.col(i).cast<cplx>());
}

SchmidtDecomposition SchmidtDecomposition::scaled(double factor) const {
  require(factor >= 0.0, "scale factor must be non-negative");
  SchmidtDecomposition out = *this;
  out.s *= factor;
  return out;
}

SchmidtDecomposition schmidt_decompose(const CouplingKernel& kernel,
                                       SchmidtMethod method) {
  if (!kernel.kappa.allFinite()) {
    fail(ErrorKind::numerical_failure, "kernel has non-finite entries");
  }
  require(kernel.kappa.rows() == static_cast<Eigen::Index>(kernel.grid.size()) &&
              kernel.kappa.cols() == kernel.kappa.rows(),
          "kernel shape does not match grid");
  if (method == SchmidtMethod::automatic && kernel.reflection_symmetric) {
    return decompose_symmetric(kernel);
  }
  return decompose_svd(kernel);
}

BogoliubovTransform::BogoliubovTransform(SchmidtDecomposition schmidt)
    : schmidt_(std::make_shared<const SchmidtDecomposition>(std::move(schmidt))) {}

Eigen::MatrixXcd BogoliubovTransform::u_aa() const {
  const auto& sd = *schmidt_;
  const Eigen::VectorXd c1 = sd.s.array().cosh() - 1.0;
  Eigen::MatrixXd m = sd.probe_modes * c1.asDiagonal() * sd.probe_modes.transpose();
  m.diagonal().array() += 1.0;
  return m.cast<cplx>();
}

Eigen::MatrixXcd BogoliubovTransform::u_bb() const {
  const auto& sd = *schmidt_;
  const Eigen::VectorXd c1 = sd.s.array().cosh() - 1.0;
  Eigen::MatrixXd m = sd.conj_modes * c1.asDiagonal() * sd.conj_modes.transpose();
  m.diagonal().array() += 1.0;
  return m.cast<cplx>();
}

Eigen::MatrixXcd BogoliubovTransform::v_ab() const {
  const auto& sd = *schmidt_;
  const Eigen::VectorXd sh = sd.s.array().sinh();
  return (sd.probe_modes * sh.asDiagonal() * sd.conj_modes.transpose())
      .cast<cplx>();
}

Eigen::MatrixXcd BogoliubovTransform::v_ba() const {
  const auto& sd = *schmidt_;
  const Eigen::VectorXd sh = sd.s.array().sinh();
  return (sd.conj_modes * sh.asDiagonal() * sd.probe_modes.transpose())
      .cast<cplx>();
}

void BogoliubovTransform::apply_to_mean(const Eigen::VectorXcd& alpha_p,
                                        const Eigen::VectorXcd& alpha_c,
                                        Eigen::VectorXcd& out_p,
                                        Eigen::VectorXcd& out_c) const {
  const auto& sd = *schmidt_;
  const auto m = static_cast<Eigen::Index>(sd.modes_per_beam());
  require(alpha_p.size() == m && alpha_c.size() == m,
          "mean-field size does not match transform");
  const Eigen::ArrayXd c1 = sd.s.array().cosh() - 1.0;
  const Eigen::ArrayXd sh = sd.s.array().sinh();
  const Eigen::VectorXcd pp = real_transpose_times(sd.probe_modes, alpha_p);
  const Eigen::VectorXcd cc = real_transpose_times(sd.conj_modes, alpha_c);
  const Eigen::VectorXcd pc = real_transpose_times(sd.conj_modes, alpha_c.conjugate());
  const Eigen::VectorXcd cp = real_transpose_times(sd.probe_modes, alpha_p.conjugate());
  out_p = alpha_p +
          real_times(sd.probe_modes, (c1 * pp.array() + sh * pc.array()).matrix());
  out_c = alpha_c +
          real_times(sd.conj_modes, (c1 * cc.array() + sh * cp.array()).matrix());
}

double BogoliubovTransform::symplectic_error() const {
  const Eigen::MatrixXcd uaa = u_aa(), vab = v_ab(), ubb = u_bb(), vba = v_ba();
  const auto m = uaa.rows();
  const Eigen::MatrixXcd c1 =
      uaa * uaa.adjoint() - vab * vab.adjoint() - Eigen::MatrixXcd::Identity(m, m);
  const Eigen::MatrixXcd c2 = uaa * vba.transpose() - vab * ubb.transpose();
  const Eigen::MatrixXcd c3 =
      ubb * ubb.adjoint() - vba * vba.adjoint() - Eigen::MatrixXcd::Identity(m, m);
  auto inf_norm = [](const Eigen::MatrixXcd& x) {
    return x.cwiseAbs().rowwise().sum().maxCoeff();
  };
  return std::max({inf_norm(c1), inf_norm(c2), inf_norm(c3)});
}

BogoliubovTransform bogoliubov_from_schmidt(const SchmidtDecomposition& s) {
  return BogoliubovTransform(s);
}

namespace {

Eigen::VectorXd seed_overlaps(const SchmidtDecomposition& schmidt,
                              const ModeField& seed) {
  require(seed.grid == schmidt.grid, "seed grid does not match decomposition");
  require(seed.is_normalized(), "seed mode must be normalized");
  return real_transpose_times(schmidt.probe_modes, seed.coefficients())
      .cwiseAbs2();
}

double gain_from_overlaps(const Eigen::VectorXd& s, const Eigen::VectorXd& w) {
  const Eigen::ArrayXd c2 = s.array().cosh().square();
  return (c2 * w.array()).sum() + (1.0 - w.sum());
}

}  // namespace

double effective_gain(const SchmidtDecomposition& schmidt, const ModeField& seed) {
  return gain_from_overlaps(schmidt.s, seed_overlaps(schmidt, seed));
}

double calibrate_scale(const SchmidtDecomposition& unit_schmidt,
                       const ModeField& seed, double target_gain) {
  require(std::isfinite(target_gain) && target_gain >= 1.0,
          "target gain must be at least 1");
  const Eigen::VectorXd w = seed_overlaps(unit_schmidt, seed);
  if (target_gain == 1.0) return 0.0;
  auto gain = [&](double k) { return gain_from_overlaps(unit_schmidt.s * k, w); };
  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (gain(hi) < target_gain) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60 || !std::isfinite(gain(hi))) {
      fail(ErrorKind::numerical_failure,
           "seed does not couple to the gain medium; cannot reach target gain");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gain(mid) < target_gain ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ModeCount mode_count_estimate(double theta0, double delta_theta,
                              double theta_c) {
  require(theta0 > 0.0 && delta_theta > 0.0 && theta_c > 0.0,
          "mode count inputs must be positive");
  ModeCount m;
  m.radial = delta_theta / theta_c;
  m.azimuthal = std::numbers::pi * theta0 / theta_c;
  m.total = m.radial * m.azimuthal;
  return m;
}

int count_modes_above(const SchmidtDecomposition& s, double fraction) {
  if (s.rank() == 0) return 0;
  const double cut = fraction * s.s[0];
  return static_cast<int>((s.s.array() >= cut).count());
}

}  // namespace twinbeam
