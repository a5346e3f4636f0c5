#include "twinbeam/gaussian_state.hpp"

#include "twinbeam/errors.hpp"

#include <cmath>
#include <limits>

namespace twinbeam {

namespace {

using Block = GaussianState::Block;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

Block make_block(MatrixXcd m) {
  if (m.size() == 0 || m.isZero(0.0)) return nullptr;
  return std::make_shared<const MatrixXcd>(std::move(m));
}

Block scaled_block(const Block& b, const VectorXd* left, const VectorXd* right) {
  if (!b) return nullptr;
  MatrixXcd m = *b;
  if (left) m = left->asDiagonal() * m;
  if (right) m = m * right->asDiagonal();
  return make_block(std::move(m));
}

// u^T |X|^2 v
double quad_abs2(const Block& x, const VectorXd& u, const VectorXd& v) {
  if (!x) return 0.0;
  double acc = 0.0;
  for (Index k = 0; k < x->cols(); ++k) {
    if (v[k] == 0.0) continue;
    acc += v[k] * u.dot(x->col(k).cwiseAbs2());
  }
  return acc;
}

// y^T X z
cplx bilinear(const Block& x, const VectorXcd& y, const VectorXcd& z) {
  if (!x) return 0.0;
  return (y.transpose() * (*x * z))(0, 0);
}

Eigen::ArrayXd occupations(const GaussianState& s) {
  const Index m = static_cast<Index>(s.modes_per_beam());
  Eigen::ArrayXd n = s.alpha().cwiseAbs2().array();
  const auto& b = s.blocks();
  if (b.a_pp) n.head(m) += b.a_pp->diagonal().real().array();
  if (b.a_cc) n.tail(m) += b.a_cc->diagonal().real().array();
  return n;
}

NoiseResult finish_noise(double mean, double var, double sql) {
  if (!(sql > 1e-300) || !std::isfinite(sql)) {
    fail(ErrorKind::undefined_q, "Mandel Q is undefined at zero detected intensity");
  }
  NoiseResult r;
  r.mean_N = mean;
  r.var_N = var;
  r.sql = sql;
  r.mandel_Q = var / sql - 1.0;
  r.rel_sql_db = to_db(var / sql);
  return r;
}

}  // namespace

nlohmann::json to_json(const NoiseResult& r) {
  return {{"mean_N", r.mean_N},
          {"var_N", r.var_N},
          {"mandel_Q", r.mandel_Q},
          {"rel_sql_db", r.rel_sql_db}};
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

GaussianState GaussianState::from_parts(std::size_t m, VectorXcd alpha,
                                        Blocks blocks) {
  require(m >= 1, "state needs at least one mode per beam");
  require(static_cast<std::size_t>(alpha.size()) == 2 * m,
          "mean-field vector has the wrong size");
  for (const Block* b : {&blocks.a_pp, &blocks.a_pc, &blocks.a_cc, &blocks.b_pp,
                         &blocks.b_pc, &blocks.b_cc}) {
    require(!*b || (static_cast<std::size_t>((*b)->rows()) == m &&
                    static_cast<std::size_t>((*b)->cols()) == m),
            "moment block has the wrong size");
  }
  GaussianState s;
  s.m_ = m;
  s.alpha_ = std::move(alpha);
  s.blocks_ = std::move(blocks);
  return s;
}

VectorXcd GaussianState::alpha(Beam b) const {
  const Index m = static_cast<Index>(m_);
  return b == Beam::probe ? alpha_.head(m) : alpha_.tail(m);
}

bool GaussianState::is_coherent() const {
  const auto& b = blocks_;
  return !b.a_pp && !b.a_pc && !b.a_cc && !b.b_pp && !b.b_pc && !b.b_cc;
}

GaussianState GaussianState::with_alpha(VectorXcd alpha) const {
  require(alpha.size() == alpha_.size(), "mean-field vector has the wrong size");
  GaussianState s = *this;
  s.alpha_ = std::move(alpha);
  return s;
}

cplx GaussianState::A(std::size_t j, std::size_t k) const {
  require(j < 2 * m_ && k < 2 * m_, "mode index out of range");
  const bool pj = j < m_, pk = k < m_;
  const Index jj = static_cast<Index>(pj ? j : j - m_);
  const Index kk = static_cast<Index>(pk ? k : k - m_);
  if (pj && pk) return blocks_.a_pp ? (*blocks_.a_pp)(jj, kk) : 0.0;
  if (!pj && !pk) return blocks_.a_cc ? (*blocks_.a_cc)(jj, kk) : 0.0;
  if (!blocks_.a_pc) return 0.0;
  return pj ? (*blocks_.a_pc)(jj, kk) : std::conj((*blocks_.a_pc)(kk, jj));
}

cplx GaussianState::B(std::size_t j, std::size_t k) const {
  require(j < 2 * m_ && k < 2 * m_, "mode index out of range");
  const bool pj = j < m_, pk = k < m_;
  const Index jj = static_cast<Index>(pj ? j : j - m_);
  const Index kk = static_cast<Index>(pk ? k : k - m_);
  if (pj && pk) return blocks_.b_pp ? (*blocks_.b_pp)(jj, kk) : 0.0;
  if (!pj && !pk) return blocks_.b_cc ? (*blocks_.b_cc)(jj, kk) : 0.0;
  if (!blocks_.b_pc) return 0.0;
  return pj ? (*blocks_.b_pc)(jj, kk) : (*blocks_.b_pc)(kk, jj);
}

MatrixXcd GaussianState::dense_A() const {
  const Index m = static_cast<Index>(m_);
  MatrixXcd a = MatrixXcd::Zero(2 * m, 2 * m);
  if (blocks_.a_pp) a.topLeftCorner(m, m) = *blocks_.a_pp;
  if (blocks_.a_cc) a.bottomRightCorner(m, m) = *blocks_.a_cc;
  if (blocks_.a_pc) {
    a.topRightCorner(m, m) = *blocks_.a_pc;
    a.bottomLeftCorner(m, m) = blocks_.a_pc->adjoint();
  }
  return a;
}

MatrixXcd GaussianState::dense_B() const {
  const Index m = static_cast<Index>(m_);
  MatrixXcd b = MatrixXcd::Zero(2 * m, 2 * m);
  if (blocks_.b_pp) b.topLeftCorner(m, m) = *blocks_.b_pp;
  if (blocks_.b_cc) b.bottomRightCorner(m, m) = *blocks_.b_cc;
  if (blocks_.b_pc) {
    b.topRightCorner(m, m) = *blocks_.b_pc;
    b.bottomLeftCorner(m, m) = blocks_.b_pc->transpose();
  }
  return b;
}

double GaussianState::physicality_margin() const {
  const MatrixXcd a = dense_A();
  const MatrixXcd b = dense_B();
  const Index n = a.rows();
  MatrixXcd sigma(2 * n, 2 * n);
  sigma.topLeftCorner(n, n) = MatrixXcd::Identity(n, n) + a.transpose();
  sigma.topRightCorner(n, n) = b;
  sigma.bottomLeftCorner(n, n) = b.conjugate();
  sigma.bottomRightCorner(n, n) = a;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

GaussianState vacuum_state(std::size_t modes_per_beam) {
  require(modes_per_beam >= 1, "state needs at least one mode per beam");
  return GaussianState::from_parts(modes_per_beam,
                                   VectorXcd::Zero(2 * static_cast<Index>(modes_per_beam)),
                                   {});
}

GaussianState state_from_moments(VectorXcd alpha, const MatrixXcd& a,
                                 const MatrixXcd& b) {
  const Index n = alpha.size();
  require(n >= 2 && n % 2 == 0, "state needs an even, positive mode count");
  require(a.rows() == n && a.cols() == n && b.rows() == n && b.cols() == n,
          "moment matrices have the wrong size");
  const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(),
                                               b.cwiseAbs().maxCoeff()));
  require((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "normal moment matrix must be Hermitian");
  require((b - b.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "anomalous moment matrix must be symmetric");
  const Index m = n / 2;
  GaussianState::Blocks blocks{make_block(a.topLeftCorner(m, m)),
                               make_block(a.topRightCorner(m, m)),
                               make_block(a.bottomRightCorner(m, m)),
                               make_block(b.topLeftCorner(m, m)),
                               make_block(b.topRightCorner(m, m)),
                               make_block(b.bottomRightCorner(m, m))};
  return GaussianState::from_parts(static_cast<std::size_t>(m), std::move(alpha),
                                   std::move(blocks));
}

GaussianState seed_coherent(const GaussianState& state, Beam beam,
                            const ModeField& mode, cplx amplitude) {
  require(mode.grid.size() == state.modes_per_beam(),
          "seed mode does not match the state's mode count");
  require(mode.is_normalized(), "seed mode must be normalized");
  const Index m = static_cast<Index>(state.modes_per_beam());
  VectorXcd alpha = state.alpha();
  if (beam == Beam::probe) {
    alpha.head(m) += amplitude * mode.coefficients();
  } else {
    alpha.tail(m) += amplitude * mode.coefficients();
  }
  return state.with_alpha(std::move(alpha));
}

GaussianState apply_bogoliubov(const GaussianState& state,
                               const BogoliubovTransform& t) {
  require(t.modes_per_beam() == state.modes_per_beam(),
          "transform and state dimensions differ");
  const std::size_t mm = state.modes_per_beam();
  const Index m = static_cast<Index>(mm);
  VectorXcd alpha(2 * m);
  {
    VectorXcd op, oc;
    t.apply_to_mean(state.alpha(Beam::probe), state.alpha(Beam::conjugate), op, oc);
    alpha.head(m) = op;
    alpha.tail(m) = oc;
  }

  const SchmidtDecomposition& sd = t.schmidt();
  if (state.is_coherent()) {
    // Vacuum fluctuations in: A' = S^* S^T, B' = T S^T in factored form.
    if (sd.rank() == 0) return GaussianState::from_parts(mm, std::move(alpha), {});
    const Eigen::ArrayXd sh = sd.s.array().sinh();
    const Eigen::VectorXd sh2 = sh.square().matrix();
    const Eigen::VectorXd csh = (sh * sd.s.array().cosh()).matrix();
    const Eigen::MatrixXd up = sd.probe_modes;
    const Eigen::MatrixXd vc = sd.conj_modes;
    GaussianState::Blocks blocks;
    blocks.a_pp = make_block(((up * sh2.asDiagonal()) * up.transpose()).cast<cplx>());
    blocks.a_cc = make_block(((vc * sh2.asDiagonal()) * vc.transpose()).cast<cplx>());
    blocks.b_pc = make_block(((up * csh.asDiagonal()) * vc.transpose()).cast<cplx>());
    return GaussianState::from_parts(mm, std::move(alpha), std::move(blocks));
  }

  // General input: x' = T x + S x^dagger with T = diag(U_aa, U_bb),
  // S = [[0, V_ab], [V_ba, 0]].
  MatrixXcd tt = MatrixXcd::Zero(2 * m, 2 * m);
  MatrixXcd ss = MatrixXcd::Zero(2 * m, 2 * m);
  tt.topLeftCorner(m, m) = t.u_aa();
  tt.bottomRightCorner(m, m) = t.u_bb();
  ss.topRightCorner(m, m) = t.v_ab();
  ss.bottomLeftCorner(m, m) = t.v_ba();
  const MatrixXcd a = state.dense_A();
  const MatrixXcd b = state.dense_B();
  const MatrixXcd ia = MatrixXcd::Identity(2 * m, 2 * m) + a.transpose();
  const MatrixXcd a2 = tt.conjugate() * a * tt.transpose() +
                       tt.conjugate() * b.conjugate() * ss.transpose() +
                       ss.conjugate() * b * tt.transpose() +
                       ss.conjugate() * ia * ss.transpose();
  const MatrixXcd b2 = tt * b * tt.transpose() + tt * ia * ss.transpose() +
                       ss * a * tt.transpose() +
                       ss * b.conjugate() * ss.transpose();
  // Restore exact Hermiticity / symmetry lost to rounding.
  return state_from_moments(std::move(alpha), 0.5 * (a2 + a2.adjoint()),
                            0.5 * (b2 + b2.transpose()));
}

GaussianState apply_transmission(const GaussianState& state, Beam beam,
                                 const VectorXd& t) {
  require(static_cast<std::size_t>(t.size()) == state.modes_per_beam(),
          "transmission vector does not match the state");
  require(t.allFinite() && t.minCoeff() >= 0.0 && t.maxCoeff() <= 1.0,
          "mask transmission must lie in [0, 1]");
  const Index m = static_cast<Index>(state.modes_per_beam());
  VectorXcd alpha = state.alpha();
  auto b = state.blocks();
  if (beam == Beam::probe) {
    alpha.head(m).array() *= t.array();
    b.a_pp = scaled_block(b.a_pp, &t, &t);
    b.a_pc = scaled_block(b.a_pc, &t, nullptr);
    b.b_pp = scaled_block(b.b_pp, &t, &t);
    b.b_pc = scaled_block(b.b_pc, &t, nullptr);
  } else {
    alpha.tail(m).array() *= t.array();
    b.a_cc = scaled_block(b.a_cc, &t, &t);
    b.a_pc = scaled_block(b.a_pc, nullptr, &t);
    b.b_cc = scaled_block(b.b_cc, &t, &t);
    b.b_pc = scaled_block(b.b_pc, nullptr, &t);
  }
  return GaussianState::from_parts(state.modes_per_beam(), std::move(alpha),
                                   std::move(b));
}

GaussianState apply_mask(const GaussianState& state, Beam beam,
                         const DetectorMask& mask) {
  require(mask.grid.size() == state.modes_per_beam(),
          "mask does not match the state's grid");
  return apply_transmission(state, beam, mask.t);
}

double photon_mean(const GaussianState& state, const VectorXd& weights) {
  require(weights.size() == static_cast<Index>(state.total_modes()),
          "weight vector has the wrong size");
  require(weights.allFinite(), "weights must be finite");
  return (weights.array() * occupations(state)).sum();
}

double photon_cov(const GaussianState& state, std::size_t j, std::size_t k) {
  const cplx ajk = state.A(j, k);
  const cplx bjk = state.B(j, k);
  const cplx aj = state.alpha()[static_cast<Index>(j)];
  const cplx ak = state.alpha()[static_cast<Index>(k)];
  double c = std::norm(ajk) + std::norm(bjk);
  if (j == k) c += state.A(j, j).real() + std::norm(aj);
  c += 2.0 * (std::conj(aj) * ak * state.A(k, j) +
              std::conj(aj) * std::conj(ak) * bjk)
                 .real();
  return c;
}

NoiseResult masked_detector_noise(const GaussianState& state,
                                  const VectorXd& transmission,
                                  const VectorXd& weights) {
  const Index n = static_cast<Index>(state.total_modes());
  const Index m = n / 2;
  require(weights.size() == n && transmission.size() == n,
          "weight or transmission vector has the wrong size");
  require(weights.allFinite(), "weights must be finite");
  require(transmission.allFinite() && transmission.minCoeff() >= 0.0 &&
              transmission.maxCoeff() <= 1.0,
          "mask transmission must lie in [0, 1]");

  const Eigen::ArrayXd t2 = transmission.array().square();
  const Eigen::ArrayXd occ = occupations(state);
  const Eigen::ArrayXd w = weights.array();
  const double mean = (w * t2 * occ).sum();
  const double sql = (w.abs() * t2 * occ).sum();

  // Quadratic weights after loss, and the weighted mean field.
  const VectorXd u = (w * t2).matrix();
  const VectorXd up = u.head(m), uc = u.tail(m);
  const VectorXcd y = (u.cast<cplx>().array() * state.alpha().array()).matrix();
  const VectorXcd yp = y.head(m), yc = y.tail(m);
  const VectorXcd ypc = yp.conjugate(), ycc = yc.conjugate();
  const auto& b = state.blocks();

  double var = (w.square() * t2 * occ).sum();
  var += quad_abs2(b.a_pp, up, up) + 2.0 * quad_abs2(b.a_pc, up, uc) +
         quad_abs2(b.a_cc, uc, uc);
  var += quad_abs2(b.b_pp, up, up) + 2.0 * quad_abs2(b.b_pc, up, uc) +
         quad_abs2(b.b_cc, uc, uc);
  const cplx lin_a = bilinear(b.a_pp, yp, ypc) + 2.0 * bilinear(b.a_pc, yp, ycc) +
                     bilinear(b.a_cc, yc, ycc);
  const cplx lin_b = bilinear(b.b_pp, ypc, ypc) + 2.0 * bilinear(b.b_pc, ypc, ycc) +
                     bilinear(b.b_cc, ycc, ycc);
  var += 2.0 * (lin_a + lin_b).real();
  return finish_noise(mean, var, sql);
}

NoiseResult detector_noise(const GaussianState& state, const VectorXd& weights) {
  return masked_detector_noise(
      state, VectorXd::Ones(static_cast<Index>(state.total_modes())), weights);
}

double mandel_q_single_beam(const GaussianState& state, Beam beam,
                            const DetectorMask& mask) {
  const std::size_t m = state.modes_per_beam();
  require(mask.grid.size() == m, "mask does not match the state's grid");
  const DetectorMask open = all_pass(mask.grid);
  const Eigen::VectorXd tr = beam == Beam::probe ? stack_transmission(mask, open)
                                                 : stack_transmission(open, mask);
  const Eigen::VectorXd w = beam == Beam::probe ? beam_weights(m, 1.0, 0.0)
                                                : beam_weights(m, 0.0, 1.0);
  return masked_detector_noise(state, tr, w).mandel_Q;
}

VectorXd beam_weights(std::size_t modes_per_beam, double probe, double conjugate) {
  const Index m = static_cast<Index>(modes_per_beam);
  VectorXd w(2 * m);
  w.head(m).setConstant(probe);
  w.tail(m).setConstant(conjugate);
  return w;
}

VectorXd stack_transmission(const DetectorMask& probe, const DetectorMask& conjugate) {
  require(probe.t.size() == conjugate.t.size(), "masks have different sizes");
  VectorXd t(probe.t.size() * 2);
  t << probe.t, conjugate.t;
  return t;
}

}  // namespace twinbeam
