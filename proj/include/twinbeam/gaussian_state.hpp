#pragma once

// Joint probe-conjugate Gaussian state in normal/anomalous moment form.
//
// Modes 0..M-1 are probe pixels, M..2M-1 conjugate pixels. With fluctuation
// operators d_j = a_j - alpha_j:
//   A_jk = <d_j^dagger d_k>   (Hermitian)
//   B_jk = <d_j d_k>          (symmetric)
// The moment matrices are stored as probe/conjugate blocks behind shared,
// immutable storage: copying a state is cheap, and transformations always
// produce new blocks. A missing block is identically zero.

#include "twinbeam/detection.hpp"
#include "twinbeam/gain_engine.hpp"

#include <json.hpp>

#include <memory>

namespace twinbeam {

enum class Beam { probe, conjugate };

struct NoiseResult {
  double mean_N = 0.0;
  double var_N = 0.0;
  double sql = 0.0;          // detected photon mean, sum |w_j| <N_j>
  double mandel_Q = 0.0;
  double rel_sql_db = 0.0;
};

nlohmann::json to_json(const NoiseResult& r);

class GaussianState {
 public:
  using Block = std::shared_ptr<const Eigen::MatrixXcd>;

  GaussianState() = default;

  std::size_t modes_per_beam() const { return m_; }
  std::size_t total_modes() const { return 2 * m_; }
  const Eigen::VectorXcd& alpha() const { return alpha_; }
  Eigen::VectorXcd alpha(Beam b) const;

  cplx A(std::size_t j, std::size_t k) const;
  cplx B(std::size_t j, std::size_t k) const;

  Eigen::MatrixXcd dense_A() const;
  Eigen::MatrixXcd dense_B() const;

  /// True when every moment block is zero (vacuum or coherent).
  bool is_coherent() const;

  /// Same fluctuations, new mean field (2M entries).
  GaussianState with_alpha(Eigen::VectorXcd alpha) const;

  /// Smallest eigenvalue of [[I + A^T, B], [B^*, A]]; non-negative for
  /// physical states. Dense, small states only.
  double physicality_margin() const;

  // Blocks: A_pp, A_pc (A_cp = A_pc^H), A_cc, B_pp, B_pc (B_cp = B_pc^T), B_cc.
  struct Blocks {
    Block a_pp, a_pc, a_cc, b_pp, b_pc, b_cc;
  };
  const Blocks& blocks() const { return blocks_; }

  static GaussianState from_parts(std::size_t m, Eigen::VectorXcd alpha,
                                  Blocks blocks);

 private:
  std::size_t m_ = 0;
  Eigen::VectorXcd alpha_;
  Blocks blocks_;
};

GaussianState vacuum_state(std::size_t modes_per_beam);

/// State with arbitrary dense moments (validated for shape and symmetry).
GaussianState state_from_moments(Eigen::VectorXcd alpha, const Eigen::MatrixXcd& a,
                                 const Eigen::MatrixXcd& b);

GaussianState seed_coherent(const GaussianState& state, Beam beam,
                            const ModeField& mode, cplx amplitude);

GaussianState apply_bogoliubov(const GaussianState& state,
                               const BogoliubovTransform& t);

GaussianState apply_mask(const GaussianState& state, Beam beam,
                         const DetectorMask& mask);

/// Per-pixel amplitude transmission on one beam.
GaussianState apply_transmission(const GaussianState& state, Beam beam,
                                 const Eigen::VectorXd& t);

double photon_mean(const GaussianState& state, const Eigen::VectorXd& weights);

double photon_cov(const GaussianState& state, std::size_t j, std::size_t k);

NoiseResult detector_noise(const GaussianState& state,
                           const Eigen::VectorXd& weights);

/// detector_noise after per-pixel amplitude transmissions on both beams,
/// without materializing the attenuated state. Transmissions are 2M long.
NoiseResult masked_detector_noise(const GaussianState& state,
                                  const Eigen::VectorXd& transmission,
                                  const Eigen::VectorXd& weights);

double mandel_q_single_beam(const GaussianState& state, Beam beam,
                            const DetectorMask& mask);

/// Weights +1 on one beam and 0 on the other.
Eigen::VectorXd beam_weights(std::size_t modes_per_beam, double probe,
                             double conjugate);

/// Transmission vector (2M) from per-beam masks.
Eigen::VectorXd stack_transmission(const DetectorMask& probe,
                                   const DetectorMask& conjugate);

double to_db(double ratio);

}  // namespace twinbeam
