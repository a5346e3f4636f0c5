#pragma once

// Probe-conjugate pair-creation kernel, its Schmidt (singular value)
// decomposition into independent two-mode squeezers, and the resulting
// multimode Bogoliubov transformation.

#include "twinbeam/transverse.hpp"

#include <Eigen/Dense>

#include <memory>

namespace twinbeam {

struct GainConfig {
  double s0 = 1.0;               // kernel peak, per mrad (1D) or mrad^2 (2D)
  double theta0 = 7.0;           // mrad, angle of peak gain
  double wavelength = 795e-9;    // m
  double cell_length = 12e-3;    // m
  double pump_far_width = 0.5;   // mrad, 1/e^2 intensity radius
  double overlap_width = 6.0;    // mrad

  void validate() const;
};

/// sqrt(lambda / L), in radians.
double phase_mismatch_angle(double wavelength, double cell_length);

/// Longitudinal quasi-phase-matching factor sinc(pi L (theta^2 - theta0^2) /
/// (2 lambda)), unity at theta0. Angles in mrad.
double phase_matching_factor(const GainConfig& cfg, double theta);

/// Probe-pump overlap envelope exp(-(theta - theta0)^2 / w_o^2).
double overlap_factor(const GainConfig& cfg, double theta);

/// kappa(q_p, q_c): rows are probe pixels, columns conjugate pixels. The
/// discrete coupling between pixel modes is kappa * pixel_area.
struct CouplingKernel {
  TransverseGrid grid;
  Eigen::MatrixXd kappa;
  /// kappa(q_p, q_c) == kappa(-q_c, -q_p); enables the symmetric solver.
  bool reflection_symmetric = false;

  Eigen::MatrixXd coupling() const { return kappa * grid.pixel_area(); }
};

CouplingKernel build_kernel(const TransverseGrid& grid, const GainConfig& cfg);

/// s * u(q_p) v(q_c) for real-valued normalized fields.
CouplingKernel rank_one_kernel(double s, const ModeField& u,
                               const ModeField& v);

struct SchmidtDecomposition {
  TransverseGrid grid;
  Eigen::VectorXd s;             // descending, all > truncation threshold
  Eigen::MatrixXd probe_modes;   // columns: unit-norm pixel coefficients
  Eigen::MatrixXd conj_modes;

  int rank() const { return static_cast<int>(s.size()); }
  std::size_t modes_per_beam() const { return grid.size(); }
  ModeField probe_mode(int i) const;
  ModeField conj_mode(int i) const;
  SchmidtDecomposition scaled(double factor) const;
};

enum class SchmidtMethod { automatic, svd };

/// Singular values below kRelativeCutoff * s_max are dropped.
inline constexpr double kRelativeCutoff = 1e-6;

SchmidtDecomposition schmidt_decompose(
    const CouplingKernel& kernel,
    SchmidtMethod method = SchmidtMethod::automatic);

/// a_out = U_aa a + V_ab b^dagger,  b_out = U_bb b + V_ba a^dagger.
/// Held in factored form; dense blocks are built on request.
class BogoliubovTransform {
 public:
  explicit BogoliubovTransform(SchmidtDecomposition schmidt);

  std::size_t modes_per_beam() const { return schmidt_->modes_per_beam(); }
  const SchmidtDecomposition& schmidt() const { return *schmidt_; }

  Eigen::MatrixXcd u_aa() const;
  Eigen::MatrixXcd v_ab() const;
  Eigen::MatrixXcd u_bb() const;
  Eigen::MatrixXcd v_ba() const;

  /// Output mean fields for input means (probe, conjugate).
  void apply_to_mean(const Eigen::VectorXcd& alpha_p,
                     const Eigen::VectorXcd& alpha_c, Eigen::VectorXcd& out_p,
                     Eigen::VectorXcd& out_c) const;

  /// max of ||U_aa U_aa^H - V_ab V_ab^H - I||_inf and
  /// ||U_aa V_ba^T - V_ab U_bb^T||_inf (dense; small grids only).
  double symplectic_error() const;

 private:
  std::shared_ptr<const SchmidtDecomposition> schmidt_;
};

BogoliubovTransform bogoliubov_from_schmidt(const SchmidtDecomposition& s);

/// Output/input photon ratio for a bright coherent seed in `seed`.
double effective_gain(const SchmidtDecomposition& schmidt,
                      const ModeField& seed);

/// Scale factor k such that effective_gain(schmidt.scaled(k), seed) equals
/// target_gain. Gain is monotone in k.
double calibrate_scale(const SchmidtDecomposition& unit_schmidt,
                       const ModeField& seed, double target_gain);

struct ModeCount {
  double radial = 0.0;
  double azimuthal = 0.0;
  double total = 0.0;
};

ModeCount mode_count_estimate(double theta0, double delta_theta,
                              double theta_c);

/// Number of Schmidt values >= fraction * s_max.
int count_modes_above(const SchmidtDecomposition& s, double fraction);

}  // namespace twinbeam
