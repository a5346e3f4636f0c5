#pragma once

// Brute-force truncated Fock-space reference for one to three modes, used to
// validate the Gaussian-state photon statistics at small scale.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace twinbeam {

/// Pure state over Fock tuples (n_0, ..., n_{k-1}) with 0 <= n_i <= n_max.
/// The flat index is sum n_i (n_max + 1)^i.
struct FockState {
  int n_modes = 1;
  int n_max = 0;
  Eigen::VectorXcd amplitudes;

  std::size_t index(const std::vector<int>& n) const;
  double norm_squared() const { return amplitudes.squaredNorm(); }
  /// 1 - probability of the tuples with every n_i <= n_max - 2.
  double leakage() const;
};

/// Joint photon-number distribution, same indexing as FockState.
struct NumberDistribution {
  int n_modes = 1;
  int n_max = 0;
  Eigen::VectorXd p;
};

inline constexpr double kLeakageTolerance = 1e-10;

/// Guideline truncation 8 (sinh^2 s + |alpha|^2) + 20.
int suggested_n_max(double s, double alpha_sq);

FockState fock_vacuum(int n_modes, int n_max);
FockState fock_coherent(const std::vector<std::complex<double>>& alphas, int n_max);

enum class SqueezeMethod { automatic, exponential };

/// exp(s a b - s a^dagger b^dagger) applied to |alpha> (x) |0>. With a zero
/// seed the closed form (-tanh s)^n / cosh s is used unless `exponential` is
/// requested. Throws a truncation error when leakage exceeds tolerance.
FockState fock_two_mode_squeeze(double s, std::complex<double> seed_alpha, int n_max,
                                SqueezeMethod method = SqueezeMethod::automatic);

NumberDistribution number_distribution(const FockState& state);

/// Geometric distribution of mean nbar on a single mode.
NumberDistribution fock_thermal(double nbar, int n_max);

/// Binomial thinning of one mode's photon number (beamsplitter of power
/// transmission eta).
NumberDistribution fock_loss(const NumberDistribution& d, int mode, double eta);
NumberDistribution fock_loss(const FockState& s, int mode, double eta);

struct NumberStats {
  double mean = 0.0;
  double var = 0.0;
};

/// Moments of sum_j w_j n_j.
NumberStats fock_number_stats(const NumberDistribution& d,
                              const std::vector<double>& weights);
NumberStats fock_number_stats(const FockState& s, const std::vector<double>& weights);

/// Up to two independent squeezed pairs (probe i <-> conjugate i), each with
/// an optional coherent probe seed, then power transmissions on both beams.
struct OracleScenario {
  std::string name;
  double s[2] = {0.0, 0.0};
  std::complex<double> alpha[2] = {0.0, 0.0};
  double eta_probe = 1.0;
  double eta_conj = 1.0;
};

struct WeightCheck {
  std::string weights;  // probe | conjugate | sum | difference
  double gaussian_mean = 0.0, oracle_mean = 0.0;
  double gaussian_var = 0.0, oracle_var = 0.0;
  double gaussian_q = 0.0, oracle_q = 0.0;
  bool q_defined = false;
  double deviation = 0.0;
};

struct OracleComparison {
  std::string scenario;
  double max_deviation = 0.0;
  std::vector<WeightCheck> checks;
};

/// Runs the scenario through the Gaussian-state code and the Fock oracle.
/// n_max <= 0 picks the guideline truncation per pair.
OracleComparison compare_gaussian_fock(const OracleScenario& sc, int n_max = 0);

/// The standard battery (vacuum, coherent, TMSV, seeded TMSV, loss, two pairs).
std::vector<OracleScenario> oracle_battery();

inline constexpr double kOracleTolerance = 1e-6;

}  // namespace twinbeam
