#ifndef SCISSORS_HOMODYNE_HPP
#define SCISSORS_HOMODYNE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scissors/fock_core.hpp"

namespace scissors {

// Quadrature convention: x_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2),
// vacuum variance 1/2.

struct QuadratureSample {
  double theta;  // local-oscillator phase, [0, 2pi)
  double x;
};

struct QuadratureDataset {
  std::vector<QuadratureSample> samples;
  std::uint64_t source_seed = 0;
  static constexpr const char* convention = "vacuum-variance-1/2";

  void write(std::ostream& os) const;
  static QuadratureDataset read(std::istream& is);
};

/// Real harmonic-oscillator eigenfunctions psi_0..psi_{n_max} at x,
/// evaluated by the stable three-term recurrence.
std::vector<double> oscillator_wavefunctions(int n_max, double x);

/// pr(x|theta) = sum_{m,n} rho_mn e^{i(n-m)theta} psi_m(x) psi_n(x).
double quadrature_pdf(const DensityMatrix& rho, double theta, double x);

/// Analytic <x_theta> from rho.
double mean_quadrature(const DensityMatrix& rho, double theta);
/// Analytic <x_theta^2> - <x_theta>^2 from rho.
double variance_quadrature(const DensityMatrix& rho, double theta);

/// Deterministic synthetic homodyne run: n_per_theta inverse-CDF draws
/// from quadrature_pdf at each scheduled phase.
QuadratureDataset sample_quadratures(const DensityMatrix& rho,
                                     const std::vector<double>& theta_schedule,
                                     int n_per_theta, std::uint64_t seed);

struct ReconstructedState {
  DensityMatrix rho_hat;           // Hermitized estimate
  Eigen::MatrixXd standard_errors;  // per-element statistical error
  std::vector<std::string> warnings;
};

/// Quantum-state-sampling estimate: rho_mn is the sample mean of the
/// pattern function f_mn(x) e^{i(m-n)theta}.
ReconstructedState reconstruct(const QuadratureDataset& data, int cutoff);

/// Tabulated pattern functions on a dense x grid. Exposed so tests can
/// check the estimator against exact-pdf integration.
class PatternTable {
 public:
  PatternTable(int cutoff, double x_max = 6.0, double step = 1e-3);
  /// f_{mn}(x), linearly interpolated; symmetric in (m, n).
  double value(int m, int n, double x) const;
  int cutoff() const { return cutoff_; }

 private:
  int cutoff_;
  double x_max_, step_;
  Eigen::Index points_;
  std::vector<Eigen::VectorXd> tables_;  // indexed by m*(cutoff+1)+n, m >= n
};

struct LossCorrectResult {
  DensityMatrix rho;
  bool non_physical;  // inversion produced an eigenvalue < -1e-3
};

/// Inverse of the Bernoulli loss map at efficiency eta (blockwise
/// triangular back-substitution). Rejects eta below `eta_floor`, where
/// the inversion is ill-conditioned.
LossCorrectResult loss_correct(const DensityMatrix& rho_hat, double eta,
                               double eta_floor = 0.3);

}  // namespace scissors

#endif
