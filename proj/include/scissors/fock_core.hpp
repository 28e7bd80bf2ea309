#ifndef SCISSORS_FOCK_CORE_HPP
#define SCISSORS_FOCK_CORE_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace scissors {

using complexd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// Thrown when a computation cannot continue for numerical reasons
/// (e.g. conditioning on an event of vanishing probability).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Default tolerances used across the library. All of them can be
/// overridden per call where it matters.
struct Tolerances {
  double hermiticity = 1e-12;
  double trace_unit = 1e-12;
  double eigenvalue_floor = -1e-10;
  double coherent_tail = 1e-10;  // max truncation tail mass of |alpha>
  double bs_tail = 1e-9;         // max state mass that a beam splitter would push past the cutoff
  double p_floor = 1e-15;        // smallest conditioning probability we normalize by
};

// Basis convention: mode 0 is the slowest index. For a layout with
// per-mode dimension d = cutoff+1, the flat index of |n_0,...,n_{k-1}>
// is ((n_0*d + n_1)*d + ...)*d + n_{k-1}.
struct ModeLayout {
  int mode_count = 1;
  int cutoff = 12;  // max photon number per mode

  ModeLayout() = default;
  ModeLayout(int modes, int n_max);

  int dim_per_mode() const { return cutoff + 1; }
  Eigen::Index dim() const;
  bool operator==(const ModeLayout&) const = default;

  Eigen::Index index_of(const std::vector<int>& occupation) const;
  std::vector<int> occupation_of(Eigen::Index index) const;
};

struct FockState {
  ModeLayout layout;
  Vec amplitudes;

  FockState() = default;
  FockState(ModeLayout l, Vec amps);

  double norm_squared() const { return amplitudes.squaredNorm(); }
  FockState normalized() const;
};

struct DensityMatrix {
  ModeLayout layout;
  Mat elements;

  DensityMatrix() = default;
  DensityMatrix(ModeLayout l, Mat m);

  double trace_real() const { return elements.trace().real(); }
  DensityMatrix normalized() const;
  /// (rho + rho^dag)/2
  DensityMatrix hermitized() const;
  bool is_hermitian(double tol = 1e-12) const;
  double min_eigenvalue() const;
};

/// |n> on a single-mode layout.
FockState fock_basis_state(int n, const ModeLayout& layout);
/// Pure-state projector |psi><psi|.
DensityMatrix pure_density(const FockState& psi);

struct CoherentResult {
  FockState state;
  double tail_mass;  // 1 - sum |a_n|^2 over n <= cutoff
};

/// Truncated coherent state, a_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!).
/// Rejects amplitudes whose truncation tail exceeds `tail_bound`.
CoherentResult coherent_state(complexd alpha, const ModeLayout& layout,
                              double tail_bound = 1e-10);

/// Exact Poisson tail mass sum_{n>cutoff} e^{-lambda} lambda^n/n!
/// for lambda = |alpha|^2; usable to pick a cutoff before building states.
double coherent_tail_mass(complexd alpha, int cutoff);

FockState tensor(const FockState& a, const FockState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Trace out every mode not in `keep`; kept modes stay in ascending
/// original order. Trace is preserved exactly up to rounding.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep);

/// <psi|rho|psi> for normalized rho (trace within `trace_tol` of 1).
double fidelity_pure(const DensityMatrix& rho, const FockState& psi,
                     double trace_tol = 1e-9);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 between two
/// normalized states. Small negative eigenvalues (from statistical
/// reconstruction) are clipped to zero.
double fidelity_mixed(const DensityMatrix& rho, const DensityMatrix& sigma);

double factorial(int n);
double log_factorial(int n);
double binomial(int n, int k);

}  // namespace scissors

#endif
