#ifndef SCISSORS_DETECTION_HPP
#define SCISSORS_DETECTION_HPP

#include "scissors/fock_core.hpp"

namespace scissors {

struct DetectorSpec {
  double eta_spd = 0.5;
  bool discriminating = false;  // true: ideal photon-number projector

  DetectorSpec() = default;
  DetectorSpec(double eta, bool discr);
};

/// Diagonal POVM elements, returned as the vector of diagonal entries.
/// No-click: (1-eta)^n.  Click: 1 - (1-eta)^n.
Eigen::VectorXd povm_no_click(const DetectorSpec& spec, const ModeLayout& layout);
Eigen::VectorXd povm_click(const DetectorSpec& spec, const ModeLayout& layout);
/// |n><n| as a diagonal.
Eigen::VectorXd projector_exactly_n(int n, const ModeLayout& layout);

struct ConditionResult {
  DensityMatrix rho_out;  // unnormalized, single mode (Bob)
  double p_tel;           // trace of rho_out
};

/// Bell-measurement collapse on a three-mode state: D1 on mode 0
/// registers the heralding outcome, D2 on mode 1 registers nothing,
/// and the conditioned (unnormalized) state of mode 2 is returned.
/// Non-discriminating detectors use click/no-click; discriminating ones
/// project on exactly one / exactly zero photons.
/// Throws NumericalError if p_tel falls below `p_floor`.
ConditionResult condition_on_bell(const DensityMatrix& rho123, const DetectorSpec& d1,
                                  const DetectorSpec& d2, double p_floor = 1e-15);

/// Pure-state variant: accumulates the conditioned mode-2 matrix of a
/// three-mode pure state (no floor check; callers combine branches).
Mat condition_on_bell_pure(const FockState& psi123, const DetectorSpec& d1,
                           const DetectorSpec& d2);

}  // namespace scissors

#endif
