#include "scissors/detection.hpp"

#include <cmath>

namespace scissors {

namespace {

Eigen::VectorXd detector_weight(const DetectorSpec& spec, int d, bool heralding) {
  // Diagonal weight over the photon number of one of Alice's modes.
  // heralding=true is the D1 outcome (click / exactly one photon),
  // heralding=false the D2 outcome (no click / exactly zero photons).
  Eigen::VectorXd w(d);
  for (int n = 0; n < d; ++n) {
    if (spec.discriminating) {
      w(n) = heralding ? (n == 1 ? 1.0 : 0.0) : (n == 0 ? 1.0 : 0.0);
    } else {
      const double no_click = std::pow(1.0 - spec.eta_spd, n);
      w(n) = heralding ? 1.0 - no_click : no_click;
    }
  }
  return w;
}

}  // namespace

DetectorSpec::DetectorSpec(double eta, bool discr) : eta_spd(eta), discriminating(discr) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("DetectorSpec: eta outside [0,1]");
}

Eigen::VectorXd povm_no_click(const DetectorSpec& spec, const ModeLayout& layout) {
  if (spec.discriminating)
    throw std::invalid_argument("povm_no_click: non-discriminating spec required");
  if (layout.mode_count != 1)
    throw std::invalid_argument("povm_no_click: single-mode layout required");
  Eigen::VectorXd w(layout.dim());
  for (int n = 0; n <= layout.cutoff; ++n) w(n) = std::pow(1.0 - spec.eta_spd, n);
  return w;
}

Eigen::VectorXd povm_click(const DetectorSpec& spec, const ModeLayout& layout) {
  return Eigen::VectorXd::Ones(layout.dim()) - povm_no_click(spec, layout);
}

Eigen::VectorXd projector_exactly_n(int n, const ModeLayout& layout) {
  if (layout.mode_count != 1)
    throw std::invalid_argument("projector_exactly_n: single-mode layout required");
  if (n < 0 || n > layout.cutoff)
    throw std::invalid_argument("projector_exactly_n: n out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(layout.dim());
  w(n) = 1.0;
  return w;
}

ConditionResult condition_on_bell(const DensityMatrix& rho123, const DetectorSpec& d1,
                                  const DetectorSpec& d2, double p_floor) {
  if (rho123.layout.mode_count != 3)
    throw std::invalid_argument("condition_on_bell: three-mode layout required");
  const int d = rho123.layout.dim_per_mode();
  const Eigen::VectorXd w1 = detector_weight(d1, d, true);
  const Eigen::VectorXd w2 = detector_weight(d2, d, false);

  // Both POVM elements are diagonal, so conditioning reduces to weighting
  // the (n1,n2) diagonal blocks before the partial trace over modes 0,1.
  ModeLayout single(1, rho123.layout.cutoff);
  Mat out = Mat::Zero(d, d);
  for (int n1 = 0; n1 < d; ++n1) {
    for (int n2 = 0; n2 < d; ++n2) {
      const double w = w1(n1) * w2(n2);
      if (w == 0.0) continue;
      const Eigen::Index base = (static_cast<Eigen::Index>(n1) * d + n2) * d;
      out += w * rho123.elements.block(base, base, d, d);
    }
  }
  const double p = out.trace().real();
  if (p < p_floor)
    throw NumericalError("condition_on_bell: no valid teleportation branch (p_tel below floor)");
  return {DensityMatrix(single, std::move(out)), p};
}

Mat condition_on_bell_pure(const FockState& psi123, const DetectorSpec& d1,
                           const DetectorSpec& d2) {
  if (psi123.layout.mode_count != 3)
    throw std::invalid_argument("condition_on_bell_pure: three-mode layout required");
  const int d = psi123.layout.dim_per_mode();
  const Eigen::VectorXd w1 = detector_weight(d1, d, true);
  const Eigen::VectorXd w2 = detector_weight(d2, d, false);
  Mat out = Mat::Zero(d, d);
  for (int n1 = 0; n1 < d; ++n1) {
    for (int n2 = 0; n2 < d; ++n2) {
      const double w = w1(n1) * w2(n2);
      if (w == 0.0) continue;
      const Eigen::Index base = (static_cast<Eigen::Index>(n1) * d + n2) * d;
      const auto seg = psi123.amplitudes.segment(base, d);
      out += w * (seg * seg.adjoint());
    }
  }
  return out;
}

}  // namespace scissors
