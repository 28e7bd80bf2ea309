#include "scissors/protocol.hpp"

#include <cmath>

namespace scissors {

namespace {

void check_range(double v, const char* name) {
  if (v < 0.0 || v > 1.0)
    throw std::invalid_argument(std::string(name) + " outside [0,1]");
}

// EPR resource as a pure state: B(|0,1>) = (|0,1> - |1,0>)/sqrt(2).
FockState epr_pure(const ModeLayout& two_mode) {
  ModeLayout single(1, two_mode.cutoff);
  FockState in = tensor(fock_basis_state(0, single), fock_basis_state(1, single));
  return beam_splitter_apply(in, BeamSplitterSpec(0, 1, 0.5));
}

FockState two_mode_vacuum(const ModeLayout& two_mode) {
  ModeLayout single(1, two_mode.cutoff);
  return tensor(fock_basis_state(0, single), fock_basis_state(0, single));
}

// The two pure branches of |alpha> (x) rho_epr after Alice's splitter,
// with their mixture weights.
struct PureBranches {
  FockState with_photon;  // weight eta_one
  FockState no_photon;    // weight 1 - eta_one
};

PureBranches alice_output_branches(const ProtocolParams& params, const SimOptions& opts) {
  ModeLayout single(1, opts.cutoff);
  ModeLayout two(2, opts.cutoff);
  FockState coh = coherent_state(params.alpha, single, opts.coherent_tail_bound).state;
  BeamSplitterSpec alice_bs(0, 1, 0.5);
  FockState a = beam_splitter_apply(tensor(coh, epr_pure(two)), alice_bs, opts.bs_tail_bound);
  FockState b = beam_splitter_apply(tensor(coh, two_mode_vacuum(two)), alice_bs, opts.bs_tail_bound);
  return {std::move(a), std::move(b)};
}

}  // namespace

void ProtocolParams::validate() const {
  check_range(eta_one, "eta_one");
  check_range(eta_spd, "eta_spd");
  check_range(eta_hd, "eta_hd");
  check_range(mode_match, "mode_match");
}

int suggested_cutoff(complexd alpha, double tail_target, int floor_cutoff) {
  int n = floor_cutoff;
  while (coherent_tail_mass(alpha, n) > tail_target) ++n;
  return n + 2;
}

BranchResult quantum_branch_with_detectors(const ProtocolParams& params,
                                           const DetectorSpec& d1, const DetectorSpec& d2,
                                           const SimOptions& opts) {
  params.validate();
  PureBranches br = alice_output_branches(params, opts);
  Mat out = params.eta_one * condition_on_bell_pure(br.with_photon, d1, d2) +
            (1.0 - params.eta_one) * condition_on_bell_pure(br.no_photon, d1, d2);
  const double p = out.trace().real();
  if (p < opts.p_floor)
    throw NumericalError("quantum_branch: no valid teleportation branch (p_tel below floor)");
  ModeLayout single(1, opts.cutoff);
  return {DensityMatrix(single, out / p), p, BranchTag::quantum};
}

BranchResult quantum_branch(const ProtocolParams& params, const SimOptions& opts) {
  DetectorSpec det(params.eta_spd, false);
  return quantum_branch_with_detectors(params, det, det, opts);
}

BranchResult quantum_branch_ideal(const ProtocolParams& params, const SimOptions& opts) {
  ProtocolParams ideal = params;
  ideal.eta_one = 1.0;
  DetectorSpec det(1.0, true);
  BranchResult r = quantum_branch_with_detectors(ideal, det, det, opts);
  r.tag = BranchTag::quantum;
  return r;
}

SemiclassicalProbabilities semiclassical_probabilities(const ProtocolParams& params) {
  params.validate();
  const double lambda = std::norm(params.alpha);
  const double eta = params.eta_spd;
  // Per photon entering Alice's splitter: detected at D1 with eta/2,
  // detected at D2 with eta/2, undetected otherwise. With k photons,
  // P(D1 fires, D2 silent) = (1-eta/2)^k - (1-eta)^k.
  auto herald = [eta](int k) {
    return std::pow(1.0 - eta / 2.0, k) - std::pow(1.0 - eta, k);
  };

  double p_tel = 0.0, p_bob_and_event = 0.0;
  double poisson = std::exp(-lambda);  // P(n=0)
  double cumulative = 0.0;
  for (int n = 0; cumulative < 1.0 - 1e-16 || n < 4; ++n) {
    const double p_alice = params.eta_one / 2.0;  // EPR photon joins Alice's splitter
    const double p_bob = params.eta_one / 2.0;
    const double p_none = 1.0 - params.eta_one;
    p_tel += poisson * ((p_none + p_bob) * herald(n) + p_alice * herald(n + 1));
    p_bob_and_event += poisson * p_bob * herald(n);
    cumulative += poisson;
    poisson *= lambda / (n + 1.0);
    if (n > 500) break;
  }
  SemiclassicalProbabilities r;
  r.p_tel = p_tel;
  r.p_out = p_tel > 0.0 ? p_bob_and_event / p_tel : 0.0;
  return r;
}

BranchResult semiclassical_branch(const ProtocolParams& params, const SimOptions& opts) {
  SemiclassicalProbabilities p = semiclassical_probabilities(params);
  if (p.p_tel < opts.p_floor)
    throw NumericalError("semiclassical_branch: heralding probability below floor");
  ModeLayout single(1, opts.cutoff);
  Mat rho = Mat::Zero(single.dim(), single.dim());
  rho(0, 0) = 1.0 - p.p_out;
  rho(1, 1) = p.p_out;
  return {DensityMatrix(single, std::move(rho)), p.p_tel, BranchTag::semiclassical};
}

BranchResult bob_ensemble(const ProtocolParams& params, const SimOptions& opts) {
  params.validate();
  double w_q = 0.0, w_sc = 0.0;
  DensityMatrix rho_q, rho_sc;
  if (params.mode_match > 0.0) {
    try {
      BranchResult q = quantum_branch(params, opts);
      w_q = params.mode_match * q.probability;
      rho_q = std::move(q.rho);
    } catch (const NumericalError&) {
    }
  }
  if (params.mode_match < 1.0) {
    try {
      BranchResult sc = semiclassical_branch(params, opts);
      w_sc = (1.0 - params.mode_match) * sc.probability;
      rho_sc = std::move(sc.rho);
    } catch (const NumericalError&) {
    }
  }
  const double w = w_q + w_sc;
  if (w < opts.p_floor)
    throw NumericalError("bob_ensemble: both branch probabilities below floor");
  ModeLayout single(1, opts.cutoff);
  Mat mix = Mat::Zero(single.dim(), single.dim());
  if (w_q > 0.0) mix += (w_q / w) * rho_q.elements;
  if (w_sc > 0.0) mix += (w_sc / w) * rho_sc.elements;
  DensityMatrix mixed = loss_channel(DensityMatrix(single, std::move(mix)), params.eta_hd, 0);
  return {std::move(mixed), w, BranchTag::mixed};
}

DensityMatrix unconditioned_bob(const ProtocolParams& params, const SimOptions& opts) {
  params.validate();
  PureBranches br = alice_output_branches(params, opts);
  // Reduced state of Bob's mode: trace out Alice's two modes.
  const int d = opts.cutoff + 1;
  Mat red = Mat::Zero(d, d);
  auto accumulate = [&](const FockState& psi, double weight) {
    for (Eigen::Index pair = 0; pair < static_cast<Eigen::Index>(d) * d; ++pair) {
      const auto seg = psi.amplitudes.segment(pair * d, d);
      red += weight * (seg * seg.adjoint());
    }
  };
  accumulate(br.with_photon, params.eta_one);
  accumulate(br.no_photon, 1.0 - params.eta_one);
  ModeLayout single(1, opts.cutoff);
  return loss_channel(DensityMatrix(single, std::move(red)), params.eta_hd, 0);
}

std::vector<SweepRecord> fidelity_vs_alpha(const ProtocolParams& params_template,
                                           const std::vector<complexd>& alpha_grid,
                                           const SimOptions& opts) {
  if (alpha_grid.empty()) throw std::invalid_argument("fidelity_vs_alpha: empty grid");
  std::vector<SweepRecord> out;
  out.reserve(alpha_grid.size());
  ModeLayout single(1, opts.cutoff);
  for (complexd alpha : alpha_grid) {
    SweepRecord rec;
    rec.alpha = alpha;
    ProtocolParams p = params_template;
    p.alpha = alpha;
    try {
      // Untruncated |alpha> padded to the cutoff: exact coefficients,
      // no renormalization of the missing tail.
      FockState target = coherent_state(alpha, single, opts.coherent_tail_bound).state;

      BranchResult mixed = bob_ensemble(p, opts);
      rec.f_mixed = fidelity_pure(mixed.rho, target);

      BranchResult ideal = quantum_branch_ideal(p, opts);
      rec.f_ideal = fidelity_pure(ideal.rho, target);
      rec.p_tel = quantum_branch(p, opts).probability;

      BranchResult sc = semiclassical_branch(p, opts);
      rec.p_tel_sc = sc.probability;
      DensityMatrix sc_lossy = loss_channel(sc.rho, p.eta_hd, 0);
      rec.f_semiclassical = fidelity_pure(sc_lossy, target);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PhasePoint> phase_sweep(const ProtocolParams& params_template,
                                    const std::vector<double>& phi_grid,
                                    const SimOptions& opts) {
  if (phi_grid.empty()) throw std::invalid_argument("phase_sweep: empty grid");
  const double mag = std::abs(params_template.alpha);
  std::vector<PhasePoint> out;
  out.reserve(phi_grid.size());
  for (double phi : phi_grid) {
    ProtocolParams p = params_template;
    p.alpha = std::polar(mag, phi);
    out.push_back({phi, bob_ensemble(p, opts).rho});
  }
  return out;
}

}  // namespace scissors
