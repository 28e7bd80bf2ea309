#ifndef SCISSORS_PROTOCOL_HPP
#define SCISSORS_PROTOCOL_HPP

#include <optional>
#include <string>
#include <vector>

#include "scissors/detection.hpp"
#include "scissors/fock_core.hpp"
#include "scissors/optics.hpp"

namespace scissors {

/// The five physical parameters of the protocol.
struct ProtocolParams {
  complexd alpha = 0.0;    // coherent source amplitude
  double eta_one = 0.9;    // single-photon preparation efficiency
  double eta_spd = 0.5;    // single-photon detector efficiency
  double eta_hd = 0.54;    // homodyne-chain efficiency on Bob's mode
  double mode_match = 0.56;

  void validate() const;
};

struct SimOptions {
  int cutoff = 12;
  double coherent_tail_bound = 1e-10;
  double bs_tail_bound = 1e-9;
  double p_floor = 1e-15;
};

/// Smallest cutoff at which the truncation tail of |alpha> is below
/// `tail_target`, plus a two-level margin; never below `floor_cutoff`.
int suggested_cutoff(complexd alpha, double tail_target = 1e-11, int floor_cutoff = 12);

enum class BranchTag { quantum, semiclassical, mixed };

struct BranchResult {
  DensityMatrix rho;   // normalized, single mode
  double probability;  // heralding probability of this branch
  BranchTag tag;
};

/// Full quantum pipeline: heralded photon -> EPR splitter -> Alice's
/// splitter with the coherent source -> conditional Bell collapse with
/// the given detectors. The heralded-photon mixture is propagated as
/// two pure branches.
BranchResult quantum_branch_with_detectors(const ProtocolParams& params,
                                           const DetectorSpec& d1, const DetectorSpec& d2,
                                           const SimOptions& opts = {});

/// Non-discriminating detectors of efficiency eta_spd on both ports.
BranchResult quantum_branch(const ProtocolParams& params, const SimOptions& opts = {});

/// Idealized variant: perfect photon preparation, number-discriminating
/// detectors. Output is the two-term truncation a0|0> + a1|1>, normalized.
BranchResult quantum_branch_ideal(const ProtocolParams& params, const SimOptions& opts = {});

struct SemiclassicalProbabilities {
  double p_tel;  // P(D1 click and D2 no-click)
  double p_out;  // P(EPR photon reached Bob | heralding event)
};

/// Exact enumeration of the particle model: Poisson source photons and
/// the delocalized photon routed by fair splitters, click statistics per
/// photon with efficiency eta_spd.
SemiclassicalProbabilities semiclassical_probabilities(const ProtocolParams& params);
BranchResult semiclassical_branch(const ProtocolParams& params, const SimOptions& opts = {});

/// Mode-matching mixture of the quantum and semiclassical branches,
/// renormalized, followed by the homodyne-chain loss on Bob's mode.
BranchResult bob_ensemble(const ProtocolParams& params, const SimOptions& opts = {});

/// Bob's ensemble with no conditioning on Alice's detectors, after the
/// homodyne-chain loss. Diagonal, with single-photon fraction
/// eta_one * eta_hd / 2.
DensityMatrix unconditioned_bob(const ProtocolParams& params, const SimOptions& opts = {});

struct SweepRecord {
  complexd alpha;
  double f_mixed = 0.0;
  double f_ideal = 0.0;
  double f_semiclassical = 0.0;
  double p_tel = 0.0;
  double p_tel_sc = 0.0;
  std::string error;  // nonempty if this grid point failed
};

/// Per alpha: mixture fidelity, ideal-model fidelity and semiclassical
/// fidelity against the untruncated |alpha>, plus both heralding
/// probabilities. Failing grid points are recorded, not fatal.
std::vector<SweepRecord> fidelity_vs_alpha(const ProtocolParams& params_template,
                                           const std::vector<complexd>& alpha_grid,
                                           const SimOptions& opts = {});

struct PhasePoint {
  double phi;
  DensityMatrix rho_bob;
};

/// Bob's ensemble as the source phase is scanned at fixed |alpha|.
std::vector<PhasePoint> phase_sweep(const ProtocolParams& params_template,
                                    const std::vector<double>& phi_grid,
                                    const SimOptions& opts = {});

}  // namespace scissors

#endif
