#ifndef SCISSORS_OPTICS_HPP
#define SCISSORS_OPTICS_HPP

#include "scissors/fock_core.hpp"

namespace scissors {

struct BeamSplitterSpec {
  int mode_a = 0;
  int mode_b = 1;
  double transmissivity = 0.5;

  BeamSplitterSpec() = default;
  BeamSplitterSpec(int a, int b, double t);
  BeamSplitterSpec inverse() const;
};

struct SourceSpec {
  double eta_one = 1.0;  // single-photon preparation efficiency

  SourceSpec() = default;
  explicit SourceSpec(double eta);
};

// Convention: with t = sqrt(T), r = sqrt(1-T) the splitter maps
//   a_dag -> t a_dag + r b_dag,   b_dag -> -r a_dag + t b_dag,
// which at T = 1/2 reproduces the symmetric photon-number-basis matrix
// elements including the (-1)^k phase on the second input.

/// Two-mode transformation matrix on the pair basis |m,n>, m,n <= cutoff.
/// Photon-number conserving; unitary on every block with m+n <= cutoff.
/// Output components past the cutoff are dropped.
Mat beam_splitter_matrix(const BeamSplitterSpec& spec, const ModeLayout& layout);

/// Conjugate rho by the splitter embedded on (spec.mode_a, spec.mode_b).
/// Rejects states carrying more than `tail_bound` mass on pair photon
/// numbers above the cutoff, where the transformation would truncate.
DensityMatrix beam_splitter_apply(const DensityMatrix& rho, const BeamSplitterSpec& spec,
                                  double tail_bound = 1e-9);
FockState beam_splitter_apply(const FockState& psi, const BeamSplitterSpec& spec,
                              double tail_bound = 1e-9);

/// Heralded single photon: eta|1><1| + (1-eta)|0><0|.
DensityMatrix prepare_heralded_photon(const SourceSpec& spec, const ModeLayout& layout);

/// Symmetric splitter applied to |0> (x) rho_heralded: the delocalized
/// single-photon EPR resource.
DensityMatrix make_epr(const SourceSpec& spec, const ModeLayout& layout);

/// Photon loss with efficiency eta on one mode (generalized Bernoulli
/// transformation), via the closed-form binomial element map.
DensityMatrix loss_channel(const DensityMatrix& rho, double eta, int mode);

}  // namespace scissors

#endif
