#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "scissors/detection.hpp"
#include "scissors/protocol.hpp"

using namespace scissors;

TEST_CASE("click and no-click POVMs") {
  ModeLayout single(1, 6);
  SUBCASE("perfect detector") {
    DetectorSpec det(1.0, false);
    Eigen::VectorXd nc = povm_no_click(det, single);
    CHECK(nc(0) == 1.0);
    for (int n = 1; n <= 6; ++n) CHECK(nc(n) == 0.0);
    Eigen::VectorXd c = povm_click(det, single);
    CHECK(c(0) == 0.0);
    for (int n = 1; n <= 6; ++n) CHECK(c(n) == 1.0);
  }
  SUBCASE("blind detector never clicks") {
    DetectorSpec det(0.0, false);
    CHECK((povm_no_click(det, single) - Eigen::VectorXd::Ones(7)).norm() == 0.0);
    CHECK(povm_click(det, single).norm() == 0.0);
  }
  SUBCASE("half-efficiency entries at n = 2") {
    DetectorSpec det(0.5, false);
    CHECK(povm_no_click(det, single)(2) == doctest::Approx(0.25));
    CHECK(povm_click(det, single)(2) == doctest::Approx(0.75));
  }
  SUBCASE("vacuum never clicks at any efficiency") {
    for (double eta : {0.1, 0.5, 0.9}) CHECK(povm_click(DetectorSpec(eta, false), single)(0) == 0.0);
  }
  SUBCASE("completeness is exact") {
    for (double eta : {0.0, 0.3, 0.77, 1.0}) {
      DetectorSpec det(eta, false);
      Eigen::VectorXd sum = povm_click(det, single) + povm_no_click(det, single);
      CHECK((sum - Eigen::VectorXd::Ones(7)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("discriminating spec rejected") {
    CHECK_THROWS_AS(povm_no_click(DetectorSpec(1.0, true), single), std::invalid_argument);
  }
}

TEST_CASE("exact-number projectors") {
  ModeLayout single(1, 5);
  CHECK(projector_exactly_n(0, single)(0) == 1.0);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(single.dim());
  for (int n = 0; n <= 5; ++n) sum += projector_exactly_n(n, single);
  CHECK((sum - Eigen::VectorXd::Ones(6)).norm() == 0.0);
  CHECK_THROWS_AS(projector_exactly_n(6, single), std::invalid_argument);
  CHECK_THROWS_AS(projector_exactly_n(-1, single), std::invalid_argument);
}

TEST_CASE("conditional Bell collapse") {
  SimOptions opts;
  opts.cutoff = 8;
  SUBCASE("vacuum source, perfect photon and detectors: p_tel = 1/4, vacuum out") {
    ProtocolParams p;
    p.alpha = 0.0;
    p.eta_one = 1.0;
    p.eta_spd = 1.0;
    DetectorSpec det(1.0, false);
    ConditionResult r = oracle::dense_quantum_pipeline(p, det, det, opts);
    CHECK(r.p_tel == doctest::Approx(0.25).epsilon(1e-12));
    DensityMatrix out = r.rho_out.normalized();
    CHECK(out.elements(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("ideal discriminating detectors reproduce the truncated-state fidelity") {
    ProtocolParams p;
    p.alpha = 0.6;
    p.eta_one = 1.0;
    DetectorSpec det(1.0, true);
    SimOptions loose = opts;
    loose.coherent_tail_bound = 1e-8;
    loose.bs_tail_bound = 1e-6;
    ConditionResult r = oracle::dense_quantum_pipeline(p, det, det, loose);
    DensityMatrix out = r.rho_out.normalized();
    ModeLayout single(1, opts.cutoff);
    FockState target = coherent_state(p.alpha, single, 1e-6).state;
    const double a2 = std::norm(p.alpha);
    CHECK(fidelity_pure(out, target) ==
          doctest::Approx(std::exp(-a2) * (1.0 + a2)).epsilon(1e-9));
  }
  SUBCASE("blind heralding detector never heralds") {
    ProtocolParams p;
    p.alpha = 0.5;
    p.eta_one = 0.9;
    DetectorSpec blind(0.0, false);
    DetectorSpec det(0.5, false);
    CHECK_THROWS_AS(oracle::dense_quantum_pipeline(p, blind, det, opts), NumericalError);
  }
  SUBCASE("output is Hermitian and near-positive over a parameter grid") {
    SimOptions loose = opts;  // alpha up to 1 at this small cutoff
    loose.coherent_tail_bound = 1e-5;
    loose.bs_tail_bound = 1e-4;
    for (double a = 0.0; a <= 1.01; a += 0.25) {
      for (double eta = 0.25; eta <= 1.01; eta += 0.25) {
        ProtocolParams p;
        p.alpha = a;
        p.eta_one = 0.9;
        DetectorSpec det(eta, false);
        ConditionResult r;
        try {
          r = oracle::dense_quantum_pipeline(p, det, det, loose);
        } catch (const NumericalError&) {
          continue;
        }
        CHECK(r.p_tel >= 0.0);
        CHECK(r.p_tel <= 1.0);
        CHECK(r.rho_out.is_hermitian(1e-12));
        CHECK(r.rho_out.normalized().min_eigenvalue() > -1e-10);
      }
    }
  }
  SUBCASE("scissors truncation with discriminating detectors") {
    ProtocolParams p;
    p.alpha = 0.8;
    p.eta_one = 1.0;
    DetectorSpec det(1.0, true);
    SimOptions loose = opts;
    loose.coherent_tail_bound = 1e-6;
    loose.bs_tail_bound = 1e-5;
    ConditionResult r = oracle::dense_quantum_pipeline(p, det, det, loose);
    DensityMatrix out = r.rho_out.normalized();
    for (int n = 2; n <= opts.cutoff; ++n) CHECK(out.elements(n, n).real() < 1e-12);
  }
  SUBCASE("opposite detector assignment flips the coherence sign") {
    // With D1 and D2 exchanged (realized by swapping Alice's two output
    // modes) the ideal conditioned state is a0|0> - a1|1>; the default
    // assignment needs no corrective phase from Bob, this one would.
    ProtocolParams p;
    p.alpha = 0.6;
    p.eta_one = 1.0;
    ModeLayout single(1, opts.cutoff);
    ModeLayout two(2, opts.cutoff);
    ModeLayout three(3, opts.cutoff);
    DensityMatrix source = pure_density(coherent_state(p.alpha, single, 1e-8).state);
    DensityMatrix rho123 = tensor(source, make_epr(SourceSpec(1.0), two));
    rho123 = beam_splitter_apply(rho123, BeamSplitterSpec(0, 1, 0.5), 1e-6);
    Mat swapped = Mat::Zero(three.dim(), three.dim());
    for (Eigen::Index i = 0; i < three.dim(); ++i)
      for (Eigen::Index j = 0; j < three.dim(); ++j) {
        auto oi = three.occupation_of(i), oj = three.occupation_of(j);
        std::swap(oi[0], oi[1]);
        std::swap(oj[0], oj[1]);
        swapped(three.index_of(oi), three.index_of(oj)) = rho123.elements(i, j);
      }
    DetectorSpec det(1.0, true);
    ConditionResult r = condition_on_bell(DensityMatrix(three, swapped), det, det);
    DensityMatrix out = r.rho_out.normalized();
    FockState coh = coherent_state(p.alpha, single, 1e-8).state;
    Vec minus = Vec::Zero(single.dim());
    minus(0) = coh.amplitudes(0);
    minus(1) = -coh.amplitudes(1);
    CHECK(fidelity_pure(out, FockState(single, minus).normalized()) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(out.elements(0, 1).real() < 0.0);
  }
  SUBCASE("pure-branch collapse matches the dense route") {
    ProtocolParams p;
    p.alpha = complexd(0.4, 0.2);
    p.eta_one = 0.8;
    p.eta_spd = 0.6;
    DetectorSpec det(p.eta_spd, false);
    ConditionResult dense = oracle::dense_quantum_pipeline(p, det, det, opts);
    BranchResult fast = quantum_branch(p, opts);
    CHECK(fast.probability == doctest::Approx(dense.p_tel).epsilon(1e-10));
    DensityMatrix dn = dense.rho_out.normalized();
    CHECK((fast.rho.elements - dn.elements).cwiseAbs().maxCoeff() < 1e-10);
  }
}
