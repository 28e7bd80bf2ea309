#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "scissors/optics.hpp"

using namespace scissors;

namespace {

// Symmetric-splitter matrix element from the explicit photon-number
// expansion with the (-1)^k phase, written out independently.
double symmetric_element(int p, int q, int m, int n) {
  double sum = 0.0;
  for (int j = 0; j <= m; ++j) {
    const int k = p - j;
    if (k < 0 || k > n) continue;
    if (m + n - j - k != q) continue;
    sum += std::sqrt(factorial(j + k) * factorial(m + n - j - k) / (factorial(m) * factorial(n))) *
           binomial(m, j) * binomial(n, k) * ((k % 2) ? -1.0 : 1.0) *
           std::pow(2.0, -(n + m) / 2.0);
  }
  return sum;
}

}  // namespace

TEST_CASE("symmetric splitter matches the explicit matrix elements") {
  ModeLayout two(2, 6);
  const int d = two.dim_per_mode();
  Mat b = beam_splitter_matrix(BeamSplitterSpec(0, 1, 0.5), two);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      if (m + n > two.cutoff) continue;
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
          CHECK(b(p * d + q, m * d + n).real() ==
                doctest::Approx(symmetric_element(p, q, m, n)).epsilon(1e-12));
    }
}

TEST_CASE("single photon splits symmetrically") {
  ModeLayout two(2, 4);
  const int d = two.dim_per_mode();
  Mat b = beam_splitter_matrix(BeamSplitterSpec(0, 1, 0.5), two);
  const double s = 1.0 / std::sqrt(2.0);
  SUBCASE("B|1,0> = (|1,0> + |0,1>)/sqrt(2)") {
    CHECK(b(1 * d + 0, 1 * d + 0).real() == doctest::Approx(s));
    CHECK(b(0 * d + 1, 1 * d + 0).real() == doctest::Approx(s));
  }
  SUBCASE("B|0,1> = (|0,1> - |1,0>)/sqrt(2)") {
    CHECK(b(0 * d + 1, 0 * d + 1).real() == doctest::Approx(s));
    CHECK(b(1 * d + 0, 0 * d + 1).real() == doctest::Approx(-s));
  }
  SUBCASE("vacuum is invariant") { CHECK(b(0, 0).real() == doctest::Approx(1.0)); }
}

TEST_CASE("splitter blocks are unitary and photon-number conserving") {
  ModeLayout two(2, 8);
  const int d = two.dim_per_mode();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Mat b = beam_splitter_matrix(BeamSplitterSpec(0, 1, uni(rng)), two);
    // No coupling between different total photon numbers.
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q)
            if (p + q != m + n) CHECK(std::abs(b(p * d + q, m * d + n)) < 1e-15);
    // Unitary on every block that fits under the cutoff.
    Mat gram = b.adjoint() * b;
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        if (m + n > two.cutoff) continue;
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) {
            if (p + q > two.cutoff) continue;
            const double expected = (p == m && q == n) ? 1.0 : 0.0;
            CHECK(std::abs(gram(p * d + q, m * d + n) - expected) < 1e-12);
          }
      }
  }
}

TEST_CASE("beam_splitter_apply") {
  ModeLayout two(2, 6);
  SUBCASE("apply then inverse returns the original state") {
    std::mt19937_64 rng(41);
    // Restrict the random state to low photon numbers so nothing truncates.
    ModeLayout low(2, 2);
    DensityMatrix small = oracle::random_density(low, rng);
    Mat padded = Mat::Zero(two.dim(), two.dim());
    const int dl = low.dim_per_mode(), d = two.dim_per_mode();
    for (int i = 0; i < dl * dl; ++i)
      for (int j = 0; j < dl * dl; ++j)
        padded((i / dl) * d + (i % dl), (j / dl) * d + (j % dl)) = small.elements(i, j);
    DensityMatrix rho(two, padded);
    BeamSplitterSpec spec(0, 1, 0.3);
    DensityMatrix round = beam_splitter_apply(beam_splitter_apply(rho, spec), spec.inverse());
    CHECK((round.elements - rho.elements).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("trace preserved under the cutoff") {
    std::mt19937_64 rng(43);
    DensityMatrix rho = oracle::random_density(ModeLayout(2, 2), rng);
    Mat padded = Mat::Zero(two.dim(), two.dim());
    const int dl = 3, d = two.dim_per_mode();
    for (int i = 0; i < dl * dl; ++i)
      for (int j = 0; j < dl * dl; ++j)
        padded((i / dl) * d + (i % dl), (j / dl) * d + (j % dl)) = rho.elements(i, j);
    DensityMatrix out = beam_splitter_apply(DensityMatrix(two, padded), BeamSplitterSpec(0, 1, 0.5));
    CHECK(out.trace_real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("states leaking past the cutoff are rejected") {
    ModeLayout single(1, 6);
    DensityMatrix top = pure_density(fock_basis_state(6, single));
    DensityMatrix one = pure_density(fock_basis_state(1, single));
    CHECK_THROWS_AS(beam_splitter_apply(tensor(top, one), BeamSplitterSpec(0, 1, 0.5)),
                    std::invalid_argument);
  }
  SUBCASE("target mode out of range") {
    std::mt19937_64 rng(47);
    DensityMatrix rho = oracle::random_density(ModeLayout(2, 2), rng);
    CHECK_THROWS_AS(beam_splitter_apply(rho, BeamSplitterSpec(0, 2, 0.5)),
                    std::invalid_argument);
  }
}

TEST_CASE("pure-state splitter agrees with the dense conjugation") {
  ModeLayout two(2, 5);
  Vec v = Vec::Zero(two.dim());
  v(two.index_of({1, 0})) = 0.6;
  v(two.index_of({0, 1})) = complexd(0.0, 0.8);
  FockState psi(two, v);
  BeamSplitterSpec spec(0, 1, 0.37);
  FockState out = beam_splitter_apply(psi, spec);
  DensityMatrix dense = beam_splitter_apply(pure_density(psi), spec);
  CHECK((pure_density(out).elements - dense.elements).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("heralded photon mixture") {
  ModeLayout single(1, 4);
  SUBCASE("eta = 1 and eta = 0 limits") {
    CHECK(prepare_heralded_photon(SourceSpec(1.0), single).elements(1, 1).real() ==
          doctest::Approx(1.0));
    CHECK(prepare_heralded_photon(SourceSpec(0.0), single).elements(0, 0).real() ==
          doctest::Approx(1.0));
  }
  SUBCASE("fitted efficiency 0.9") {
    DensityMatrix rho = prepare_heralded_photon(SourceSpec(0.9), single);
    CHECK(rho.elements(0, 0).real() == doctest::Approx(0.1));
    CHECK(rho.elements(1, 1).real() == doctest::Approx(0.9));
    for (int n = 2; n <= 4; ++n) CHECK(std::abs(rho.elements(n, n)) == 0.0);
  }
  SUBCASE("range check") { CHECK_THROWS_AS(SourceSpec(1.2), std::invalid_argument); }
}

TEST_CASE("EPR resource") {
  ModeLayout two(2, 4);
  SUBCASE("perfect preparation gives the delocalized photon") {
    DensityMatrix epr = make_epr(SourceSpec(1.0), two);
    const auto i10 = two.index_of({1, 0});
    const auto i01 = two.index_of({0, 1});
    CHECK(epr.elements(i10, i10).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(epr.elements(i01, i01).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(epr.elements(i10, i01)) == doctest::Approx(0.5).epsilon(1e-12));
    for (int mode : {0, 1}) {
      DensityMatrix red = partial_trace(epr, {mode});
      CHECK(red.elements(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(red.elements(1, 1).real() == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  SUBCASE("zero efficiency gives the two-mode vacuum") {
    DensityMatrix epr = make_epr(SourceSpec(0.0), two);
    CHECK(epr.elements(0, 0).real() == doctest::Approx(1.0));
  }
  SUBCASE("trace one and reduced diagonals for intermediate efficiency") {
    for (double eta : {0.25, 0.6, 0.9}) {
      DensityMatrix epr = make_epr(SourceSpec(eta), two);
      CHECK(epr.trace_real() == doctest::Approx(1.0).epsilon(1e-12));
      for (int mode : {0, 1}) {
        DensityMatrix red = partial_trace(epr, {mode});
        CHECK(red.elements(0, 0).real() == doctest::Approx(1.0 - eta / 2).epsilon(1e-12));
        CHECK(red.elements(1, 1).real() == doctest::Approx(eta / 2).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("loss channel") {
  ModeLayout single(1, 6);
  std::mt19937_64 rng(53);
  SUBCASE("eta = 1 is the identity") {
    DensityMatrix rho = oracle::random_density(single, rng);
    CHECK((loss_channel(rho, 1.0, 0).elements - rho.elements).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("half loss on a single photon") {
    DensityMatrix out = loss_channel(pure_density(fock_basis_state(1, single)), 0.5, 0);
    CHECK(out.elements(0, 0).real() == doctest::Approx(0.5));
    CHECK(out.elements(1, 1).real() == doctest::Approx(0.5));
  }
  SUBCASE("composition law loss(eta1) o loss(eta2) = loss(eta1 eta2)") {
    for (int trial = 0; trial < 10; ++trial) {
      DensityMatrix rho = oracle::random_density(single, rng);
      DensityMatrix chained = loss_channel(loss_channel(rho, 0.8, 0), 0.6, 0);
      DensityMatrix direct = loss_channel(rho, 0.48, 0);
      CHECK((chained.elements - direct.elements).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("trace preserved and positivity kept on random states") {
    for (int trial = 0; trial < 10; ++trial) {
      DensityMatrix rho = oracle::random_density(single, rng);
      DensityMatrix out = loss_channel(rho, 0.37, 0);
      CHECK(out.trace_real() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(out.min_eigenvalue() > -1e-10);
    }
  }
  SUBCASE("matches the ancilla-splitter construction") {
    ModeLayout small(1, 3);
    for (int trial = 0; trial < 5; ++trial) {
      DensityMatrix rho = oracle::random_density(small, rng);
      DensityMatrix closed = loss_channel(rho, 0.54, 0);
      DensityMatrix ancilla = oracle::ancilla_loss(rho, 0.54, 0);
      CHECK((closed.elements - ancilla.elements).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  SUBCASE("eta out of range rejected") {
    DensityMatrix rho = oracle::random_density(single, rng);
    CHECK_THROWS_AS(loss_channel(rho, 1.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(loss_channel(rho, -0.1, 0), std::invalid_argument);
  }
}
