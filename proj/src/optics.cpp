#include "scissors/optics.hpp"

#include <cmath>
#include <tuple>

namespace scissors {

namespace {

struct PairEmbedding {
  Eigen::Index stride_a = 0;
  Eigen::Index stride_b = 0;
  std::vector<Eigen::Index> other_bases;  // flat offsets of all non-target-mode configs
};

PairEmbedding make_pair_embedding(const ModeLayout& layout, int mode_a, int mode_b) {
  const int modes = layout.mode_count;
  const int d = layout.dim_per_mode();
  if (mode_a < 0 || mode_a >= modes || mode_b < 0 || mode_b >= modes)
    throw std::invalid_argument("beam splitter: target mode out of range");

  std::vector<Eigen::Index> stride(modes, 1);
  for (int m = modes - 2; m >= 0; --m) stride[m] = stride[m + 1] * d;

  PairEmbedding e;
  e.stride_a = stride[mode_a];
  e.stride_b = stride[mode_b];

  std::vector<int> others;
  for (int m = 0; m < modes; ++m)
    if (m != mode_a && m != mode_b) others.push_back(m);
  Eigen::Index count = 1;
  for (size_t i = 0; i < others.size(); ++i) count *= d;
  e.other_bases.reserve(count);
  for (Eigen::Index t = 0; t < count; ++t) {
    Eigen::Index base = 0, rem = t;
    for (int m = static_cast<int>(others.size()) - 1; m >= 0; --m) {
      base += (rem % d) * stride[others[m]];
      rem /= d;
    }
    e.other_bases.push_back(base);
  }
  return e;
}

struct Triplet {
  int out_pair;  // p_a * d + p_b
  int in_pair;
  complexd value;
};

std::vector<Triplet> splitter_triplets(const BeamSplitterSpec& spec, int cutoff) {
  const int d = cutoff + 1;
  const double t = std::sqrt(spec.transmissivity);
  const double r = std::sqrt(1.0 - spec.transmissivity);
  Mat b = Mat::Zero(d * d, d * d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      for (int j = 0; j <= m; ++j) {
        for (int k = 0; k <= n; ++k) {
          const int p = j + k;
          const int q = m + n - j - k;
          if (p > cutoff || q > cutoff) continue;
          double amp = binomial(m, j) * binomial(n, k) * std::pow(t, j + n - k) *
                       std::pow(r, m - j) * std::pow(-r, k) *
                       std::sqrt(factorial(p) * factorial(q) / (factorial(m) * factorial(n)));
          b(p * d + q, m * d + n) += amp;
        }
      }
    }
  }
  std::vector<Triplet> out;
  for (int cin = 0; cin < d * d; ++cin)
    for (int cout = 0; cout < d * d; ++cout)
      if (b(cout, cin) != complexd(0.0))
        out.push_back({cout, cin, b(cout, cin)});
  return out;
}

double pair_tail_mass(const DensityMatrix& rho, const PairEmbedding& e, int cutoff) {
  const int d = cutoff + 1;
  double mass = 0.0;
  for (int na = 0; na < d; ++na)
    for (int nb = 0; nb < d; ++nb) {
      if (na + nb <= cutoff) continue;
      for (Eigen::Index base : e.other_bases)
        mass += rho.elements(base + na * e.stride_a + nb * e.stride_b,
                             base + na * e.stride_a + nb * e.stride_b)
                    .real();
    }
  return mass;
}

double pair_tail_mass(const FockState& psi, const PairEmbedding& e, int cutoff) {
  const int d = cutoff + 1;
  double mass = 0.0;
  for (int na = 0; na < d; ++na)
    for (int nb = 0; nb < d; ++nb) {
      if (na + nb <= cutoff) continue;
      for (Eigen::Index base : e.other_bases)
        mass += std::norm(psi.amplitudes(base + na * e.stride_a + nb * e.stride_b));
    }
  return mass;
}

}  // namespace

BeamSplitterSpec::BeamSplitterSpec(int a, int b, double t)
    : mode_a(a), mode_b(b), transmissivity(t) {
  if (a == b) throw std::invalid_argument("BeamSplitterSpec: modes must differ");
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("BeamSplitterSpec: transmissivity outside [0,1]");
}

BeamSplitterSpec BeamSplitterSpec::inverse() const {
  // B(t)^dag swaps the roles of the two modes.
  return BeamSplitterSpec(mode_b, mode_a, transmissivity);
}

SourceSpec::SourceSpec(double eta) : eta_one(eta) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("SourceSpec: eta outside [0,1]");
}

Mat beam_splitter_matrix(const BeamSplitterSpec& spec, const ModeLayout& layout) {
  if (layout.mode_count != 2)
    throw std::invalid_argument("beam_splitter_matrix: two-mode layout required");
  const int d = layout.dim_per_mode();
  Mat b = Mat::Zero(d * d, d * d);
  for (const Triplet& t : splitter_triplets(spec, layout.cutoff))
    b(t.out_pair, t.in_pair) = t.value;
  return b;
}

DensityMatrix beam_splitter_apply(const DensityMatrix& rho, const BeamSplitterSpec& spec,
                                  double tail_bound) {
  PairEmbedding e = make_pair_embedding(rho.layout, spec.mode_a, spec.mode_b);
  const double tail = pair_tail_mass(rho, e, rho.layout.cutoff);
  if (tail > tail_bound)
    throw std::invalid_argument(
        "beam_splitter_apply: state mass " + std::to_string(tail) +
        " beyond the cutoff would be truncated");
  const int d = rho.layout.dim_per_mode();
  const auto triplets = splitter_triplets(spec, rho.layout.cutoff);
  const Eigen::Index dim = rho.layout.dim();

  auto pair_offset = [&](int pair) {
    return (pair / d) * e.stride_a + (pair % d) * e.stride_b;
  };

  Mat tmp = Mat::Zero(dim, dim);
  for (const Triplet& t : triplets) {
    const Eigen::Index off_out = pair_offset(t.out_pair);
    const Eigen::Index off_in = pair_offset(t.in_pair);
    for (Eigen::Index base : e.other_bases)
      tmp.row(base + off_out) += t.value * rho.elements.row(base + off_in);
  }
  Mat out = Mat::Zero(dim, dim);
  for (const Triplet& t : triplets) {
    const Eigen::Index off_out = pair_offset(t.out_pair);
    const Eigen::Index off_in = pair_offset(t.in_pair);
    for (Eigen::Index base : e.other_bases)
      out.col(base + off_out) += std::conj(t.value) * tmp.col(base + off_in);
  }
  return DensityMatrix(rho.layout, std::move(out));
}

FockState beam_splitter_apply(const FockState& psi, const BeamSplitterSpec& spec,
                              double tail_bound) {
  PairEmbedding e = make_pair_embedding(psi.layout, spec.mode_a, spec.mode_b);
  const double tail = pair_tail_mass(psi, e, psi.layout.cutoff);
  if (tail > tail_bound)
    throw std::invalid_argument(
        "beam_splitter_apply: state mass " + std::to_string(tail) +
        " beyond the cutoff would be truncated");
  const int d = psi.layout.dim_per_mode();
  auto pair_offset = [&](int pair) {
    return (pair / d) * e.stride_a + (pair % d) * e.stride_b;
  };
  Vec out = Vec::Zero(psi.layout.dim());
  for (const Triplet& t : splitter_triplets(spec, psi.layout.cutoff)) {
    const Eigen::Index off_out = pair_offset(t.out_pair);
    const Eigen::Index off_in = pair_offset(t.in_pair);
    for (Eigen::Index base : e.other_bases)
      out(base + off_out) += t.value * psi.amplitudes(base + off_in);
  }
  return FockState(psi.layout, std::move(out));
}

DensityMatrix prepare_heralded_photon(const SourceSpec& spec, const ModeLayout& layout) {
  if (layout.mode_count != 1)
    throw std::invalid_argument("prepare_heralded_photon: single-mode layout required");
  Mat m = Mat::Zero(layout.dim(), layout.dim());
  m(0, 0) = 1.0 - spec.eta_one;
  m(1, 1) = spec.eta_one;
  return DensityMatrix(layout, std::move(m));
}

DensityMatrix make_epr(const SourceSpec& spec, const ModeLayout& layout) {
  if (layout.mode_count != 2)
    throw std::invalid_argument("make_epr: two-mode layout required");
  ModeLayout single(1, layout.cutoff);
  DensityMatrix vac = pure_density(fock_basis_state(0, single));
  DensityMatrix in = tensor(vac, prepare_heralded_photon(spec, single));
  return beam_splitter_apply(in, BeamSplitterSpec(0, 1, 0.5));
}

DensityMatrix loss_channel(const DensityMatrix& rho, double eta, int mode) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("loss_channel: eta outside [0,1]");
  const int modes = rho.layout.mode_count;
  const int d = rho.layout.dim_per_mode();
  if (mode < 0 || mode >= modes) throw std::invalid_argument("loss_channel: mode out of range");

  std::vector<Eigen::Index> stride(modes, 1);
  for (int m = modes - 2; m >= 0; --m) stride[m] = stride[m + 1] * d;
  const Eigen::Index s = stride[mode];

  std::vector<Eigen::Index> bases;
  {
    std::vector<int> others;
    for (int m = 0; m < modes; ++m)
      if (m != mode) others.push_back(m);
    Eigen::Index count = 1;
    for (size_t i = 0; i < others.size(); ++i) count *= d;
    for (Eigen::Index t = 0; t < count; ++t) {
      Eigen::Index base = 0, rem = t;
      for (int m = static_cast<int>(others.size()) - 1; m >= 0; --m) {
        base += (rem % d) * stride[others[m]];
        rem /= d;
      }
      bases.push_back(base);
    }
  }

  Mat out = Mat::Zero(rho.layout.dim(), rho.layout.dim());
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      for (int k = 0; m + k < d && n + k < d; ++k) {
        const double coef = std::sqrt(binomial(m + k, k) * binomial(n + k, k)) *
                            std::pow(eta, 0.5 * (m + n)) * std::pow(1.0 - eta, k);
        if (coef == 0.0) continue;
        for (Eigen::Index br : bases)
          for (Eigen::Index bc : bases)
            out(br + m * s, bc + n * s) += coef * rho.elements(br + (m + k) * s, bc + (n + k) * s);
      }
    }
  }
  return DensityMatrix(rho.layout, std::move(out));
}

}  // namespace scissors
