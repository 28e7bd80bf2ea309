#include "scissors/fock_core.hpp"

#include <algorithm>
#include <cmath>

namespace scissors {

ModeLayout::ModeLayout(int modes, int n_max) : mode_count(modes), cutoff(n_max) {
  if (modes < 1) throw std::invalid_argument("ModeLayout: mode_count must be positive");
  if (n_max < 1) throw std::invalid_argument("ModeLayout: cutoff must be positive");
}

Eigen::Index ModeLayout::dim() const {
  Eigen::Index d = 1;
  for (int i = 0; i < mode_count; ++i) d *= dim_per_mode();
  return d;
}

Eigen::Index ModeLayout::index_of(const std::vector<int>& occupation) const {
  if (static_cast<int>(occupation.size()) != mode_count)
    throw std::invalid_argument("index_of: occupation size != mode_count");
  Eigen::Index idx = 0;
  for (int n : occupation) {
    if (n < 0 || n > cutoff) throw std::invalid_argument("index_of: occupation out of range");
    idx = idx * dim_per_mode() + n;
  }
  return idx;
}

std::vector<int> ModeLayout::occupation_of(Eigen::Index index) const {
  std::vector<int> occ(mode_count);
  for (int m = mode_count - 1; m >= 0; --m) {
    occ[m] = static_cast<int>(index % dim_per_mode());
    index /= dim_per_mode();
  }
  return occ;
}

FockState::FockState(ModeLayout l, Vec amps) : layout(l), amplitudes(std::move(amps)) {
  if (amplitudes.size() != layout.dim())
    throw std::invalid_argument("FockState: amplitude vector does not match layout dimension");
}

FockState FockState::normalized() const {
  double n2 = norm_squared();
  if (n2 <= 0.0) throw std::invalid_argument("FockState::normalized: zero state");
  return FockState(layout, amplitudes / std::sqrt(n2));
}

DensityMatrix::DensityMatrix(ModeLayout l, Mat m) : layout(l), elements(std::move(m)) {
  if (elements.rows() != layout.dim() || elements.cols() != layout.dim())
    throw std::invalid_argument("DensityMatrix: matrix does not match layout dimension");
}

DensityMatrix DensityMatrix::normalized() const {
  double tr = trace_real();
  if (std::abs(tr) < 1e-300)
    throw std::invalid_argument("DensityMatrix::normalized: zero trace");
  return DensityMatrix(layout, elements / tr);
}

DensityMatrix DensityMatrix::hermitized() const {
  return DensityMatrix(layout, 0.5 * (elements + elements.adjoint().eval()));
}

bool DensityMatrix::is_hermitian(double tol) const {
  return (elements - elements.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (elements + elements.adjoint().eval()));
  return es.eigenvalues().minCoeff();
}

FockState fock_basis_state(int n, const ModeLayout& layout) {
  if (n < 0 || n > layout.cutoff) throw std::invalid_argument("fock_basis_state: n out of range");
  Vec v = Vec::Zero(layout.dim());
  if (layout.mode_count != 1)
    throw std::invalid_argument("fock_basis_state: single-mode layout required");
  v(n) = 1.0;
  return FockState(layout, std::move(v));
}

DensityMatrix pure_density(const FockState& psi) {
  return DensityMatrix(psi.layout, psi.amplitudes * psi.amplitudes.adjoint());
}

double factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 1.0;
    for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  if (n <= 170) return table[n];
  return std::exp(std::lgamma(n + 1.0));
}

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  return std::lgamma(n + 1.0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= 170) return factorial(n) / (factorial(k) * factorial(n - k));
  return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

double coherent_tail_mass(complexd alpha, int cutoff) {
  const double lambda = std::norm(alpha);
  if (lambda == 0.0) return 0.0;
  // head = sum_{n<=cutoff} e^{-lambda} lambda^n / n!, accumulated in log space
  // term-by-term to stay accurate for large lambda.
  double head = 0.0;
  double log_term = -lambda;  // n = 0
  for (int n = 0; n <= cutoff; ++n) {
    head += std::exp(log_term);
    log_term += std::log(lambda) - std::log(n + 1.0);
  }
  return std::max(0.0, 1.0 - head);
}

CoherentResult coherent_state(complexd alpha, const ModeLayout& layout, double tail_bound) {
  if (layout.mode_count != 1)
    throw std::invalid_argument("coherent_state: single-mode layout required");
  const double tail = coherent_tail_mass(alpha, layout.cutoff);
  if (tail > tail_bound)
    throw std::invalid_argument("coherent_state: truncation tail mass " + std::to_string(tail) +
                                " exceeds bound at cutoff " + std::to_string(layout.cutoff));
  Vec v(layout.dim());
  complexd term = std::exp(complexd(-std::norm(alpha) / 2.0, 0.0));  // a_0
  for (int n = 0; n <= layout.cutoff; ++n) {
    v(n) = term;
    term *= alpha / std::sqrt(n + 1.0);
  }
  return {FockState(layout, std::move(v)), tail};
}

FockState tensor(const FockState& a, const FockState& b) {
  if (a.layout.cutoff != b.layout.cutoff)
    throw std::invalid_argument("tensor: cutoff mismatch");
  ModeLayout out(a.layout.mode_count + b.layout.mode_count, a.layout.cutoff);
  Vec v(out.dim());
  const Eigen::Index db = b.layout.dim();
  for (Eigen::Index i = 0; i < a.layout.dim(); ++i)
    v.segment(i * db, db) = a.amplitudes(i) * b.amplitudes;
  return FockState(out, std::move(v));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.layout.cutoff != b.layout.cutoff)
    throw std::invalid_argument("tensor: cutoff mismatch");
  ModeLayout out(a.layout.mode_count + b.layout.mode_count, a.layout.cutoff);
  Mat m(out.dim(), out.dim());
  const Eigen::Index db = b.layout.dim();
  for (Eigen::Index i = 0; i < a.layout.dim(); ++i)
    for (Eigen::Index j = 0; j < a.layout.dim(); ++j)
      m.block(i * db, j * db, db, db) = a.elements(i, j) * b.elements;
  return DensityMatrix(out, std::move(m));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw std::invalid_argument("partial_trace: duplicate mode index");
  for (int k : kept)
    if (k < 0 || k >= rho.layout.mode_count)
      throw std::invalid_argument("partial_trace: mode index out of range");

  const int modes = rho.layout.mode_count;
  const int d = rho.layout.dim_per_mode();
  std::vector<int> traced;
  for (int m = 0; m < modes; ++m)
    if (!std::binary_search(kept.begin(), kept.end(), m)) traced.push_back(m);

  ModeLayout out_layout(static_cast<int>(kept.size()), rho.layout.cutoff);
  Mat out = Mat::Zero(out_layout.dim(), out_layout.dim());

  // Strides of each mode in the flat index (mode 0 slowest).
  std::vector<Eigen::Index> stride(modes, 1);
  for (int m = modes - 2; m >= 0; --m) stride[m] = stride[m + 1] * d;

  Eigen::Index traced_dim = 1;
  for (size_t i = 0; i < traced.size(); ++i) traced_dim *= d;

  std::vector<int> occ_kept(kept.size()), occ_kept2(kept.size()), occ_traced(traced.size());
  for (Eigen::Index ik = 0; ik < out_layout.dim(); ++ik) {
    {
      Eigen::Index t = ik;
      for (int m = static_cast<int>(kept.size()) - 1; m >= 0; --m) {
        occ_kept[m] = static_cast<int>(t % d);
        t /= d;
      }
    }
    for (Eigen::Index jk = 0; jk < out_layout.dim(); ++jk) {
      Eigen::Index t = jk;
      for (int m = static_cast<int>(kept.size()) - 1; m >= 0; --m) {
        occ_kept2[m] = static_cast<int>(t % d);
        t /= d;
      }
      complexd sum = 0.0;
      for (Eigen::Index it = 0; it < traced_dim; ++it) {
        Eigen::Index t2 = it;
        for (int m = static_cast<int>(traced.size()) - 1; m >= 0; --m) {
          occ_traced[m] = static_cast<int>(t2 % d);
          t2 /= d;
        }
        Eigen::Index row = 0, col = 0;
        for (size_t m = 0; m < kept.size(); ++m) {
          row += occ_kept[m] * stride[kept[m]];
          col += occ_kept2[m] * stride[kept[m]];
        }
        for (size_t m = 0; m < traced.size(); ++m) {
          row += occ_traced[m] * stride[traced[m]];
          col += occ_traced[m] * stride[traced[m]];
        }
        sum += rho.elements(row, col);
      }
      out(ik, jk) = sum;
    }
  }
  return DensityMatrix(out_layout, std::move(out));
}

double fidelity_pure(const DensityMatrix& rho, const FockState& psi, double trace_tol) {
  if (!(rho.layout == psi.layout))
    throw std::invalid_argument("fidelity_pure: layout mismatch");
  if (std::abs(rho.trace_real() - 1.0) > trace_tol)
    throw std::invalid_argument("fidelity_pure: rho is not normalized");
  complexd val = (psi.amplitudes.adjoint() * rho.elements * psi.amplitudes)(0, 0);
  return val.real();
}

double fidelity_mixed(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.layout == sigma.layout))
    throw std::invalid_argument("fidelity_mixed: layout mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho.elements + rho.elements.adjoint().eval()));
  Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
  Mat sqrt_rho = es.eigenvectors() * evals.cwiseSqrt().asDiagonal() *
                 es.eigenvectors().adjoint();
  Mat inner = sqrt_rho * sigma.elements * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Mat> es2(0.5 * (inner + inner.adjoint().eval()));
  double tr = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

}  // namespace scissors
