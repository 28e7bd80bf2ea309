#include "scissors/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace scissors {

namespace {

constexpr double kPi = std::numbers::pi;

void require_single_mode(const DensityMatrix& rho, const char* where) {
  if (rho.layout.mode_count != 1)
    throw std::invalid_argument(std::string(where) + ": single-mode input required");
}

complexd expectation_a(const DensityMatrix& rho) {
  complexd sum = 0.0;
  for (int n = 1; n <= rho.layout.cutoff; ++n)
    sum += std::sqrt(static_cast<double>(n)) * rho.elements(n, n - 1);
  return sum;
}

complexd expectation_aa(const DensityMatrix& rho) {
  complexd sum = 0.0;
  for (int n = 2; n <= rho.layout.cutoff; ++n)
    sum += std::sqrt(n * (n - 1.0)) * rho.elements(n, n - 2);
  return sum;
}

double expectation_number(const DensityMatrix& rho) {
  double sum = 0.0;
  for (int n = 1; n <= rho.layout.cutoff; ++n) sum += n * rho.elements(n, n).real();
  return sum;
}

}  // namespace

void QuadratureDataset::write(std::ostream& os) const {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "# seed=%llu convention=%s\n",
                static_cast<unsigned long long>(source_seed), convention);
  os << buf;
  for (const QuadratureSample& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.15g,%.15g\n", s.theta, s.x);
    os << buf;
  }
}

QuadratureDataset QuadratureDataset::read(std::istream& is) {
  QuadratureDataset d;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos)
        d.source_seed = std::strtoull(line.c_str() + pos + 5, nullptr, 10);
      continue;
    }
    QuadratureSample s;
    if (std::sscanf(line.c_str(), "%lf,%lf", &s.theta, &s.x) != 2)
      throw std::invalid_argument("QuadratureDataset: malformed line: " + line);
    if (!std::isfinite(s.theta) || !std::isfinite(s.x))
      throw std::invalid_argument("QuadratureDataset: non-finite sample");
    d.samples.push_back(s);
  }
  return d;
}

std::vector<double> oscillator_wavefunctions(int n_max, double x) {
  std::vector<double> psi(n_max + 1);
  psi[0] = std::pow(kPi, -0.25) * std::exp(-x * x / 2.0);
  if (n_max >= 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 1; n < n_max; ++n)
    psi[n + 1] = std::sqrt(2.0 / (n + 1.0)) * x * psi[n] -
                 std::sqrt(n / (n + 1.0)) * psi[n - 1];
  return psi;
}

double quadrature_pdf(const DensityMatrix& rho, double theta, double x) {
  require_single_mode(rho, "quadrature_pdf");
  const int d = rho.layout.dim_per_mode();
  const std::vector<double> psi = oscillator_wavefunctions(rho.layout.cutoff, x);
  Vec c(d);
  for (int n = 0; n < d; ++n) c(n) = psi[n] * std::polar(1.0, n * theta);
  return ((c.adjoint() * rho.elements * c)(0, 0)).real();
}

double mean_quadrature(const DensityMatrix& rho, double theta) {
  require_single_mode(rho, "mean_quadrature");
  return std::sqrt(2.0) * (std::polar(1.0, -theta) * expectation_a(rho)).real();
}

double variance_quadrature(const DensityMatrix& rho, double theta) {
  require_single_mode(rho, "variance_quadrature");
  const double mean = mean_quadrature(rho, theta);
  const double x2 = (std::polar(1.0, -2.0 * theta) * expectation_aa(rho)).real() +
                    expectation_number(rho) + 0.5;
  return x2 - mean * mean;
}

QuadratureDataset sample_quadratures(const DensityMatrix& rho,
                                     const std::vector<double>& theta_schedule,
                                     int n_per_theta, std::uint64_t seed) {
  require_single_mode(rho, "sample_quadratures");
  if (n_per_theta <= 0)
    throw std::invalid_argument("sample_quadratures: n_per_theta must be positive");
  if (theta_schedule.empty())
    throw std::invalid_argument("sample_quadratures: empty theta schedule");

  constexpr double x_max = 7.0;
  constexpr double step = 1e-3;
  const int points = static_cast<int>(std::lround(2.0 * x_max / step)) + 1;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  QuadratureDataset out;
  out.source_seed = seed;
  out.samples.reserve(theta_schedule.size() * static_cast<size_t>(n_per_theta));

  std::vector<double> cdf(points);
  for (double theta_raw : theta_schedule) {
    double theta = std::fmod(theta_raw, 2.0 * kPi);
    if (theta < 0.0) theta += 2.0 * kPi;

    double acc = 0.0;
    double prev = std::max(0.0, quadrature_pdf(rho, theta, -x_max));
    cdf[0] = 0.0;
    for (int i = 1; i < points; ++i) {
      const double cur = std::max(0.0, quadrature_pdf(rho, theta, -x_max + i * step));
      acc += 0.5 * (prev + cur) * step;
      cdf[i] = acc;
      prev = cur;
    }
    const double total = cdf[points - 1];
    if (total <= 0.0)
      throw NumericalError("sample_quadratures: degenerate quadrature distribution");

    for (int k = 0; k < n_per_theta; ++k) {
      const double u = uni(rng) * total;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      int hi = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), points - 1));
      if (hi == 0) hi = 1;
      const double c0 = cdf[hi - 1], c1 = cdf[hi];
      const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
      out.samples.push_back({theta, -x_max + (hi - 1 + frac) * step});
    }
  }
  return out;
}

PatternTable::PatternTable(int cutoff, double x_max, double step)
    : cutoff_(cutoff), x_max_(x_max), step_(step) {
  if (cutoff < 0) throw std::invalid_argument("PatternTable: negative cutoff");
  points_ = static_cast<Eigen::Index>(std::lround(2.0 * x_max / step)) + 1;
  const Eigen::Index center = points_ / 2;
  const int d = cutoff + 1;

  // Regular oscillator eigenfunctions on the grid.
  std::vector<Eigen::VectorXd> psi(d, Eigen::VectorXd(points_));
  for (Eigen::Index i = 0; i < points_; ++i) {
    const std::vector<double> p = oscillator_wavefunctions(cutoff, -x_max_ + i * step_);
    for (int n = 0; n < d; ++n) psi[n](i) = p[n];
  }

  // Irregular (exponentially growing) solutions of the oscillator
  // equation at each level, integrated outward from x = 0 by RK4. Any
  // admixture of the regular solution is subdominant and drops out of
  // the theta-averaged estimator by parity.
  std::vector<Eigen::VectorXd> phi(d, Eigen::VectorXd(points_));
  for (int n = 0; n < d; ++n) {
    const double energy = 2.0 * n + 1.0;
    auto accel = [energy](double x, double u) { return (x * x - energy) * u; };
    // Irregular solution has parity opposite to psi_n.
    double u = (n % 2 == 0) ? 0.0 : 1.0;
    double v = (n % 2 == 0) ? 1.0 : 0.0;
    phi[n](center) = u;
    for (Eigen::Index i = center; i + 1 < points_; ++i) {
      const double x = -x_max_ + i * step_;
      const double h = step_;
      const double k1u = v, k1v = accel(x, u);
      const double k2u = v + 0.5 * h * k1v, k2v = accel(x + 0.5 * h, u + 0.5 * h * k1u);
      const double k3u = v + 0.5 * h * k2v, k3v = accel(x + 0.5 * h, u + 0.5 * h * k2u);
      const double k4u = v + h * k3v, k4v = accel(x + h, u + h * k3u);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      phi[n](i + 1) = u;
    }
    const double parity = (n % 2 == 0) ? -1.0 : 1.0;
    for (Eigen::Index i = 0; i < center; ++i)
      phi[n](i) = parity * phi[n](2 * center - i);
  }

  tables_.assign(static_cast<size_t>(d) * d, Eigen::VectorXd());
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n <= m; ++n) {
      Eigen::VectorXd prod = psi[m].cwiseProduct(phi[n]);
      Eigen::VectorXd g(points_);
      for (Eigen::Index i = 1; i + 1 < points_; ++i)
        g(i) = (prod(i + 1) - prod(i - 1)) / (2.0 * step_);
      g(0) = (prod(1) - prod(0)) / step_;
      g(points_ - 1) = (prod(points_ - 1) - prod(points_ - 2)) / step_;

      // Scale so that the estimator is unbiased on its own element:
      // integral f_mn psi_m psi_n dx = 1.
      const Eigen::VectorXd weight = psi[m].cwiseProduct(psi[n]);
      double s = 0.0;
      for (Eigen::Index i = 0; i + 1 < points_; ++i)
        s += 0.5 * (g(i) * weight(i) + g(i + 1) * weight(i + 1)) * step_;
      if (std::abs(s) < 1e-8)
        throw NumericalError("PatternTable: degenerate normalization integral");
      tables_[static_cast<size_t>(m) * d + n] = g / s;
    }
  }
}

double PatternTable::value(int m, int n, double x) const {
  if (m < 0 || n < 0 || m > cutoff_ || n > cutoff_)
    throw std::invalid_argument("PatternTable::value: index out of range");
  if (n > m) std::swap(m, n);
  const Eigen::VectorXd& t = tables_[static_cast<size_t>(m) * (cutoff_ + 1) + n];
  double pos = (x + x_max_) / step_;
  if (pos <= 0.0) return t(0);
  if (pos >= points_ - 1) return t(points_ - 1);
  const Eigen::Index i = static_cast<Eigen::Index>(pos);
  const double frac = pos - i;
  return (1.0 - frac) * t(i) + frac * t(i + 1);
}

ReconstructedState reconstruct(const QuadratureDataset& data, int cutoff) {
  if (data.samples.empty()) throw std::invalid_argument("reconstruct: empty dataset");
  if (cutoff < 0) throw std::invalid_argument("reconstruct: negative cutoff");
  const size_t n_samples = data.samples.size();

  if (cutoff >= 1) {
    // Off-diagonals are unidentifiable if the phases cluster in a
    // window narrower than pi/8 (mod pi).
    std::vector<double> thetas;
    thetas.reserve(n_samples);
    for (const QuadratureSample& s : data.samples) {
      double t = std::fmod(s.theta, kPi);
      if (t < 0.0) t += kPi;
      thetas.push_back(t);
    }
    std::sort(thetas.begin(), thetas.end());
    double max_gap = kPi - thetas.back() + thetas.front();
    for (size_t i = 1; i < thetas.size(); ++i)
      max_gap = std::max(max_gap, thetas[i] - thetas[i - 1]);
    if (kPi - max_gap < kPi / 8.0)
      throw std::invalid_argument("reconstruct: degenerate theta coverage");
  }

  ReconstructedState out;
  if (n_samples < static_cast<size_t>(cutoff) * cutoff * 100)
    out.warnings.push_back("fewer than cutoff^2 * 100 samples; estimates may be noisy");

  const int d = cutoff + 1;
  PatternTable patterns(cutoff);
  Mat sum = Mat::Zero(d, d);
  Eigen::MatrixXd sum_re2 = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sum_im2 = Eigen::MatrixXd::Zero(d, d);
  for (const QuadratureSample& s : data.samples) {
    for (int m = 0; m < d; ++m) {
      for (int n = 0; n <= m; ++n) {
        const complexd v = patterns.value(m, n, s.x) * std::polar(1.0, (m - n) * s.theta);
        sum(m, n) += v;
        sum_re2(m, n) += v.real() * v.real();
        sum_im2(m, n) += v.imag() * v.imag();
      }
    }
  }
  Mat est = Mat::Zero(d, d);
  Eigen::MatrixXd se = Eigen::MatrixXd::Zero(d, d);
  const double inv_n = 1.0 / static_cast<double>(n_samples);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n <= m; ++n) {
      const complexd mean = sum(m, n) * inv_n;
      est(m, n) = mean;
      est(n, m) = std::conj(mean);
      const double var_re = std::max(0.0, sum_re2(m, n) * inv_n - mean.real() * mean.real());
      const double var_im = std::max(0.0, sum_im2(m, n) * inv_n - mean.imag() * mean.imag());
      se(m, n) = se(n, m) = std::sqrt((var_re + var_im) * inv_n);
    }
  }
  ModeLayout layout(1, cutoff > 0 ? cutoff : 1);
  if (cutoff == 0) {
    Mat padded = Mat::Zero(2, 2);
    padded(0, 0) = est(0, 0);
    est = padded;
    Eigen::MatrixXd se_p = Eigen::MatrixXd::Zero(2, 2);
    se_p(0, 0) = se(0, 0);
    se = se_p;
  }
  out.rho_hat = DensityMatrix(layout, std::move(est)).hermitized();
  out.standard_errors = std::move(se);
  return out;
}

LossCorrectResult loss_correct(const DensityMatrix& rho_hat, double eta, double eta_floor) {
  if (rho_hat.layout.mode_count != 1)
    throw std::invalid_argument("loss_correct: single-mode input required");
  if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("loss_correct: eta outside (0,1]");
  if (eta < eta_floor)
    throw std::invalid_argument("loss_correct: eta below inversion floor");

  const int d = rho_hat.layout.dim_per_mode();
  Mat rho = Mat::Zero(d, d);
  for (int m = d - 1; m >= 0; --m) {
    for (int n = d - 1; n >= 0; --n) {
      complexd val = rho_hat.elements(m, n);
      for (int k = 1; m + k < d && n + k < d; ++k) {
        const double coef = std::sqrt(binomial(m + k, k) * binomial(n + k, k)) *
                            std::pow(eta, 0.5 * (m + n)) * std::pow(1.0 - eta, k);
        val -= coef * rho(m + k, n + k);
      }
      rho(m, n) = val / std::pow(eta, 0.5 * (m + n));
    }
  }
  LossCorrectResult out{DensityMatrix(rho_hat.layout, std::move(rho)), false};
  out.non_physical = out.rho.min_eigenvalue() < -1e-3;
  return out;
}

}  // namespace scissors
