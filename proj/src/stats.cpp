#include "osiris/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace osiris {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Continued fraction for the incomplete beta function (modified Lentz).
// Converges quickly when x < (a + 1) / (a + b + 2); the caller applies the
// symmetry I_x(a,b) = 1 - I_{1-x}(b,a) to stay in that region.
double beta_cf(double a, double b, double x) {
  constexpr double eps = 1e-15;
  constexpr double fpmin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction did not converge");
}

}  // namespace

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return kNan;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const auto n = xs.size();
  if (n < 2) return kNan;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(n - 1);
}

double population_variance(std::span<const double> xs) {
  const auto n = xs.size();
  if (n < 1) return kNan;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(n);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("regularized_incomplete_beta: a and b must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("regularized_incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_two_sided_p: df must be positive");
  if (std::isnan(t)) return kNan;
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double kolmogorov_sf(double lambda) {
  if (std::isnan(lambda)) return kNan;
  if (lambda <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // Theta-function form of the CDF; far better conditioned for small lambda.
    const double f = std::exp(-pi * pi / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int k = 1; k <= 41; k += 2) {
      const double term = std::pow(f, static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    const double cdf = std::sqrt(2.0 * pi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * lambda * lambda * static_cast<double>(j) * j);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  TestResult res;
  res.n_a = static_cast<int>(a.size());
  res.n_b = static_cast<int>(b.size());
  if (res.n_a < 2 || res.n_b < 2) {
    res.inconclusive = true;
    return res;
  }
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sample_variance(a);
  const double vb = sample_variance(b);
  if (va == 0.0 && vb == 0.0) {
    res.p_value = (ma == mb) ? 1.0 : 0.0;
    res.statistic = (ma == mb) ? 0.0 : std::numeric_limits<double>::infinity() * (ma > mb ? 1 : -1);
    res.reject = res.p_value < alpha;
    return res;
  }
  const double sa = va / static_cast<double>(res.n_a);
  const double sb = vb / static_cast<double>(res.n_b);
  const double se2 = sa + sb;
  res.statistic = (ma - mb) / std::sqrt(se2);
  res.df = se2 * se2 / (sa * sa / (res.n_a - 1) + sb * sb / (res.n_b - 1));
  res.p_value = student_t_two_sided_p(res.statistic, res.df);
  res.reject = res.p_value < alpha;
  return res;
}

TestResult smirnov_test(std::span<const double> a, std::span<const double> b, double alpha) {
  TestResult res;
  res.n_a = static_cast<int>(a.size());
  res.n_b = static_cast<int>(b.size());
  if (res.n_a < 1 || res.n_b < 1) {
    res.inconclusive = true;
    return res;
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  const double ne = na * nb / (na + nb);
  res.statistic = d;
  res.p_value = kolmogorov_sf(std::sqrt(ne) * d);
  res.reject = res.p_value < alpha;
  return res;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson_r: length mismatch");
  const auto n = xs.size();
  if (n < 2) return kNan;
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = xs[k] - mx;
    const double dy = ys[k] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return kNan;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace osiris
