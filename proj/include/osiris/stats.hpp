#pragma once

#include <limits>
#include <span>

namespace osiris {

struct TestResult {
  double statistic = std::numeric_limits<double>::quiet_NaN();
  double df = std::numeric_limits<double>::quiet_NaN();  // NaN for distribution-free tests
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool reject = false;
  bool inconclusive = false;  // too few samples on a side to run the test
  int n_a = 0;
  int n_b = 0;
};

double mean_of(std::span<const double> xs);
// Unbiased sample variance (divides by n-1); NaN for n < 2.
double sample_variance(std::span<const double> xs);
// Population variance (divides by n); NaN for n < 1.
double population_variance(std::span<const double> xs);

// Regularized incomplete beta function I_x(a, b), a > 0, b > 0, x in [0, 1].
// Continued-fraction evaluation, converged to relative 1e-14 or better.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with df degrees of freedom:
// P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

// Kolmogorov distribution survival function Q(lambda) = P(sup|B(t)| > lambda).
double kolmogorov_sf(double lambda);

// Welch's unequal-variance t-test, two-sided, with Welch-Satterthwaite
// degrees of freedom. Degenerate inputs: fewer than 2 samples on a side is
// inconclusive (no rejection); two exactly-constant samples compare means
// directly (p = 1 if equal, p = 0 if not).
TestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha);

// Two-sample Smirnov test: D = sup |F_a - F_b|, p = Q(sqrt(ne) * D) with
// ne = n_a * n_b / (n_a + n_b). Empty samples are inconclusive.
TestResult smirnov_test(std::span<const double> a, std::span<const double> b, double alpha);

// Pearson correlation coefficient; NaN when n < 2 or either side is constant.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

}  // namespace osiris
