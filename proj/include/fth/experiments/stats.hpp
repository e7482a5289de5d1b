#pragma once

#include <span>

namespace fth::experiments {

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double incomplete_beta(double a, double b, double x);

// Two-tailed p-value of Student's t with `df` degrees of freedom.
double student_t_two_tailed(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 0.0;  // two-tailed
  double df = 0.0;
  double mean_difference = 0.0;
};

// Paired t-test on a[i] - b[i]. Throws InvalidInput for unequal or short
// inputs and for zero variance of the differences.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct SignTestResult {
  int positive = 0;  // pairs with a > b
  int negative = 0;
  int ties = 0;
  double p = 1.0;    // two-sided exact binomial, ties dropped
};

SignTestResult sign_test(std::span<const double> a, std::span<const double> b);

}  // namespace fth::experiments
