#include "fth/experiments/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fth/errors.hpp"

namespace fth::experiments {
namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("incomplete_beta: x must be in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  // The fraction converges fast for x < (a+1)/(a+b+2); use the symmetry otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
  if (!(df > 0.0)) throw InvalidInput("student_t: df must be positive");
  if (std::isinf(t)) return 0.0;
  if (!std::isfinite(t)) throw InvalidInput("student_t: t must not be NaN");
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("paired_t_test: samples must have equal length");
  const std::size_t n = a.size();
  if (n < 2) throw InvalidInput("paired_t_test: need at least two pairs");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) throw InvalidInput("paired_t_test: samples must be finite");
    mean += a[i] - b[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(n - 1);
  if (!(var > 0.0)) throw InvalidInput("paired_t_test: differences have zero variance");
  TTestResult r;
  r.df = static_cast<double>(n - 1);
  r.mean_difference = mean;
  r.t = mean / std::sqrt(var / static_cast<double>(n));
  r.p = student_t_two_tailed(r.t, r.df);
  return r;
}

SignTestResult sign_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("sign_test: samples must have equal length");
  SignTestResult r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) ++r.positive;
    else if (a[i] < b[i]) ++r.negative;
    else ++r.ties;
  }
  const int n = r.positive + r.negative;
  if (n == 0) return r;
  const int k = std::min(r.positive, r.negative);
  double tail = 0.0;
  for (int i = 0; i <= k; ++i)
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
  r.p = std::min(1.0, 2.0 * tail);
  return r;
}

}  // namespace fth::experiments
