#include "fth/numerics/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fth/numerics/rng.hpp"

namespace fth::numerics {
namespace {

using Point = std::vector<double>;

double guarded(const Objective& f, const Point& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

Point lerp(const Point& a, const Point& b, double t) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

struct Simplex {
  std::vector<Point> vertices;
  std::vector<double> values;

  void sort() {
    std::vector<std::size_t> order(vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Point> v;
    std::vector<double> f;
    for (auto i : order) {
      v.push_back(vertices[i]);
      f.push_back(values[i]);
    }
    vertices = std::move(v);
    values = std::move(f);
  }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i)
      for (std::size_t k = 0; k < vertices[0].size(); ++k)
        d = std::max(d, std::abs(vertices[i][k] - vertices[0][k]));
    return d;
  }
};

// Axis-aligned simplex for the first pass; restarts use randomly signed and
// permuted axes so a collapsed simplex can escape its subspace.
Simplex build_simplex(const Objective& f, const Point& x0, double step, Rng* rng,
                      int& evaluations) {
  const std::size_t n = x0.size();
  Simplex s;
  s.vertices.push_back(x0);
  s.values.push_back(guarded(f, x0));
  ++evaluations;
  std::vector<std::size_t> axes(n);
  std::iota(axes.begin(), axes.end(), 0);
  if (rng) {
    for (std::size_t i = n; i > 1; --i) std::swap(axes[i - 1], axes[rng->below(i)]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Point v = x0;
    double h = step;
    if (rng && rng->uniform() < 0.5) h = -h;
    v[axes[i]] += h;
    s.vertices.push_back(v);
    s.values.push_back(guarded(f, v));
    ++evaluations;
  }
  s.sort();
  return s;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const std::size_t n = x0.size();
  NelderMeadResult result;
  Rng rng(options.seed);

  Point best = std::move(x0);
  double best_value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool converged = false;

  for (int pass = 0; pass <= options.restarts; ++pass) {
    Simplex s = build_simplex(f, best, options.initial_step, pass == 0 ? nullptr : &rng,
                              evaluations);
    converged = false;
    while (evaluations < options.max_evaluations) {
      if (std::abs(s.values.back() - s.values.front()) <= options.f_tolerance ||
          s.diameter() <= options.x_tolerance) {
        converged = true;
        break;
      }
      Point centroid(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += s.vertices[i][k] / static_cast<double>(n);

      const Point& worst = s.vertices[n];
      const Point reflected = lerp(centroid, worst, -kReflect);
      const double fr = guarded(f, reflected);
      ++evaluations;

      if (fr < s.values[0]) {
        const Point expanded = lerp(centroid, worst, -kExpand);
        const double fe = guarded(f, expanded);
        ++evaluations;
        if (fe < fr) {
          s.vertices[n] = expanded;
          s.values[n] = fe;
        } else {
          s.vertices[n] = reflected;
          s.values[n] = fr;
        }
      } else if (fr < s.values[n - 1]) {
        s.vertices[n] = reflected;
        s.values[n] = fr;
      } else {
        const bool outside = fr < s.values[n];
        const Point contracted =
            outside ? lerp(centroid, reflected, kContract) : lerp(centroid, worst, kContract);
        const double fc = guarded(f, contracted);
        ++evaluations;
        if (fc < (outside ? fr : s.values[n])) {
          s.vertices[n] = contracted;
          s.values[n] = fc;
        } else {
          for (std::size_t i = 1; i <= n; ++i) {
            s.vertices[i] = lerp(s.vertices[0], s.vertices[i], kShrink);
            s.values[i] = guarded(f, s.vertices[i]);
            ++evaluations;
          }
        }
      }
      s.sort();
    }
    if (s.values[0] <= best_value) {
      best_value = s.values[0];
      best = s.vertices[0];
    }
    if (evaluations >= options.max_evaluations) break;
  }

  result.x = std::move(best);
  result.value = best_value;
  result.evaluations = evaluations;
  result.converged = converged;
  return result;
}

}  // namespace fth::numerics
