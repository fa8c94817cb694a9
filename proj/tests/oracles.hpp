#pragma once

// Reference computations used by the tests. None of these call into the
// library; they are brute force or direct transcriptions of the recursions.

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;

inline Vec v2(double a, double b) { return Vec{{a, b}}; }

// Nearest point of a 2-D closed ball by dense search over the boundary
// circle (the interior only matters when x is already inside).
inline Vec ball_projection_grid(const Vec& center, double r, const Vec& x, int samples = 400000) {
  if ((x - center).norm() <= r) return x;
  Vec best = center;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * std::numbers::pi * i / samples;
    const Vec y = center + r * v2(std::cos(t), std::sin(t));
    const double d = (y - x).norm();
    if (d < best_d) {
      best_d = d;
      best = y;
    }
  }
  return best;
}

// The staircase recursion in long double, straight from its definition.
inline std::vector<std::pair<long double, long double>> staircase(std::size_t n) {
  std::vector<std::pair<long double, long double>> xs{{0.0L, 2.0L}};
  long double step = 1.0L;
  while (xs.size() < n) {
    auto [a, b] = xs.back();
    if (xs.size() % 2 == 1) {
      xs.emplace_back(a + step, b);
      step /= 2;
    } else {
      xs.emplace_back(0.0L, std::sqrt((a - 1) * (a - 1) + b * b - 1));
    }
  }
  return xs;
}

// beta^2 at iterate 2l+2 by telescoping the recursion by hand.
inline long double beta_sq_closed(int l) {
  long double s = 0.0L;
  for (int j = 0; j <= l; ++j) s += std::pow(4.0L, -j);
  return s + std::pow(2.0L, 1 - l);
}

// Variational characterization of the projection p of x onto C:
// <x - p, y - p> <= 0 for every y in C. Returns the largest value seen.
template <class Sampler>
double projection_vi_residual(const Vec& x, const Vec& p, Sampler&& sample_in_set, int count,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    const Vec y = sample_in_set(rng);
    worst = std::max(worst, (x - p).dot(y - p));
  }
  return worst;
}

inline Vec uniform_box(std::mt19937_64& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = u(rng);
  return v;
}

inline Vec uniform_disk(std::mt19937_64& rng, const Vec& c, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double t = 2.0 * std::numbers::pi * u(rng);
  const double s = r * std::sqrt(u(rng));
  return c + s * v2(std::cos(t), std::sin(t));
}

// Points of the intersection of the two unit balls centred at (+-1/2, 0),
// by rejection.
inline std::vector<Vec> lens_points(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> pts;
  while (pts.size() < count) {
    const Vec y = uniform_box(rng, 2, -0.5, 0.5);
    if ((y - v2(-0.5, 0)).squaredNorm() <= 1.0 && (y - v2(0.5, 0)).squaredNorm() <= 1.0) pts.push_back(y);
  }
  return pts;
}

// Points of the closed quadrant {y1 <= 0, y2 <= 0} within [-3,0]^2.
inline std::vector<Vec> quadrant_points(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < count; ++i) pts.push_back(uniform_box(rng, 2, -3.0, 0.0));
  return pts;
}

}  // namespace oracle
