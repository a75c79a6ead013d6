#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cvtel/gaussian_core.hpp"

// Deterministic random generators shared by the test binaries.
namespace cvtel::testutil {

inline double urand(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Mat2 rotation(double theta) {
  Mat2 q;
  q << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return q;
}

// rot * squeeze * rot: Euler decomposition of a one-mode symplectic.
inline Mat2 random_local_symplectic(std::mt19937_64& rng, double squeeze_span = 0.5) {
  const double t1 = urand(rng, 0.0, 6.283185307179586);
  const double s = urand(rng, -squeeze_span, squeeze_span);
  const double t2 = urand(rng, 0.0, 6.283185307179586);
  Mat2 squeeze = Mat2::Zero();
  squeeze(0, 0) = std::exp(s);
  squeeze(1, 1) = std::exp(-s);
  return rotation(t1) * squeeze * rotation(t2);
}

inline Mat4 direct_sum(const Mat2& top, const Mat2& bottom) {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<2, 2>() = top;
  m.bottomRightCorner<2, 2>() = bottom;
  return m;
}

// Hyperbolic mixing of the two modes; symplectic in (x_A, p_A, x_B, p_B).
inline Mat4 two_mode_squeezer(double r) {
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  Mat4 s = Mat4::Zero();
  s(0, 0) = ch; s(0, 2) = sh;
  s(1, 1) = ch; s(1, 3) = -sh;
  s(2, 0) = sh; s(2, 2) = ch;
  s(3, 1) = -sh; s(3, 3) = ch;
  return s;
}

inline OneModeCovariance random_pure_input(std::mt19937_64& rng, double squeeze_span = 0.4) {
  const Mat2 l = random_local_symplectic(rng, squeeze_span);
  OneModeCovariance d;
  d.m = l * l.transpose();
  return d;
}

// Random physical two-mode covariance: thermal occupations pushed through a
// random two-mode symplectic.
inline TwoModeCovariance random_physical_two_mode(std::mt19937_64& rng) {
  const double nu1 = 1.0 + urand(rng, 0.0, 1.5);
  const double nu2 = 1.0 + urand(rng, 0.0, 1.5);
  Mat4 v = Mat4::Identity();
  v(0, 0) = v(1, 1) = nu1;
  v(2, 2) = v(3, 3) = nu2;
  const Mat4 local = direct_sum(random_local_symplectic(rng), random_local_symplectic(rng));
  const Mat4 s = local * two_mode_squeezer(urand(rng, -0.8, 0.8));
  TwoModeCovariance out;
  out.m = s * v * s.transpose();
  out.m = 0.5 * (out.m + out.m.transpose());
  return out;
}

// Random channel already in the reduced form: blocks a*I, b*I, diag(c1, c2)
// with c1 <= 0 <= c2.  Rejection-samples until physical and non-degenerate.
inline TwoModeCovariance random_diagonal_channel(std::mt19937_64& rng) {
  for (;;) {
    const double a = 1.0 + urand(rng, 0.05, 2.0);
    const double b = 1.0 + urand(rng, 0.05, 2.0);
    const double reach = std::sqrt((a - 1.0) * (b - 1.0));
    const double c2 = urand(rng, 0.05, 1.0) * reach;
    const double c1 = -urand(rng, 1.0, 1.6) * c2;
    TwoModeCovariance gamma;
    gamma.m = tridiagonal_covariance(a, b, c1, c2);
    if (std::abs(c1) > std::abs(c2) + 1e-6 && is_physical(gamma)) return gamma;
  }
}

// Entangled member of the noisy two-mode-squeezed family plus symmetric
// thermal padding (keeps the blocks scalar).
inline TwoModeCovariance random_entangled_diagonal(std::mt19937_64& rng) {
  for (;;) {
    ChannelParams params;
    params.r = urand(rng, 0.25, 1.2);
    params.b0 = urand(rng, 0.0, 0.6);
    TwoModeCovariance gamma = make_tmsv_noisy(params);
    const double pad = urand(rng, 0.0, 0.15);
    gamma.m += pad * Mat4::Identity();
    if (is_physical(gamma) && !is_ppt_separable(gamma)) return gamma;
  }
}

// Small deterministic Nelder-Mead used by tests as an independent minimizer.
inline std::vector<double> simplex_minimize(const std::function<double(const std::vector<double>&)>& fn,
                                            std::vector<double> start, double step, int iterations) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = fn(pts[i]);
  for (int it = 0; it < iterations; ++it) {
    std::size_t best = 0, worst = 0, second = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if (vals[i] < vals[best]) best = i;
      if (vals[i] > vals[worst]) worst = i;
    }
    second = best;
    for (std::size_t i = 0; i <= n; ++i) {
      if (i != worst && vals[i] > vals[second]) second = i;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
    }
    std::vector<double> reflected(n), expanded(n), contracted(n);
    for (std::size_t k = 0; k < n; ++k) reflected[k] = 2.0 * centroid[k] - pts[worst][k];
    const double fr = fn(reflected);
    if (fr < vals[best]) {
      for (std::size_t k = 0; k < n; ++k) expanded[k] = 3.0 * centroid[k] - 2.0 * pts[worst][k];
      const double fe = fn(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      for (std::size_t k = 0; k < n; ++k) contracted[k] = 0.5 * (centroid[k] + pts[worst][k]);
      const double fc = fn(contracted);
      if (fc < vals[worst]) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k) pts[i][k] = 0.5 * (pts[i][k] + pts[best][k]);
          vals[i] = fn(pts[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (vals[i] < vals[best]) best = i;
  }
  return pts[best];
}

}  // namespace cvtel::testutil
