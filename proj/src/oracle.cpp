#include "cvtel/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cvtel::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_grid(const PhaseSpaceGrid& grid) {
  if (!(grid.half_width > 0.0)) throw ValidationError("phase-space grid half-width must be > 0");
  if (grid.points_per_axis < 64) throw ValidationError("phase-space grid needs at least 64 points per axis");
  if (grid.points_per_axis % 2 != 0) throw ValidationError("phase-space grid point count must be even");
}

double largest_eigenvalue(const Mat2& m) {
  const double half_tr = 0.5 * (m(0, 0) + m(1, 1));
  const double det = m.determinant();
  return half_tr + std::sqrt(std::max(half_tr * half_tr - det, 0.0));
}

double largest_eigenvalue(const Mat4& m) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(m);
  return es.eigenvalues()(3);
}

// Excess noise of the channel, assembled from the raw blocks.
Mat2 excess_noise(const TwoModeCovariance& gamma) {
  Mat2 r;
  r << 1.0, 0.0, 0.0, -1.0;
  const Mat2 a = gamma.block_a();
  const Mat2 b = gamma.block_b();
  const Mat2 c = gamma.block_c();
  const Mat2 e = r * a * r + r * c + c.transpose() * r + b;
  return 0.5 * (e + e.transpose());
}

struct DiagonalScanResult {
  double x = 0.0;
  double y = 0.0;
  double f = 0.0;
};

}  // namespace

PhaseSpaceGrid recommended_grid(const TwoModeCovariance& gamma, const OneModeCovariance* d,
                                int points_per_axis) {
  if (!is_physical(gamma)) throw ValidationError("channel covariance is not physical");
  double widest = largest_eigenvalue(gamma.m);
  if (d) {
    widest = std::max(widest, largest_eigenvalue(d->m));
    widest = std::max(widest, largest_eigenvalue((d->m + excess_noise(gamma)).eval()));
  }
  PhaseSpaceGrid grid;
  grid.half_width = 8.0 * std::sqrt(widest);
  grid.points_per_axis = points_per_axis;
  return grid;
}

QuadratureResult wigner_overlap_fidelity(const TwoModeCovariance& gamma, const OneModeCovariance& d,
                                         const PhaseSpaceGrid& grid) {
  require_grid(grid);
  if (!is_physical(gamma)) throw ValidationError("channel covariance is not physical");
  if (!is_pure(d)) throw ValidationError("input covariance must be pure for fidelity");

  const Mat2 d_in = d.m;
  const Mat2 d_out = d_in + excess_noise(gamma);
  const double det_in = d_in.determinant();
  const double det_out = d_out.determinant();
  if (det_in <= 0.0 || det_out <= 0.0) throw ComputationError("degenerate Wigner covariance");
  const Mat2 inv_in = d_in.inverse();
  const Mat2 inv_out = d_out.inverse();
  const double norm = 1.0 / (kPi * kPi * std::sqrt(det_in * det_out));

  const int n = grid.points_per_axis;
  const double h = 2.0 * grid.half_width / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -grid.half_width + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double p = -grid.half_width + (j + 0.5) * h;
      const double qi = inv_in(0, 0) * x * x + 2.0 * inv_in(0, 1) * x * p + inv_in(1, 1) * p * p;
      const double qo = inv_out(0, 0) * x * x + 2.0 * inv_out(0, 1) * x * p + inv_out(1, 1) * p * p;
      sum += std::exp(-qi - qo);
    }
  }

  QuadratureResult result;
  result.value = 2.0 * kPi * norm * h * h * sum;
  const double sigma = std::sqrt(std::max(largest_eigenvalue(d_in), largest_eigenvalue(d_out)));
  result.grid_adequate = grid.half_width >= 8.0 * sigma * (1.0 - 1e-12);
  return result;
}

QuadratureResult swap_fidelity_integral(const TwoModeCovariance& gamma, const PhaseSpaceGrid& grid) {
  require_grid(grid);
  if (!is_physical(gamma)) throw ValidationError("channel covariance is not physical");

  const double det_g = gamma.m.determinant();
  if (det_g <= 0.0) throw ComputationError("degenerate two-mode covariance");
  const Mat4 inv = gamma.m.inverse();
  const double norm = 1.0 / (kPi * kPi * std::sqrt(det_g));

  // Quadratic form of the slice (x, p, -x, p): precompute its 2x2 kernel.
  Eigen::Matrix<double, 4, 2> slice;
  slice << 1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 1.0;
  const Mat2 kernel = slice.transpose() * inv * slice;

  const int n = grid.points_per_axis;
  const double h = 2.0 * grid.half_width / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -grid.half_width + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double p = -grid.half_width + (j + 0.5) * h;
      const double q = kernel(0, 0) * x * x + 2.0 * kernel(0, 1) * x * p + kernel(1, 1) * p * p;
      sum += std::exp(-q);
    }
  }

  QuadratureResult result;
  result.value = 2.0 * kPi * norm * h * h * sum;
  const double sigma = std::sqrt(largest_eigenvalue(gamma.m));
  result.grid_adequate = grid.half_width >= 8.0 * sigma * (1.0 - 1e-12);
  return result;
}

CandidateSolution grid_search_cp(const TwoModeCovariance& gamma, const OneModeCovariance* d,
                                 Side side, double bounds, double step) {
  if (!is_physical(gamma)) throw ValidationError("channel covariance is not physical");
  if (d && !is_pure(*d)) throw ValidationError("input covariance must be pure for fidelity");
  if (!(bounds > 0.0) || !(step > 0.0) || step > bounds) {
    throw ValidationError("grid search needs 0 < step <= bounds");
  }
  if (side == Side::both) throw ValidationError("one-sided grid search takes side bob or alice");

  const Mat2 a = gamma.block_a();
  const Mat2 b = gamma.block_b();
  const Mat2 c = gamma.block_c();
  Mat2 r;
  r << 1.0, 0.0, 0.0, -1.0;
  const Mat2 rar = r * a * r;
  const Mat2 rc = r * c;
  const Mat2 dm = d ? d->m : Mat2::Zero();

  // Entries of the matrix whose determinant is minimized, for S = diag(x, y).
  auto entries = [&](double x, double y, double* m00, double* m01, double* m11) {
    if (side == Side::bob) {
      *m00 = 2.0 * dm(0, 0) + rar(0, 0) + 2.0 * x * rc(0, 0) + x * x * b(0, 0);
      *m11 = 2.0 * dm(1, 1) + rar(1, 1) + 2.0 * y * rc(1, 1) + y * y * b(1, 1);
      *m01 = 2.0 * dm(0, 1) + rar(0, 1) + y * rc(0, 1) + x * rc(1, 0) + x * y * b(0, 1);
    } else {
      *m00 = 2.0 * dm(0, 0) + x * x * a(0, 0) + 2.0 * x * c(0, 0) + b(0, 0);
      *m11 = 2.0 * dm(1, 1) + y * y * a(1, 1) - 2.0 * y * c(1, 1) + b(1, 1);
      *m01 = 2.0 * dm(0, 1) - x * y * a(0, 1) + x * c(0, 1) - y * c(1, 0) + b(0, 1);
    }
  };
  auto objective = [&](double x, double y) {
    double m00, m01, m11;
    entries(x, y, &m00, &m01, &m11);
    const double det = m00 * m11 - m01 * m01;
    return std::abs(1.0 - x * y) + std::sqrt(std::max(det, 0.0));
  };

  auto scan = [&](double x_lo, double x_hi, double y_lo, double y_hi, double h,
                  DiagonalScanResult seed) {
    DiagonalScanResult best = seed;
    const int nx = static_cast<int>(std::floor((x_hi - x_lo) / h + 0.5)) + 1;
    const int ny = static_cast<int>(std::floor((y_hi - y_lo) / h + 0.5)) + 1;
    for (int i = 0; i < nx; ++i) {
      const double x = x_lo + i * h;
      for (int j = 0; j < ny; ++j) {
        const double y = y_lo + j * h;
        const double f = objective(x, y);
        if (f < best.f) best = {x, y, f};
      }
    }
    return best;
  };

  DiagonalScanResult best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  best = scan(-bounds, bounds, -bounds, bounds, step, best);
  best = scan(best.x - 2.0 * step, best.x + 2.0 * step, best.y - 2.0 * step, best.y + 2.0 * step,
              step / 100.0, best);

  CandidateSolution out;
  out.side = side;
  out.x = best.x;
  out.y = best.y;
  out.s_matrix = Mat2::Zero();
  out.s_matrix(0, 0) = best.x;
  out.s_matrix(1, 1) = best.y;
  double m00, m01, m11;
  entries(best.x, best.y, &m00, &m01, &m11);
  const double det = m00 * m11 - m01 * m01;
  const double defect = std::abs(1.0 - best.x * best.y);
  Mat2 g = Mat2::Zero();
  if (defect > 1e-14 && det > 1e-12) {
    Mat2 m;
    m << m00, m01, m01, m11;
    g = (defect / std::sqrt(det)) * m;
    if (side == Side::alice) g = (r * g * r).eval();
  }
  out.g_matrix = g;
  out.objective = best.f * best.f;
  out.fidelity = 2.0 / best.f;
  out.branch_sign = 0.0;
  out.stationary = true;
  const bool g_trivial = g.cwiseAbs().maxCoeff() < 1e-6;
  if (std::abs(best.x - 1.0) < 1e-6 && std::abs(best.y - 1.0) < 1e-6 && g_trivial) {
    out.kind = CandidateKind::identity;
  } else if (std::abs(best.x) < 1e-6 && std::abs(best.y) < 1e-6) {
    out.kind = CandidateKind::vacuum_replacement;
  } else if (defect < 1e-9) {
    out.kind = CandidateKind::boundary_root;
  } else {
    out.kind = CandidateKind::interior_root;
  }
  return out;
}

TwoSidedGridOptimum grid_search_two_sided(const TwoModeCovariance& gamma,
                                          const OneModeCovariance* d, double bounds, double step) {
  if (!is_physical(gamma)) throw ValidationError("channel covariance is not physical");
  if (d && !is_pure(*d)) throw ValidationError("input covariance must be pure for fidelity");
  if (!(bounds > 0.0) || !(step > 0.0) || step > bounds) {
    throw ValidationError("grid search needs 0 < step <= bounds");
  }

  const Mat2 a = gamma.block_a();
  const Mat2 b = gamma.block_b();
  const Mat2 c = gamma.block_c();
  const Mat2 dm = d ? d->m : Mat2::Zero();
  const double a11 = a(0, 0), a22 = a(1, 1), a12 = a(0, 1);
  const double b11 = b(0, 0), b22 = b(1, 1), b12 = b(0, 1);
  const double c11 = c(0, 0), c22 = c(1, 1), c12 = c(0, 1), c21 = c(1, 0);
  const double d11 = 2.0 * dm(0, 0), d22 = 2.0 * dm(1, 1), d12 = 2.0 * dm(0, 1);

  auto objective = [&](double u, double v, double x, double y) {
    const double alpha = d11 + u * u * a11 + 2.0 * u * x * c11 + x * x * b11;
    const double beta = d22 + v * v * a22 - 2.0 * v * y * c22 + y * y * b22;
    const double gam = d12 - u * v * a12 + u * y * c12 - v * x * c21 + x * y * b12;
    return std::abs(1.0 - u * v) + std::abs(1.0 - x * y) +
           std::sqrt(std::max(alpha * beta - gam * gam, 0.0));
  };

  struct Best {
    double u = 0.0, v = 0.0, x = 0.0, y = 0.0;
    double f = std::numeric_limits<double>::infinity();
  } best;

  auto scan = [&](double u0, double v0, double x0, double y0, double half, double h) {
    const int n = static_cast<int>(std::floor(2.0 * half / h + 0.5)) + 1;
    for (int iu = 0; iu < n; ++iu) {
      const double u = u0 - half + iu * h;
      for (int iv = 0; iv < n; ++iv) {
        const double v = v0 - half + iv * h;
        for (int ix = 0; ix < n; ++ix) {
          const double x = x0 - half + ix * h;
          for (int iy = 0; iy < n; ++iy) {
            const double y = y0 - half + iy * h;
            const double f = objective(u, v, x, y);
            if (f < best.f) best = {u, v, x, y, f};
          }
        }
      }
    }
  };

  scan(0.0, 0.0, 0.0, 0.0, bounds, step);
  scan(best.u, best.v, best.x, best.y, step, step / 10.0);
  scan(best.u, best.v, best.x, best.y, step / 10.0, step / 100.0);

  TwoSidedGridOptimum out;
  out.u = best.u;
  out.v = best.v;
  out.x = best.x;
  out.y = best.y;
  out.fidelity = 2.0 / best.f;
  return out;
}

std::vector<TwoModeCovariance> separable_state_sampler(std::uint64_t seed, int count) {
  if (count < 1) throw ValidationError("sampler count must be >= 1");
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto rotation = [](double theta) {
    Mat2 q;
    q << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return q;
  };
  auto local_symplectic = [&]() {
    const double t1 = uniform(0.0, 2.0 * kPi);
    const double s = uniform(-0.6, 0.6);
    const double t2 = uniform(0.0, 2.0 * kPi);
    Mat2 squeeze = Mat2::Zero();
    squeeze(0, 0) = std::exp(s);
    squeeze(1, 1) = std::exp(-s);
    return (rotation(t1) * squeeze * rotation(t2)).eval();
  };

  std::vector<TwoModeCovariance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    TwoModeCovariance state;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double nu_a = 1.0 + uniform(0.0, 2.0);
      const double nu_b = 1.0 + uniform(0.0, 2.0);
      const Mat2 sa = local_symplectic();
      const Mat2 sb = local_symplectic();
      Mat4 g = Mat4::Zero();
      g.topLeftCorner<2, 2>() = nu_a * sa * sa.transpose();
      g.bottomRightCorner<2, 2>() = nu_b * sb * sb.transpose();
      if (i > 0) {
        // Classical correlated noise: any Gram matrix keeps the state
        // separable while filling in the off-diagonal block.
        Mat4 w;
        for (int row = 0; row < 4; ++row) {
          for (int col = 0; col < 4; ++col) w(row, col) = uniform(-0.5, 0.5);
        }
        g += w * w.transpose();
      }
      state.m = g;
      if (is_physical(state) && is_ppt_separable(state)) break;
      if (attempt == 63) throw ComputationError("separable sampler failed to produce a valid state");
    }
    out.push_back(state);
  }
  return out;
}

}  // namespace cvtel::oracle
