#pragma once

#include <Eigen/Dense>

#include <stdexcept>

// Phase-space conventions used throughout this library:
//
//   * quadrature ordering is (x_A, p_A, x_B, p_B) for two modes, (x, p) for one
//   * covariance matrices collect doubled symmetrized second moments, so the
//     vacuum state has covariance identity and a physical one-mode covariance
//     has determinant >= 1
//   * a covariance m is physical iff m + i*Omega >= 0, with Omega the
//     symplectic form in the same ordering

namespace cvtel {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;

// Absolute slack allowed on smallest eigenvalues in physicality / CP tests.
inline constexpr double kEigenvalueTol = 1e-9;
inline constexpr double kSymmetryTol = 1e-9;
inline constexpr double kPurityTol = 1e-9;

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a quantity that must be strictly positive (a determinant, a
// quadratic form) degenerates and no meaningful value can be returned.
struct ComputationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constant matrices of the formalism.
const Mat2& sigma_form();      // [[0, 1], [-1, 0]], one-mode symplectic form
const Mat2& momentum_flip();   // diag(1, -1), transposition in phase space
const Mat4& omega_form();      // sigma_form on each mode
const Mat4& ppt_flip();        // diag(1, 1, 1, -1), momentum flip on mode B

struct OneModeCovariance {
  Mat2 m = Mat2::Identity();

  static OneModeCovariance vacuum() { return {}; }
  static OneModeCovariance coherent() { return {}; }  // same covariance as vacuum
  static OneModeCovariance squeezed(double s);        // diag(e^{2s}, e^{-2s})
};

struct TwoModeCovariance {
  Mat4 m = Mat4::Identity();

  Mat2 block_a() const { return m.topLeftCorner<2, 2>(); }
  Mat2 block_b() const { return m.bottomRightCorner<2, 2>(); }
  Mat2 block_c() const { return m.topRightCorner<2, 2>(); }

  // Assembles [[a, c], [c^T, b]] and symmetrizes away rounding skew.
  static TwoModeCovariance from_blocks(const Mat2& a, const Mat2& b, const Mat2& c);
};

// Trace-preserving Gaussian map m -> s m s^T + g on one mode.  The matrices
// are stored exactly as given; call is_valid_cp_map to test complete
// positivity, nothing is enforced at construction.
struct GaussianCpMap {
  Mat2 s = Mat2::Identity();
  Mat2 g = Mat2::Zero();

  double s_det() const { return s.determinant(); }

  static GaussianCpMap identity() { return {}; }
  static GaussianCpMap vacuum_replacement();  // s = 0, g = identity
  static GaussianCpMap diagonal(double x, double y, const Mat2& g);
};

// Two-mode squeezed vacuum with extra classical noise b0 on mode B.
struct ChannelParams {
  double r = 0.0;
  double b0 = 0.0;
};

// Local-symplectic reduction of a two-mode covariance:
//   (S_A + S_B) gamma (S_A + S_B)^T = diag blocks (a*I, b*I) with C = diag(c1, c2).
// Sign convention: c1 <= 0 <= c2 when c1*c2 <= 0, otherwise both positive;
// |c1| >= |c2| in either case.
struct StandardFormParams {
  double a = 1.0;
  double b = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  Mat2 alice_symplectic = Mat2::Identity();
  Mat2 bob_symplectic = Mat2::Identity();

  Mat4 tridiagonal() const;  // the reduced covariance itself
};

Mat4 tridiagonal_covariance(double a, double b, double c1, double c2);

// Smallest eigenvalue of m + i*Omega (negative means unphysical).
double physicality_margin(const OneModeCovariance& g);
double physicality_margin(const TwoModeCovariance& g);

bool is_physical(const OneModeCovariance& g);
bool is_physical(const TwoModeCovariance& g);
bool is_pure(const OneModeCovariance& g);  // physical and det within kPurityTol of 1

// Complete positivity of a trace-preserving Gaussian map: scalar conditions
//   g11 >= 0,  g22 >= 0,  det g >= (1 - det s)^2
// and the equivalent Hermitian eigenvalue test of g + i(1 - det s)*sigma.
bool is_valid_cp_map(const GaussianCpMap& map);
bool is_valid_cp_map_matrix(const GaussianCpMap& map);

TwoModeCovariance make_tmsv_noisy(const ChannelParams& params);

TwoModeCovariance apply_cp_map_bob(const TwoModeCovariance& gamma, const GaussianCpMap& map);
TwoModeCovariance apply_cp_map_alice(const TwoModeCovariance& gamma, const GaussianCpMap& map);

StandardFormParams to_standard_form(const TwoModeCovariance& gamma);

// Positivity of the partial transpose; for covariances of this size the test
// is necessary and sufficient for separability.
bool is_ppt_separable(const TwoModeCovariance& gamma);

}  // namespace cvtel
