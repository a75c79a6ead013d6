#include "cvtel/gaussian_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <sstream>

namespace cvtel {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void require_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  const double skew = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (skew > kSymmetryTol) {
    std::ostringstream os;
    os << what << " must be symmetric (max |m - m^T| entry is " << skew << ")";
    throw ValidationError(os.str());
  }
}

// Smallest eigenvalue of the Hermitian matrix m + i*form.
double min_eigenvalue_with_form(const Eigen::MatrixXd& m, const Eigen::MatrixXd& form) {
  Eigen::MatrixXcd h = m.cast<std::complex<double>>() + kI * form.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Symplectic S with S m S^T = sqrt(det m) * I for a positive definite 2x2 m.
Mat2 isotropizing_symplectic(const Mat2& m, double* nu_out) {
  const double det = m.determinant();
  if (det <= 0.0) throw ComputationError("mode covariance block has non-positive determinant");
  const double nu = std::sqrt(det);
  *nu_out = nu;
  if (std::abs(m(0, 1)) <= 1e-14 * nu && std::abs(m(0, 0) - m(1, 1)) <= 1e-14 * nu) {
    return Mat2::Identity();
  }
  Mat2 unit = m / nu;  // det 1, eigenvalues t and 1/t
  Eigen::SelfAdjointEigenSolver<Mat2> es(unit);
  const double t = es.eigenvalues()(1);  // ascending order, so this is t >= 1
  Mat2 q = es.eigenvectors();
  if (q.determinant() < 0.0) q.col(1) *= -1.0;
  Mat2 stretch = Mat2::Zero();
  stretch(0, 0) = std::sqrt(t);
  stretch(1, 1) = 1.0 / std::sqrt(t);
  // q^T unit q = diag(1/t, t), so stretch * q^T maps unit to the identity.
  return stretch * q.transpose();
}

}  // namespace

const Mat2& sigma_form() {
  static const Mat2 s = (Mat2() << 0.0, 1.0, -1.0, 0.0).finished();
  return s;
}

const Mat2& momentum_flip() {
  static const Mat2 r = (Mat2() << 1.0, 0.0, 0.0, -1.0).finished();
  return r;
}

const Mat4& omega_form() {
  static const Mat4 o = [] {
    Mat4 m = Mat4::Zero();
    m.topLeftCorner<2, 2>() = sigma_form();
    m.bottomRightCorner<2, 2>() = sigma_form();
    return m;
  }();
  return o;
}

const Mat4& ppt_flip() {
  static const Mat4 l = [] {
    Mat4 m = Mat4::Identity();
    m(3, 3) = -1.0;
    return m;
  }();
  return l;
}

OneModeCovariance OneModeCovariance::squeezed(double s) {
  OneModeCovariance g;
  g.m = Mat2::Zero();
  g.m(0, 0) = std::exp(2.0 * s);
  g.m(1, 1) = std::exp(-2.0 * s);
  return g;
}

TwoModeCovariance TwoModeCovariance::from_blocks(const Mat2& a, const Mat2& b, const Mat2& c) {
  Mat4 m;
  m.topLeftCorner<2, 2>() = a;
  m.bottomRightCorner<2, 2>() = b;
  m.topRightCorner<2, 2>() = c;
  m.bottomLeftCorner<2, 2>() = c.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  return {m};
}

GaussianCpMap GaussianCpMap::vacuum_replacement() {
  GaussianCpMap map;
  map.s = Mat2::Zero();
  map.g = Mat2::Identity();
  return map;
}

GaussianCpMap GaussianCpMap::diagonal(double x, double y, const Mat2& g) {
  GaussianCpMap map;
  map.s = Mat2::Zero();
  map.s(0, 0) = x;
  map.s(1, 1) = y;
  map.g = g;
  return map;
}

Mat4 tridiagonal_covariance(double a, double b, double c1, double c2) {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 1) = a;
  m(2, 2) = m(3, 3) = b;
  m(0, 2) = m(2, 0) = c1;
  m(1, 3) = m(3, 1) = c2;
  return m;
}

Mat4 StandardFormParams::tridiagonal() const { return tridiagonal_covariance(a, b, c1, c2); }

double physicality_margin(const OneModeCovariance& g) {
  require_symmetric(g.m, "one-mode covariance");
  return min_eigenvalue_with_form(g.m, sigma_form());
}

double physicality_margin(const TwoModeCovariance& g) {
  require_symmetric(g.m, "two-mode covariance");
  return min_eigenvalue_with_form(g.m, omega_form());
}

bool is_physical(const OneModeCovariance& g) { return physicality_margin(g) >= -kEigenvalueTol; }

bool is_physical(const TwoModeCovariance& g) { return physicality_margin(g) >= -kEigenvalueTol; }

bool is_pure(const OneModeCovariance& g) {
  return is_physical(g) && std::abs(g.m.determinant() - 1.0) <= kPurityTol;
}

bool is_valid_cp_map(const GaussianCpMap& map) {
  require_symmetric(map.g, "cp-map noise matrix");
  const double g11 = map.g(0, 0);
  const double g22 = map.g(1, 1);
  const double g12 = 0.5 * (map.g(0, 1) + map.g(1, 0));
  const double defect = 1.0 - map.s_det();
  if (g11 < -kEigenvalueTol || g22 < -kEigenvalueTol) return false;
  return g11 * g22 - g12 * g12 - defect * defect >= -kEigenvalueTol;
}

bool is_valid_cp_map_matrix(const GaussianCpMap& map) {
  require_symmetric(map.g, "cp-map noise matrix");
  const double defect = 1.0 - map.s_det();
  return min_eigenvalue_with_form(map.g, defect * sigma_form()) >= -kEigenvalueTol;
}

TwoModeCovariance make_tmsv_noisy(const ChannelParams& params) {
  if (!std::isfinite(params.r) || !std::isfinite(params.b0)) {
    throw ValidationError("channel parameters must be finite");
  }
  if (params.r < 0.0) throw ValidationError("squeezing parameter r must be >= 0");
  if (params.b0 < 0.0) throw ValidationError("added noise b0 must be >= 0");
  const double a = std::cosh(2.0 * params.r);
  const double c = std::sinh(2.0 * params.r);
  return {tridiagonal_covariance(a, a + params.b0, -c, c)};
}

TwoModeCovariance apply_cp_map_bob(const TwoModeCovariance& gamma, const GaussianCpMap& map) {
  if (!is_valid_cp_map(map)) throw ValidationError("map is not completely positive");
  if (!is_physical(gamma)) throw ValidationError("input covariance is not physical");
  const Mat2 a = gamma.block_a();
  const Mat2 b = gamma.block_b();
  const Mat2 c = gamma.block_c();
  return TwoModeCovariance::from_blocks(a, map.s * b * map.s.transpose() + map.g,
                                        c * map.s.transpose());
}

TwoModeCovariance apply_cp_map_alice(const TwoModeCovariance& gamma, const GaussianCpMap& map) {
  if (!is_valid_cp_map(map)) throw ValidationError("map is not completely positive");
  if (!is_physical(gamma)) throw ValidationError("input covariance is not physical");
  const Mat2 a = gamma.block_a();
  const Mat2 b = gamma.block_b();
  const Mat2 c = gamma.block_c();
  return TwoModeCovariance::from_blocks(map.s * a * map.s.transpose() + map.g, b, map.s * c);
}

namespace {

bool nearly_scalar_block(const Mat2& m, double tol) {
  return std::abs(m(0, 1)) <= tol && std::abs(m(1, 0)) <= tol && std::abs(m(0, 0) - m(1, 1)) <= tol;
}

bool sign_convention_holds(double c1, double c2) {
  const double tiny = 1e-12;
  if (c1 * c2 > tiny) return c1 > 0.0 && c2 > 0.0 && c1 >= c2 - tiny;
  return c1 <= tiny && c2 >= -tiny && std::abs(c1) >= std::abs(c2) - tiny;
}

}  // namespace

StandardFormParams to_standard_form(const TwoModeCovariance& gamma) {
  if (!is_physical(gamma)) throw ValidationError("covariance is not physical");
  const Mat2 a = gamma.block_a();
  const Mat2 b = gamma.block_b();
  const Mat2 c = gamma.block_c();

  StandardFormParams out;

  // Inputs already in canonical tridiagonal form pass through untouched so
  // exactly constructed channels keep their parameters bit for bit.
  const double tol = 1e-12;
  if (nearly_scalar_block(a, tol) && nearly_scalar_block(b, tol) && std::abs(c(0, 1)) <= tol &&
      std::abs(c(1, 0)) <= tol && sign_convention_holds(c(0, 0), c(1, 1))) {
    out.a = a(0, 0);
    out.b = b(0, 0);
    out.c1 = c(0, 0);
    out.c2 = c(1, 1);
    return out;
  }

  double nu_a = 0.0, nu_b = 0.0;
  Mat2 sa = isotropizing_symplectic(a, &nu_a);
  Mat2 sb = isotropizing_symplectic(b, &nu_b);

  Mat2 c1m = sa * c * sb.transpose();

  // Rotations are the residual freedom once both diagonal blocks are
  // isotropic; a rotation-only singular value decomposition diagonalizes the
  // cross block without disturbing them.
  if (c1m.cwiseAbs().maxCoeff() > 1e-14) {
    Eigen::JacobiSVD<Mat2> svd(c1m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat2 u = svd.matrixU();
    Mat2 v = svd.matrixV();
    Mat2 d = Mat2::Zero();
    d(0, 0) = svd.singularValues()(0);
    d(1, 1) = svd.singularValues()(1);
    if (u.determinant() < 0.0) {
      u.col(1) *= -1.0;
      d.row(1) *= -1.0;
    }
    if (v.determinant() < 0.0) {
      v.col(1) *= -1.0;
      d.col(1) *= -1.0;
    }
    sa = (u.transpose() * sa).eval();
    sb = (v.transpose() * sb).eval();
    // d(1,1) now carries the sign of det c; d(0,0) >= |d(1,1)| >= 0.
    if (d(1, 1) <= 0.0 && d(0, 0) > 0.0) {
      sa = (-sa).eval();  // rotation by pi on mode A flips both couplings
    }
  }

  const Mat2 cf = sa * c * sb.transpose();
  out.a = nu_a;
  out.b = nu_b;
  out.c1 = cf(0, 0);
  out.c2 = cf(1, 1);
  out.alice_symplectic = sa;
  out.bob_symplectic = sb;
  return out;
}

bool is_ppt_separable(const TwoModeCovariance& gamma) {
  if (!is_physical(gamma)) throw ValidationError("covariance is not physical");
  const Mat4 flipped = ppt_flip() * gamma.m * ppt_flip();
  return min_eigenvalue_with_form(flipped, omega_form()) >= -kEigenvalueTol;
}

}  // namespace cvtel
