#include "cvtel/fidelity.hpp"

#include <cmath>
#include <sstream>

namespace cvtel {

Mat2 noise_matrix(const TwoModeCovariance& gamma) {
  if (!is_physical(gamma)) throw ValidationError("resource covariance is not physical");
  const Mat2& r = momentum_flip();
  const Mat2 a = gamma.block_a();
  const Mat2 b = gamma.block_b();
  const Mat2 c = gamma.block_c();
  Mat2 e = r * a * r.transpose() + r * c + c.transpose() * r.transpose() + b;
  return 0.5 * (e + e.transpose()).eval();
}

FidelityValue teleport_fidelity(const TwoModeCovariance& gamma, const OneModeCovariance& d) {
  if (!is_physical(d)) throw ValidationError("input covariance is not physical");
  const double det_d = d.m.determinant();
  if (std::abs(det_d - 1.0) > kPurityTol) {
    std::ostringstream os;
    os << "input state must be pure (det " << det_d
       << "); for the input-independent figure use swap_fidelity";
    throw ValidationError(os.str());
  }
  FidelityValue out;
  out.kind = FidelityKind::pure_state_fidelity;
  out.e_matrix = noise_matrix(gamma);
  const double det = (2.0 * d.m + out.e_matrix).determinant();
  if (det <= 0.0) throw ComputationError("degenerate output covariance in fidelity");
  out.value = 2.0 / std::sqrt(det);
  return out;
}

FidelityValue swap_fidelity(const TwoModeCovariance& gamma) {
  FidelityValue out;
  out.kind = FidelityKind::swap_fidelity;
  out.e_matrix = noise_matrix(gamma);
  const double det = out.e_matrix.determinant();
  if (det <= 0.0) throw ComputationError("degenerate excess-noise matrix in swap fidelity");
  out.value = 2.0 / std::sqrt(det);
  return out;
}

OneModeCovariance output_covariance(const TwoModeCovariance& gamma, const OneModeCovariance& d_in) {
  if (!is_physical(d_in)) throw ValidationError("input covariance is not physical");
  return {d_in.m + noise_matrix(gamma)};
}

}  // namespace cvtel
