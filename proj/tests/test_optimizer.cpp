#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cvtel/fidelity.hpp"
#include "cvtel/gaussian_core.hpp"
#include "cvtel/optimizer.hpp"
#include "test_util.hpp"

using namespace cvtel;
using namespace cvtel::testutil;

namespace {

Mat2 objective_matrix(const ObjectiveQuadratic& obj) {
  Mat2 m;
  m << obj.alpha, obj.gamma_od, obj.gamma_od, obj.beta;
  return m;
}

double realized_fidelity(const TwoModeCovariance& gamma, const CandidateSolution& cand,
                         const OneModeCovariance* d) {
  TwoModeCovariance mapped = gamma;
  if (cand.side == Side::both) {
    mapped = apply_cp_map_bob(mapped, GaussianCpMap{cand.s_matrix, cand.g_matrix});
    mapped = apply_cp_map_alice(mapped, GaussianCpMap{cand.s_matrix_alice, cand.g_matrix_alice});
  } else if (cand.side == Side::bob) {
    mapped = apply_cp_map_bob(mapped, GaussianCpMap{cand.s_matrix, cand.g_matrix});
  } else {
    mapped = apply_cp_map_alice(mapped, GaussianCpMap{cand.s_matrix, cand.g_matrix});
  }
  return d ? teleport_fidelity(mapped, *d).value : swap_fidelity(mapped).value;
}

}  // namespace

TEST_CASE("optimal added noise for a fixed scaling") {
  std::mt19937_64 rng(31u);
  for (int trial = 0; trial < 300; ++trial) {
    ObjectiveQuadratic obj;
    obj.alpha = urand(rng, 0.3, 6.0);
    obj.beta = urand(rng, 0.3, 6.0);
    obj.gamma_od = urand(rng, -0.9, 0.9) * std::sqrt(obj.alpha * obj.beta);
    const double disc = obj.alpha * obj.beta - obj.gamma_od * obj.gamma_od;
    if (disc <= 0.02) continue;
    const double s = urand(rng, -2.0, 2.0);
    const Mat2 g = optimal_g_for_s(obj, s);
    const double defect = (1.0 - s) * (1.0 - s);

    // Saturates the complete-positivity constraint exactly.
    CHECK(g.determinant() == doctest::Approx(defect).epsilon(1e-12));
    if (std::abs(obj.gamma_od) > 1e-12 && std::abs(1.0 - s) > 1e-12) {
      CHECK(g(0, 1) * obj.gamma_od > 0.0);
    }
    CHECK(g(0, 0) >= 0.0);
    CHECK(g(1, 1) >= 0.0);

    const double det = (objective_matrix(obj) + g).determinant();
    const double target = objective_determinant(obj, s);
    CHECK(det == doctest::Approx(target).epsilon(1e-12));
    const double root = std::abs(1.0 - s) + std::sqrt(disc);
    CHECK(target == doctest::Approx(root * root).epsilon(1e-12));
  }
}

TEST_CASE("no admissible noise beats the closed-form choice") {
  std::mt19937_64 rng(32u);
  for (int trial = 0; trial < 100; ++trial) {
    ObjectiveQuadratic obj;
    obj.alpha = urand(rng, 0.5, 4.0);
    obj.beta = urand(rng, 0.5, 4.0);
    obj.gamma_od = urand(rng, -0.8, 0.8) * std::sqrt(obj.alpha * obj.beta);
    if (obj.alpha * obj.beta - obj.gamma_od * obj.gamma_od <= 0.02) continue;
    const double s = urand(rng, -1.5, 1.5);
    const double defect = (1.0 - s) * (1.0 - s);
    const double best = objective_determinant(obj, s);

    const auto det_of = [&](const std::vector<double>& p) {
      const double g11 = std::abs(p[0]);
      const double g22 = std::abs(p[1]);
      const double slack = g11 * g22 - defect;
      if (slack < 0.0) return best + 1.0 - slack;  // infeasible: no real g12
      const double g12 = (obj.gamma_od >= 0.0 ? 1.0 : -1.0) * std::sqrt(slack);
      Mat2 g;
      g << g11, g12, g12, g22;
      return (objective_matrix(obj) + g).determinant();
    };
    const Mat2 g_star = optimal_g_for_s(obj, s);
    const std::vector<double> found =
        simplex_minimize(det_of, {g_star(0, 0) + 0.3, g_star(1, 1) + 0.3}, 0.2, 400);
    CHECK(det_of(found) >= best - 1e-8);
  }
}

TEST_CASE("degenerate objective is rejected") {
  ObjectiveQuadratic flat;
  flat.alpha = 1.0;
  flat.beta = 1.0;
  flat.gamma_od = 1.0;
  CHECK_THROWS_AS(optimal_g_for_s(flat, 0.5), ComputationError);
  flat.gamma_od = 2.0;  // negative discriminant
  CHECK_THROWS_AS(objective_determinant(flat, 0.5), ComputationError);
}

TEST_CASE("advantage threshold of the noisy squeezed family") {
  CHECK(cp_advantage_threshold(0.5) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
  CHECK(cp_advantage_threshold(0.0) == 0.0);
  CHECK(std::isinf(cp_advantage_threshold(1.0)));
  CHECK(std::isinf(cp_advantage_threshold(1.5)));
  CHECK_THROWS_AS(cp_advantage_threshold(-0.1), ValidationError);
  // Continuity from below: 1 - b0 = exp(-2 r) at the threshold.
  for (double b0 : {0.2, 0.5, 0.8}) {
    const double r = cp_advantage_threshold(b0);
    CHECK(1.0 - b0 == doctest::Approx(std::exp(-2.0 * r)).epsilon(1e-12));
  }
}

TEST_CASE("interior roots of the reduced problem") {
  // Below the threshold the smaller-denominator root is the true stationary
  // point; the other solves the extremal equations on the wrong branch.
  const double r = 0.2, b0 = 0.5;
  REQUIRE(r < cp_advantage_threshold(b0));
  const StandardFormParams sf = to_standard_form(make_tmsv_noisy({r, b0}));
  const CandidateList list = interior_candidates(sf, OneModeCovariance::coherent());
  REQUIRE(list.candidates.size() == 2);
  const double c = std::sinh(2.0 * r);
  const double b = std::cosh(2.0 * r) + b0;
  std::vector<double> xs = {list.candidates[0].x, list.candidates[1].x};
  std::sort(xs.begin(), xs.end());
  CHECK(std::min(xs[0], xs[1]) == doctest::Approx(c / (b + 1.0)).epsilon(1e-10));
  CHECK(std::max(xs[0], xs[1]) == doctest::Approx(c / (b - 1.0)).epsilon(1e-10));
  for (const CandidateSolution& cand : list.candidates) {
    CHECK(cand.kind == CandidateKind::interior_root);
    CHECK(cand.y == doctest::Approx(cand.x).epsilon(1e-10));
    const bool is_outer = std::abs(cand.x - c / (b - 1.0)) < 1e-8;
    CHECK(cand.branch_sign == (is_outer ? 1.0 : -1.0));
    CHECK(cand.stationary == is_outer);
    // The attached noise saturates complete positivity.
    CHECK(cand.g_matrix.determinant() ==
          doctest::Approx((1.0 - cand.x * cand.y) * (1.0 - cand.x * cand.y)).epsilon(1e-10));
  }
}

TEST_CASE("interior root turns non-stationary above the threshold") {
  const double r = 0.6, b0 = 0.5;
  REQUIRE(r > cp_advantage_threshold(b0));
  const StandardFormParams sf = to_standard_form(make_tmsv_noisy({r, b0}));
  const CandidateList list = interior_candidates(sf, OneModeCovariance::coherent());
  REQUIRE(list.candidates.size() == 2);
  const double c = std::sinh(1.2);
  const double b = std::cosh(1.2) + 0.5;
  for (const CandidateSolution& cand : list.candidates) {
    CHECK(!cand.stationary);
    if (cand.branch_sign > 0.0) {
      CHECK(cand.x == doctest::Approx(c / (b - 1.0)).epsilon(1e-10));
      CHECK(cand.x * cand.y > 1.0);
    }
  }
}

TEST_CASE("stationary interior roots kill the gradient") {
  std::mt19937_64 rng(33u);
  for (int trial = 0; trial < 30; ++trial) {
    const TwoModeCovariance gamma = random_diagonal_channel(rng);
    const StandardFormParams sf = to_standard_form(gamma);
    const OneModeCovariance d = OneModeCovariance::coherent();
    const CandidateList list = interior_candidates(sf, d);
    const auto f = [&](double x, double y) {
      const double alpha = 2.0 + sf.a + 2.0 * sf.c1 * x + sf.b * x * x;
      const double beta = 2.0 + sf.a - 2.0 * sf.c2 * y + sf.b * y * y;
      return std::abs(1.0 - x * y) + std::sqrt(alpha * beta);
    };
    for (const CandidateSolution& cand : list.candidates) {
      if (!cand.stationary) continue;
      if (std::abs(1.0 - cand.x * cand.y) < 1e-4) continue;  // kink nearby
      const double h = 1e-6;
      const double dx = (f(cand.x + h, cand.y) - f(cand.x - h, cand.y)) / (2.0 * h);
      const double dy = (f(cand.x, cand.y + h) - f(cand.x, cand.y - h)) / (2.0 * h);
      CAPTURE(sf.a);
      CAPTURE(sf.b);
      CAPTURE(sf.c1);
      CAPTURE(sf.c2);
      CHECK(std::abs(dx) < 1e-4);
      CHECK(std::abs(dy) < 1e-4);
    }
  }
}

TEST_CASE("boundary roots of the symmetric family are the unit scalings") {
  const StandardFormParams sf = to_standard_form(make_tmsv_noisy({0.3, 0.4}));
  const CandidateList list = boundary_candidates(sf, OneModeCovariance::coherent());
  REQUIRE(list.candidates.size() == 2);
  CHECK(list.candidates[0].x == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(list.candidates[1].x == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(list.candidates[0].objective <= list.candidates[1].objective);
  for (const CandidateSolution& cand : list.candidates) {
    CHECK(cand.kind == CandidateKind::boundary_root);
    CHECK(std::abs(cand.x * cand.y - 1.0) < 1e-12);
    CHECK(cand.g_matrix.isZero(0.0));
  }
}

TEST_CASE("boundary stationarity along the symplectic curve") {
  std::mt19937_64 rng(34u);
  for (int trial = 0; trial < 20; ++trial) {
    const TwoModeCovariance gamma = random_diagonal_channel(rng);
    const StandardFormParams sf = to_standard_form(gamma);
    const CandidateList list = boundary_candidates(sf, OneModeCovariance::coherent());
    CHECK(!list.candidates.empty());
    const auto f = [&](double x) {
      const double alpha = 2.0 + sf.a + 2.0 * sf.c1 * x + sf.b * x * x;
      const double beta = 2.0 + sf.a - 2.0 * sf.c2 / x + sf.b / (x * x);
      return std::sqrt(alpha * beta);
    };
    for (std::size_t i = 0; i + 1 < list.candidates.size(); ++i) {
      CHECK(list.candidates[i].objective <= list.candidates[i + 1].objective + 1e-12);
    }
    for (const CandidateSolution& cand : list.candidates) {
      const double h = 1e-6 * std::max(1.0, std::abs(cand.x));
      const double df = (f(cand.x + h) - f(cand.x - h)) / (2.0 * h);
      CHECK(std::abs(df) < 1e-3);
    }
  }
}

TEST_CASE("noisy squeezed channel below threshold: scaling map wins") {
  const double r = 0.2, b0 = 0.5;
  const TwoModeCovariance gamma = make_tmsv_noisy({r, b0});
  const OptimizationResult res =
      optimize_one_sided(gamma, OneModeCovariance::coherent(), Side::bob);
  CHECK(res.best.kind == CandidateKind::interior_root);
  const double c = std::sinh(2.0 * r);
  const double b = std::cosh(2.0 * r) + b0;
  CHECK(res.best.x == doctest::Approx(c / (b - 1.0)).epsilon(1e-10));
  CHECK(res.best.y == doctest::Approx(res.best.x).epsilon(1e-10));
  CHECK(!res.used_numeric_fallback);

  const double f_identity =
      teleport_fidelity(gamma, OneModeCovariance::coherent()).value;
  CHECK(res.best.fidelity > f_identity + 1e-6);
  CHECK(res.best.fidelity ==
        doctest::Approx(realized_fidelity(gamma, res.best, &res.input_d)).epsilon(1e-12));

  // The closed-form value: objective (|1 - x^2| + alpha(x))^2 at the root.
  const double x = res.best.x;
  const double alpha = 2.0 + std::cosh(2.0 * r) + 2.0 * (-c) * x + b * x * x;
  const double f_root = std::abs(1.0 - x * x) + alpha;
  CHECK(res.best.fidelity == doctest::Approx(2.0 / f_root).epsilon(1e-12));
}

TEST_CASE("noisy squeezed channel above threshold: doing nothing wins") {
  const TwoModeCovariance gamma = make_tmsv_noisy({0.6, 0.5});
  const OptimizationResult all =
      optimize_one_sided(gamma, OneModeCovariance::coherent(), Side::bob);
  CHECK(all.best.kind == CandidateKind::identity);
  CHECK(all.best.x == 1.0);
  CHECK(all.best.s_matrix == Mat2::Identity());
  CHECK(all.best.g_matrix.isZero(0.0));

  const OptimizationResult sympl = optimize_one_sided(
      gamma, OneModeCovariance::coherent(), Side::bob, CandidateFilter::symplectic_only);
  CHECK(std::abs(all.best.fidelity - sympl.best.fidelity) < 1e-10);
}

TEST_CASE("candidate filters restrict the families") {
  const TwoModeCovariance gamma = make_tmsv_noisy({0.2, 0.5});
  const OptimizationResult sympl = optimize_one_sided(
      gamma, OneModeCovariance::coherent(), Side::bob, CandidateFilter::symplectic_only);
  for (const CandidateSolution& cand : sympl.all_candidates) {
    CHECK((cand.kind == CandidateKind::identity || cand.kind == CandidateKind::boundary_root));
    CHECK(std::abs(cand.s_matrix.determinant() - 1.0) < 1e-9);
  }
  const OptimizationResult noop = optimize_one_sided(
      gamma, OneModeCovariance::coherent(), Side::bob, CandidateFilter::no_op_only);
  REQUIRE(noop.all_candidates.size() == 1);
  CHECK(noop.best.kind == CandidateKind::identity);
  CHECK(noop.best.fidelity ==
        doctest::Approx(teleport_fidelity(gamma, OneModeCovariance::coherent()).value)
            .epsilon(1e-14));
}

TEST_CASE("vacuum replacement candidate value") {
  std::mt19937_64 rng(35u);
  for (int trial = 0; trial < 10; ++trial) {
    const TwoModeCovariance gamma = random_diagonal_channel(rng);
    const StandardFormParams sf = to_standard_form(gamma);
    const OptimizationResult res =
        optimize_one_sided(gamma, OneModeCovariance::coherent(), Side::bob);
    bool saw_vacuum = false;
    for (const CandidateSolution& cand : res.all_candidates) {
      if (cand.kind != CandidateKind::vacuum_replacement) continue;
      saw_vacuum = true;
      CHECK(cand.fidelity == doctest::Approx(2.0 / (3.0 + sf.a)).epsilon(1e-12));
      CHECK(cand.s_matrix.isZero(1e-12));
      CHECK(cand.g_matrix.determinant() == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(saw_vacuum);
  }
}

TEST_CASE("identity channel: doing nothing is optimal and flagged degenerate") {
  const TwoModeCovariance gamma;  // vacuum on both modes
  const OptimizationResult res =
      optimize_one_sided(gamma, OneModeCovariance::coherent(), Side::bob);
  CHECK(res.best.kind == CandidateKind::identity);
  CHECK(res.best.fidelity == doctest::Approx(0.5).epsilon(1e-12));
  bool degenerate_note = false;
  for (const std::string& note : res.notes) {
    if (note.find("degenerated") != std::string::npos) degenerate_note = true;
  }
  CHECK(degenerate_note);
}

TEST_CASE("swap target, uncorrelated noisy channel: vacuum replacement") {
  TwoModeCovariance gamma = make_tmsv_noisy({0.0, 0.5});
  const OptimizationResult res = optimize_swap_one_sided(gamma, Side::bob);
  CHECK(res.best.kind == CandidateKind::vacuum_replacement);
  CHECK(res.best.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.target == Target::swap_fidelity);
  // No entanglement anywhere in this family at r = 0: the swap figure cannot
  // exceed the classical ceiling.
  for (const CandidateSolution& cand : res.all_candidates) {
    CHECK(cand.fidelity <= 1.0 + 1e-9);
  }
}

TEST_CASE("two-sided swap: vacuum on both sides when the channel is classical") {
  const TwoModeCovariance gamma = make_tmsv_noisy({0.0, 0.5});
  const OptimizationResult res = optimize_swap_two_sided(gamma);
  CHECK(res.best.kind == CandidateKind::vacuum_replacement);
  CHECK(res.best.side == Side::both);
  CHECK(res.best.fidelity == 1.0);
  CHECK(res.best.s_matrix.isZero(0.0));
  CHECK(res.best.s_matrix_alice.isZero(0.0));
  CHECK((res.best.g_matrix - Mat2::Identity()).isZero(0.0));
}

TEST_CASE("two-sided swap: pure squeezed resource keeps the identity") {
  const TwoModeCovariance gamma = make_tmsv_noisy({0.5, 0.0});
  const OptimizationResult res = optimize_swap_two_sided(gamma);
  CHECK(res.best.kind == CandidateKind::bob_side);
  CHECK((res.best.s_matrix - Mat2::Identity()).isZero(1e-12));
  CHECK(res.best.g_matrix.isZero(1e-12));
  CHECK((res.best.s_matrix_alice - Mat2::Identity()).isZero(1e-12));
  CHECK(res.best.fidelity == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("two-sided swap equals the best of the three strategies") {
  std::mt19937_64 rng(36u);
  for (int trial = 0; trial < 25; ++trial) {
    const TwoModeCovariance gamma =
        trial % 2 == 0 ? random_entangled_diagonal(rng) : random_physical_two_mode(rng);
    const OptimizationResult two = optimize_swap_two_sided(gamma);
    const double bob = optimize_swap_one_sided(gamma, Side::bob).best.fidelity;
    const double alice = optimize_swap_one_sided(gamma, Side::alice).best.fidelity;
    const double expect = std::max({bob, alice, 1.0});
    CHECK(two.best.fidelity == doctest::Approx(expect).epsilon(1e-10));
    CHECK(two.best.fidelity ==
          doctest::Approx(realized_fidelity(gamma, two.best, nullptr)).epsilon(1e-9));
    for (const CandidateSolution& cand : two.all_candidates) {
      CHECK(cand.side == Side::both);
      CHECK(is_valid_cp_map(GaussianCpMap{cand.s_matrix, cand.g_matrix}));
      CHECK(is_valid_cp_map(GaussianCpMap{cand.s_matrix_alice, cand.g_matrix_alice}));
    }
  }
}

TEST_CASE("every reported candidate is a valid map achieving its fidelity") {
  std::mt19937_64 rng(37u);
  for (int trial = 0; trial < 50; ++trial) {
    TwoModeCovariance gamma;
    if (trial % 3 == 0) {
      gamma = random_diagonal_channel(rng);
    } else if (trial % 3 == 1) {
      const TwoModeCovariance base = random_diagonal_channel(rng);
      const Mat4 local =
          direct_sum(random_local_symplectic(rng), random_local_symplectic(rng));
      gamma.m = local * base.m * local.transpose();
      gamma.m = 0.5 * (gamma.m + gamma.m.transpose());
    } else {
      gamma = random_physical_two_mode(rng);
    }
    for (Side side : {Side::bob, Side::alice}) {
      const OneModeCovariance inputs[2] = {OneModeCovariance::coherent(),
                                           random_pure_input(rng)};
      for (const OneModeCovariance& d : inputs) {
        const OptimizationResult res = optimize_one_sided(gamma, d, side);
        CHECK(!res.all_candidates.empty());
        for (const CandidateSolution& cand : res.all_candidates) {
          CAPTURE(trial);
          CAPTURE(to_string(cand.kind));
          CHECK(is_valid_cp_map(GaussianCpMap{cand.s_matrix, cand.g_matrix}));
          CHECK(cand.fidelity ==
                doctest::Approx(realized_fidelity(gamma, cand, &d)).epsilon(1e-9));
          CHECK(cand.fidelity <= res.best.fidelity + 1e-10);
        }
      }
      const OptimizationResult swp = optimize_swap_one_sided(gamma, side);
      for (const CandidateSolution& cand : swp.all_candidates) {
        CAPTURE(trial);
        CAPTURE(to_string(cand.kind));
        CHECK(is_valid_cp_map(GaussianCpMap{cand.s_matrix, cand.g_matrix}));
        CHECK(cand.fidelity ==
              doctest::Approx(realized_fidelity(gamma, cand, nullptr)).epsilon(1e-9));
        CHECK(cand.fidelity <= swp.best.fidelity + 1e-10);
      }
    }
  }
}

TEST_CASE("derivative-free search agrees with the closed forms") {
  std::mt19937_64 rng(38u);
  const OneModeCovariance d = OneModeCovariance::coherent();
  for (int trial = 0; trial < 25; ++trial) {
    const TwoModeCovariance gamma = random_diagonal_channel(rng);
    const OptimizationResult analytic = optimize_one_sided(gamma, d, Side::bob);
    const OptimizationResult numeric = optimize_numeric_fallback(gamma, &d, Side::bob);
    CHECK(numeric.converged);
    CHECK(numeric.used_numeric_fallback);
    CHECK(numeric.best.fidelity >= analytic.best.fidelity - 1e-7);
    CHECK(numeric.best.fidelity <= analytic.best.fidelity + 1e-6);
  }
}

TEST_CASE("non-diagonal transported input routes to the numeric fallback") {
  std::mt19937_64 rng(39u);
  const TwoModeCovariance base = random_diagonal_channel(rng);
  // A sheared channel frame makes the transported input non-diagonal (a pure
  // rotation would not: it maps the identity input to itself).
  Mat2 squeeze = Mat2::Zero();
  squeeze(0, 0) = std::exp(0.35);
  squeeze(1, 1) = std::exp(-0.35);
  const Mat4 local = direct_sum(rotation(0.7) * squeeze * rotation(0.2), rotation(-0.4));
  TwoModeCovariance gamma;
  gamma.m = local * base.m * local.transpose();
  const OneModeCovariance d = OneModeCovariance::coherent();
  const OptimizationResult res = optimize_one_sided(gamma, d, Side::bob);
  CHECK(res.used_numeric_fallback);
  bool note_found = false;
  for (const std::string& note : res.notes) {
    if (note.find("derivative-free") != std::string::npos) note_found = true;
  }
  CHECK(note_found);
  for (const CandidateSolution& cand : res.all_candidates) {
    CHECK(is_valid_cp_map(GaussianCpMap{cand.s_matrix, cand.g_matrix}));
    CHECK(cand.fidelity ==
          doctest::Approx(realized_fidelity(gamma, cand, &d)).epsilon(1e-9));
  }
}

TEST_CASE("argument validation") {
  const TwoModeCovariance gamma = make_tmsv_noisy({0.3, 0.1});
  OneModeCovariance thermal;
  thermal.m = 1.5 * Mat2::Identity();
  CHECK_THROWS_AS(optimize_one_sided(gamma, thermal, Side::bob), ValidationError);
  CHECK_THROWS_AS(optimize_one_sided(gamma, OneModeCovariance::coherent(), Side::both),
                  ValidationError);
  CHECK_THROWS_AS(optimize_swap_one_sided(gamma, Side::both), ValidationError);
  TwoModeCovariance bad;
  bad.m = tridiagonal_covariance(1.2, 1.2, -1.5, 1.5);
  CHECK_THROWS_AS(optimize_one_sided(bad, OneModeCovariance::coherent(), Side::bob),
                  ValidationError);
}

TEST_CASE("alice-side optimization mirrors the swapped channel") {
  // Swapping the two modes (and the correlation signs into convention) turns
  // an alice-side problem into a bob-side one.
  std::mt19937_64 rng(40u);
  for (int trial = 0; trial < 10; ++trial) {
    const TwoModeCovariance gamma = random_diagonal_channel(rng);
    const OptimizationResult alice =
        optimize_one_sided(gamma, OneModeCovariance::coherent(), Side::alice);
    CHECK(alice.best.side == Side::alice);
    CHECK(alice.best.fidelity ==
          doctest::Approx(realized_fidelity(gamma, alice.best, &alice.input_d))
              .epsilon(1e-9));
    // The alice-side optimum can never do worse than vacuum replacement.
    const StandardFormParams sf = to_standard_form(gamma);
    CHECK(alice.best.fidelity >= 2.0 / (3.0 + sf.b) - 1e-12);
  }
}
