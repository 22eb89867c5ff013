#include <doctest.h>

#include "sbd/ensembles.hpp"
#include "sbd/rng.hpp"
#include "sbd/solver.hpp"

using namespace sbd;

namespace {

CMat random_cmat(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  CMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

struct SmallProblem {
  MeasurementOperator op;
  GroundTruth gt;
  CVec y;
};

SmallProblem small_problem(std::uint64_t seed, int n = 16, int m = 24,
                           int k = 2, int j = 1) {
  MeasurementOperator op(gaussian_dictionary(n, m, derive_seed(seed, 0)),
                         dft_subspace(n, k));
  GroundTruth gt = random_ground_truth(m, k, j, derive_seed(seed, 1));
  // normalize the signal scale so prox thresholds at rho = 1 are in regime
  const Real scale = 1.0 / gt.X0.norm();
  gt.amplitudes *= scale;
  gt.X0 *= scale;
  CVec y = synthesize_measurements(gt, op.dictionary(), op.basis());
  return {std::move(op), std::move(gt), std::move(y)};
}

}  // namespace

TEST_CASE("l21 norm basics") {
  CHECK(l21_norm(CMat::Zero(3, 5)) == 0.0);
  CMat x = CMat::Zero(3, 2);
  CVec h = random_cmat(3, 1, 1).col(0);
  h /= h.norm();
  x.col(1) = 2.5 * h;
  CHECK(l21_norm(x) == doctest::Approx(2.5).epsilon(1e-12));

  const CMat r = random_cmat(4, 6, 2);
  Real brute = 0.0;
  for (int j = 0; j < 6; ++j) brute += r.col(j).norm();
  CHECK(l21_norm(r) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("block soft threshold") {
  SUBCASE("columns inside the ball vanish, closed form outside") {
    CMat x = CMat::Zero(2, 2);
    x(0, 0) = Complex(0.3, 0.0);
    x(0, 1) = Complex(2.0, 0.0);
    const CMat out = block_soft_threshold(x, 0.5);
    CHECK(out.col(0).norm() == 0.0);
    CHECK(std::abs(out(0, 1) - Complex(1.5, 0.0)) < 1e-14);
    CHECK_THROWS_AS(block_soft_threshold(x, 0.0), std::invalid_argument);
  }
  SUBCASE("prox optimality against a 1-D line search per column") {
    const Real tau = 0.7;
    const CMat x = random_cmat(1, 2, 5);
    const CMat z = block_soft_threshold(x, tau);
    auto objective = [&](const CMat& c) {
      return tau * l21_norm(c) + 0.5 * (c - x).squaredNorm();
    };
    const Real opt = objective(z);
    // the minimizer is colinear with x; scan magnitudes on that ray
    for (int j = 0; j < 2; ++j) {
      const Real mag = std::abs(x(0, j));
      for (Real t = 0.0; t <= mag; t += mag / 2000.0) {
        CMat cand = z;
        cand(0, j) = x(0, j) / mag * t;
        CHECK(objective(cand) >= opt - 1e-9);
      }
    }
  }
  SUBCASE("firm nonexpansiveness on random pairs") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const CMat x = random_cmat(3, 4, 100 + s);
      const CMat y = random_cmat(3, 4, 200 + s);
      const Real lhs =
          (block_soft_threshold(x, 0.9) - block_soft_threshold(y, 0.9))
              .norm();
      CHECK(lhs <= (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("noiseless solve: trivial input and exact recovery") {
  const auto prob = small_problem(3);
  SUBCASE("y = 0 short-circuits to zero") {
    const auto res = solve_noiseless(CVec::Zero(16), prob.op);
    CHECK(res.converged);
    CHECK(res.X_hat.norm() == 0.0);
  }
  SUBCASE("J=1 Gaussian instance is recovered to 1e-5") {
    const auto res = solve_noiseless(prob.y, prob.op);
    CHECK(res.converged);
    const Real rel = (res.X_hat - prob.gt.X0).norm() / prob.gt.X0.norm();
    CHECK(rel <= 1e-5);
    CHECK(res.feasibility_gap <= 10 * 1e-10);
    // optimality sandwich: X0 is feasible
    CHECK(res.objective <= l21_norm(prob.gt.X0) + 1e-6);
  }
  SUBCASE("phase equivariance") {
    const Complex phase = std::polar(1.0, 1.1);
    const auto base = solve_noiseless(prob.y, prob.op);
    const auto rotated = solve_noiseless(phase * prob.y, prob.op);
    CHECK((rotated.X_hat - phase * base.X_hat).norm() <=
          1e-8 * std::max(1.0, base.X_hat.norm()));
  }
  SUBCASE("decade-scale residual decrease") {
    SolverConfig cfg;
    cfg.record_residuals = true;
    const auto res = solve_noiseless(prob.y, prob.op, cfg);
    const auto& hist = res.residual_history;
    REQUIRE(hist.size() > 20);
    for (size_t k = 2; 10 * k < hist.size(); k = k * 2 + 1) {
      const Real early = std::max(hist[k].first, hist[k].second);
      const Real late =
          std::max(hist[10 * k].first, hist[10 * k].second);
      CHECK(late < early);
    }
  }
}

TEST_CASE("noisy solve") {
  const auto prob = small_problem(4, 16, 24, 2, 2);
  SUBCASE("eta covering the data returns zero") {
    const auto res = solve_noisy(prob.y, prob.op, 2.0 * prob.y.norm());
    CHECK(res.converged);
    CHECK(res.X_hat.norm() == 0.0);
    CHECK(res.objective == 0.0);
  }
  SUBCASE("eta = 0 matches the noiseless solver") {
    const auto eq = solve_noiseless(prob.y, prob.op);
    const auto ball = solve_noisy(prob.y, prob.op, 0.0);
    CHECK((eq.X_hat - ball.X_hat).norm() <=
          1e-8 * std::max(1.0, eq.X_hat.norm()));
  }
  SUBCASE("feasibility and objective bounds at a positive eta") {
    NoiseSpec spec;
    spec.eta = 0.05 * prob.y.norm();
    const auto noisy = add_noise(prob.y, spec, 77);
    const auto res = solve_noisy(noisy.y, prob.op, noisy.eta_actual);
    CHECK(res.converged);
    const Real gap = (prob.op.forward(res.X_hat) - noisy.y).norm();
    CHECK(gap <= noisy.eta_actual + 10 * 1e-10);
    // the true X0 is feasible, so the optimum cannot exceed its norm
    CHECK(res.objective <= l21_norm(prob.gt.X0) + 1e-6);
  }
  SUBCASE("rejects negative eta") {
    CHECK_THROWS_AS(solve_noisy(prob.y, prob.op, -1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("regularized solve") {
  const auto prob = small_problem(5);
  SUBCASE("large lambda yields the zero solution") {
    const Real thresh = prob.op.adjoint(prob.y).colwise().norm().maxCoeff();
    const auto res = solve_regularized(prob.y, prob.op, 1.1 * thresh);
    CHECK(res.X_hat.norm() <= 1e-8);
  }
  SUBCASE("first-order stationarity at a moderate lambda") {
    const Real lambda = 0.1;
    const auto res = solve_regularized(prob.y, prob.op, lambda);
    CHECK(res.converged);
    const CMat grad =
        prob.op.adjoint(prob.op.forward(res.X_hat) - prob.y);
    for (int j = 0; j < 24; ++j) {
      const Real col_norm = res.X_hat.col(j).norm();
      if (col_norm > 1e-9) {
        const CVec station =
            grad.col(j) + lambda * res.X_hat.col(j) / col_norm;
        CHECK(station.norm() <= 1e-6);
      } else {
        CHECK(grad.col(j).norm() <= lambda + 1e-6);
      }
    }
  }
  SUBCASE("matches a proximal-gradient oracle on a tiny instance") {
    // K=1, M=2, N=2 explicit instance
    MeasurementOperator op(
        Dictionary{random_cmat(2, 2, 8), EnsembleTag::kExplicit},
        dft_subspace(2, 1));
    const CVec y = random_cmat(2, 1, 9).col(0);
    const Real lambda = 0.3;
    SolverConfig cfg;
    cfg.tol_abs = 1e-12;
    cfg.tol_rel = 1e-12;
    cfg.max_iter = 200000;
    const auto res = solve_regularized(y, op, lambda, cfg);

    const Real lip = operator_norm_estimate(op).value;
    const Real step = 1.0 / (lip * lip);
    CMat x = CMat::Zero(1, 2);
    for (int it = 0; it < 200000; ++it) {
      const CMat g = op.adjoint(op.forward(x) - y);
      x = block_soft_threshold(x - step * g, lambda * step);
    }
    CHECK((res.X_hat - x).norm() <= 1e-8 * std::max(1.0, x.norm()));
  }
  SUBCASE("lambda -> 0 approaches the equality-constrained solution") {
    const auto exact = solve_noiseless(prob.y, prob.op);
    const Real scale =
        prob.op.adjoint(prob.y).colwise().norm().maxCoeff();
    Real prev = std::numeric_limits<Real>::infinity();
    for (Real lambda : {0.5 * scale, 0.05 * scale, 0.005 * scale}) {
      SolverConfig cfg;
      cfg.max_iter = 50000;
      const auto res = solve_regularized(prob.y, prob.op, lambda, cfg);
      const Real dist = (res.X_hat - exact.X_hat).norm() / exact.X_hat.norm();
      CHECK(dist < prev + 1e-12);
      prev = dist;
    }
    CHECK(prev < 0.05);
  }
  SUBCASE("rejects nonpositive lambda") {
    CHECK_THROWS_AS(solve_regularized(prob.y, prob.op, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("entrywise-l1 variant returns a feasible matrix") {
  const auto prob = small_problem(6, 16, 24, 2, 2);
  const Real eta = 0.01 * prob.y.norm();
  const auto res = solve_noisy_l1(prob.y, prob.op, eta);
  CHECK(res.converged);
  CHECK((prob.op.forward(res.X_hat) - prob.y).norm() <= eta + 1e-8);
}

TEST_CASE("shared Gram cache reproduces the cache-free solve") {
  const auto prob = small_problem(7);
  const GramCache cache(prob.op);
  const auto a = solve_noiseless(prob.y, prob.op);
  const auto b = solve_noiseless(prob.y, prob.op, {}, &cache);
  CHECK((a.X_hat - b.X_hat).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
}
