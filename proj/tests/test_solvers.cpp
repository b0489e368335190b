#include <doctest.h>

#include "pnp/metrics.hpp"
#include "pnp/phantom.hpp"
#include "pnp/solvers.hpp"

#include <cmath>

using namespace pnp;

namespace {

Image small_truth(int grid, std::uint64_t seed) {
  PhantomSpec ps;
  ps.grid = grid;
  ps.seed = seed;
  return phantom_generate(ps);
}

MeasurementModel small_model(int grid = 8, std::size_t m = 48, std::size_t comps = 4, std::uint64_t seed = 3) {
  const Image truth = small_truth(grid, seed);
  return build_gaussian_model(static_cast<std::size_t>(grid * grid), m, comps, seed, truth, 30.0);
}

// Normal-equation minimizer of d.
RealVec least_squares(const MeasurementModel& model) {
  const auto n = static_cast<Eigen::Index>(model.input_dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : model.components()) {
    const ComplexMat h = materialize(*c.op);
    a += (h.adjoint() * h).real();
  }
  a /= static_cast<double>(model.num_components());
  return a.lu().solve(model.mean_adjoint_data());
}

}  // namespace

TEST_CASE("fista q recursion") {
  CHECK(fista_q_update(1.0) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(std::abs(fista_q_update(1.0) - 1.6180339887) <= 1e-10);
  // iterating the recursion from the golden ratio gives 2.19352708533105...
  CHECK(std::abs(fista_q_update(fista_q_update(1.0)) - 2.1935270853) <= 1e-10);
  double q = 1.0;
  for (int k = 1; k <= 50; ++k) {
    const double next = fista_q_update(q);
    CHECK(next > q);
    CHECK(next >= (k + 2) / 2.0);
    q = next;
  }
  CHECK_THROWS_AS(fista_q_update(0.5), ConfigError);
}

TEST_CASE("operator P") {
  const auto model = small_model();
  const IdentityDenoiser id;
  const RealVec xls = least_squares(model);
  CHECK((operator_P(model, id, 1.0 / model.lipschitz(), 1.0, xls) - xls).norm() <= 1e-10 * xls.norm());

  const double gamma = 1.0 / model.lipschitz();
  const double lambda = 0.02;
  const TvRegularizer reg(lambda, 8, 8);
  const TvDenoiser tv(8, 8);
  const RealVec x = small_truth(8, 9).pixels;
  const RealVec ista_step = reg.prox(x - gamma * grad_full(model, x), gamma);
  CHECK((operator_P(model, tv, gamma, std::sqrt(gamma * lambda), x) - ista_step).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("zero iterations return x0") {
  const auto model = small_model();
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.iterations = 0;
  cfg.x0 = small_truth(8, 4).pixels;
  const IdentityDenoiser id;
  const ZeroRegularizer zero;
  for (const auto& r : {run_ista(model, zero, cfg), run_admm(model, zero, cfg), run_pnp_ista(model, id, cfg),
                        run_pnp_admm(model, id, cfg), run_pnp_sgd(model, id, cfg)}) {
    CHECK(r.x == *cfg.x0);
    CHECK(r.trace.records.size() == 1);
    CHECK(r.iterations_run == 0);
  }
}

TEST_CASE("least squares by ista, admm and pnp-admm") {
  const auto model = small_model();
  const RealVec xls = least_squares(model);
  const ZeroRegularizer zero;
  const IdentityDenoiser id;
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.iterations = 3000;
  cfg.q_schedule = QSchedule::Fista;
  const auto ista = run_ista(model, zero, cfg);
  CHECK(grad_full(model, ista.x).norm() <= 1e-6);
  CHECK((ista.x - xls).norm() <= 1e-6 * xls.norm());

  cfg.q_schedule = QSchedule::Constant1;
  cfg.iterations = 300;
  const auto admm = run_admm(model, zero, cfg);
  CHECK((admm.x - xls).norm() <= 1e-6 * xls.norm());
  const auto padmm = run_pnp_admm(model, id, cfg);
  CHECK((padmm.x - xls).norm() <= 1e-6 * xls.norm());
  CHECK(admm.cg_warnings == 0);
}

TEST_CASE("admm with a zero-fidelity model keeps x0") {
  std::vector<MeasurementComponent> comps;
  comps.push_back({std::make_shared<ZeroOperator>(8, 16), ComplexVec::Zero(8)});
  const MeasurementModel model(std::move(comps), 1.0);
  SolverConfig cfg;
  cfg.iterations = 20;
  cfg.x0 = RealVec::LinSpaced(16, -1.0, 1.0);
  const auto r = run_admm(model, ZeroRegularizer(), cfg);
  CHECK((r.x - *cfg.x0).norm() <= 1e-14);
}

TEST_CASE("fista objective lower than ista at k = 50") {
  const Image truth = small_truth(8, 5);
  const auto model = build_gaussian_model(64, 12, 1, 11, truth, 30.0);
  const TvRegularizer reg(0.01, 8, 8);
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.iterations = 50;
  const double f_ista = objective(model, reg, run_ista(model, reg, cfg).x);
  cfg.q_schedule = QSchedule::Fista;
  const double f_fista = objective(model, reg, run_ista(model, reg, cfg).x);
  CHECK(f_fista <= f_ista);
}

TEST_CASE("admm and ista agree on the TV objective") {
  const auto model = small_model();
  const TvRegularizer reg(0.01, 8, 8);
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.iterations = 4000;
  cfg.q_schedule = QSchedule::Fista;
  cfg.record_trace = false;
  const double f_ista = objective(model, reg, run_ista(model, reg, cfg).x);
  cfg.q_schedule = QSchedule::Constant1;
  cfg.iterations = 1000;
  const double f_admm = objective(model, reg, run_admm(model, reg, cfg).x);
  CHECK(std::abs(f_admm - f_ista) <= 1e-5 * std::abs(f_ista));
}

TEST_CASE("pnp-ista with tv prox reproduces ista") {
  const auto model = small_model();
  const double gamma = 1.0 / model.lipschitz();
  const double lambda = 0.015;
  const TvRegularizer reg(lambda, 8, 8);
  const TvDenoiser tv(8, 8);
  SolverConfig cfg;
  cfg.gamma = gamma;
  cfg.sigma = std::sqrt(gamma * lambda);
  cfg.iterations = 100;
  cfg.q_schedule = QSchedule::Fista;
  const auto a = run_ista(model, reg, cfg);
  const auto b = run_pnp_ista(model, tv, cfg);
  REQUIRE(a.trace.iterates.size() == b.trace.iterates.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.trace.iterates.size(); ++k)
    worst = std::max(worst, (a.trace.iterates[k] - b.trace.iterates[k]).lpNorm<Eigen::Infinity>());
  CHECK(worst <= 10 * 1e-11);
}

TEST_CASE("identity denoiser gives gradient descent") {
  const auto model = small_model();
  SolverConfig cfg;
  cfg.gamma = 0.5 / model.lipschitz();
  cfg.iterations = 5;
  const auto r = run_pnp_ista(model, IdentityDenoiser(), cfg);
  RealVec x = RealVec::Zero(64);
  for (int k = 0; k < 5; ++k) x = x - cfg.gamma * grad_full(model, x);
  CHECK((r.x - x).norm() == 0.0);
}

TEST_CASE("pnp-ista and pnp-admm share fixed points") {
  const auto model = small_model();
  const AveragedFilterDenoiser filt(8, 8);
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.sigma = 0.7;
  cfg.iterations = 3000;
  cfg.record_trace = false;
  const auto ista = run_pnp_ista(model, filt, cfg);
  cfg.iterations = 1500;
  const auto admm = run_pnp_admm(model, filt, cfg);
  CHECK(dist_to_fix(model, filt, cfg.gamma, cfg.sigma, ista.x) <= 1e-10);
  CHECK(dist_to_fix(model, filt, cfg.gamma, cfg.sigma, admm.x) <= 1e-8);
  CHECK((ista.x - admm.x).norm() <= 1e-4 * ista.x.norm());
}

TEST_CASE("pnp-sgd full batch equals pnp-ista") {
  const auto model = small_model();
  const AveragedFilterDenoiser filt(8, 8);
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.sigma = 0.7;
  cfg.iterations = 40;
  cfg.q_schedule = QSchedule::Fista;
  cfg.record_timing = false;
  cfg.batch = model.num_components();
  cfg.sampling = SamplingMode::FullBatch;
  const auto a = run_pnp_sgd(model, filt, cfg);
  const auto b = run_pnp_ista(model, filt, cfg);
  CHECK(a.x == b.x);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  for (std::size_t k = 0; k < a.trace.records.size(); ++k) {
    CHECK(a.trace.records[k].dist == b.trace.records[k].dist);
    CHECK(a.trace.records[k].indices.empty());
  }
}

TEST_CASE("pnp-sgd is seed deterministic") {
  const auto model = small_model();
  const AveragedFilterDenoiser filt(8, 8);
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.sigma = 0.7;
  cfg.iterations = 30;
  cfg.batch = 2;
  cfg.seed = 77;
  cfg.record_timing = false;
  const auto a = run_pnp_sgd(model, filt, cfg);
  const auto b = run_pnp_sgd(model, filt, cfg);
  CHECK(a.x == b.x);
  for (std::size_t k = 1; k < a.trace.records.size(); ++k) {
    CHECK(a.trace.records[k].indices == b.trace.records[k].indices);
    CHECK(a.trace.records[k].indices.size() == 2);
    CHECK(a.trace.records[k].dist == b.trace.records[k].dist);
  }
  cfg.seed = 78;
  CHECK(run_pnp_sgd(model, filt, cfg).x != a.x);
  cfg.batch = 0;
  CHECK_THROWS_AS(run_pnp_sgd(model, filt, cfg), ConfigError);
}

TEST_CASE("trace records are nonnegative and indexed") {
  const auto model = small_model();
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.iterations = 25;
  cfg.reference = small_truth(8, 3).pixels;
  const auto r = run_pnp_ista(model, AveragedFilterDenoiser(8, 8), cfg);
  REQUIRE(r.trace.records.size() == 26);
  for (std::size_t k = 0; k < r.trace.records.size(); ++k) {
    CHECK(r.trace.records[k].k == static_cast<int>(k));
    CHECK(r.trace.records[k].dist >= 0.0);
    CHECK(std::isfinite(r.trace.records[k].snr_db));
  }
  cfg.dist_stride = 5;
  const auto s = run_pnp_ista(model, AveragedFilterDenoiser(8, 8), cfg);
  CHECK(std::isnan(s.trace.records[3].dist));
  CHECK(s.trace.records[5].dist == r.trace.records[5].dist);
}

TEST_CASE("divergence detector") {
  const auto model = small_model();
  SolverConfig cfg;
  cfg.gamma = 10.0 / model.lipschitz();  // overshoots the stable range
  cfg.iterations = 2000;
  const auto r = run_pnp_ista(model, IdentityDenoiser(), cfg);
  CHECK(r.status == RunStatus::Diverged);
  CHECK(r.diagnostic.rfind("norm_exceeded", 0) == 0);
  CHECK(r.iterations_run < 2000);

  cfg.gamma = 1.0 / model.lipschitz();
  CHECK(run_pnp_ista(model, ShiftDenoiser(1e300), cfg).status == RunStatus::Diverged);
  cfg.gamma = -1.0;
  CHECK_THROWS_AS(run_pnp_ista(model, IdentityDenoiser(), cfg), ConfigError);
}

TEST_CASE("batch running-average bound evaluator") {
  CHECK(prop2_bound(0.5, 1.0, 1) == doctest::Approx(6.0));
  CHECK(prop2_bound(0.5, 1.0, 2) == doctest::Approx(3.0));
  CHECK(prop2_bound(1e-12, 1.0, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(prop2_bound(1.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(prop2_bound(0.5, 1.0, 0), ConfigError);
}

TEST_CASE("batch running-average bound holds along a run") {
  const auto model = small_model();
  const AveragedFilterDenoiser filt(8, 8);
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.sigma = 0.7;
  cfg.iterations = 10000;
  cfg.record_trace = false;
  const RealVec xstar = run_pnp_ista(model, filt, cfg).x;
  cfg.iterations = 300;
  cfg.record_trace = true;
  const auto r = run_pnp_ista(model, filt, cfg);
  const double r0 = xstar.squaredNorm();  // x0 = 0
  double sum = 0.0;
  for (int t = 1; t <= 300; ++t) {
    sum += r.trace.records[static_cast<std::size_t>(t - 1)].dist;
    CHECK(sum / t <= prop2_bound(0.5, r0, t));
  }
}

TEST_CASE("sgd bound evaluator") {
  for (int t : {1, 7, 50}) CHECK(sgd_bound(0.5, 0.3, 0.0, 4, 1.5, t) == doctest::Approx(prop2_bound(0.5, 2.25, t)));
  CHECK(sgd_bound(0.5, 0.3, 2.0, 1e16, 1.5, 10) == doctest::Approx(prop2_bound(0.5, 2.25, 10)).epsilon(1e-6));
  CHECK(sgd_bound(0.5, 0.3, 2.0, 4, 1.5, 10) > sgd_bound(0.5, 0.3, 2.0, 16, 1.5, 10));
  const double L = 3.0, theta = 0.5, nu = 1.7, r = 0.8;
  for (int t : {1, 4, 100}) {
    const double g = 1.0 / (L * std::sqrt(static_cast<double>(t)));
    CHECK(sgd_bound(theta, g, nu, 1, r, t) <= corollary1_constant(theta, r, nu, L) / std::sqrt(t) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(sgd_bound(0.5, 0.3, 1.0, 0.5, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(corollary1_constant(0.5, 1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("gradient noise estimate") {
  const auto model = small_model(8, 48, 8, 4);
  const RealVec x = small_truth(8, 12).pixels;
  const double nu1 = estimate_gradient_nu(model, x, 1, 4000, 1);
  const double nu4 = estimate_gradient_nu(model, x, 4, 4000, 2);
  CHECK(nu1 > 0.0);
  // sqrt(B) scaling makes the estimate batch independent
  CHECK(nu4 == doctest::Approx(nu1).epsilon(0.1));
  CHECK(estimate_gradient_nu(model, x, 1, 100, 3) == estimate_gradient_nu(model, x, 1, 100, 3));

  std::vector<MeasurementComponent> same;
  const auto& c0 = model.component(0);
  for (int i = 0; i < 3; ++i) same.push_back(c0);
  const MeasurementModel clones(std::move(same), model.lipschitz());
  CHECK(estimate_gradient_nu(clones, x, 2, 50, 1) <= 1e-12 * grad_full(clones, x).norm());
}

TEST_CASE("averagedness composition") {
  CHECK(composition_alpha(0.5, 0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(composition_alpha(0.3, 1e-12) == doctest::Approx(0.3));
  const double a = denoiser_gradient_alpha(0.5, 0.5, 1.0);
  CHECK(a == doctest::Approx(4.0 / 7.0));
  CHECK(a / (1 - a) == doctest::Approx(4.0 / 3.0));
  CHECK(a / (1 - a) <= 2.0 * 1.5 / 0.5);
  for (double a1 : {0.1, 0.4, 0.9})
    for (double a2 : {0.05, 0.5, 0.95}) {
      const double c = composition_alpha(a1, a2);
      CHECK(c > 0.0);
      CHECK(c < 1.0);
    }
  CHECK_THROWS_AS(composition_alpha(0.0, 0.5), ConfigError);
}

TEST_CASE("counterexample divergence") {
  CHECK(huber_gradient(0.5) == 0.5);
  CHECK(huber_gradient(-3.0) == -1.0);

  const auto tr = run_counterexample(0.5, 1.0, 1.0, 0.1, 10000);
  REQUIRE(tr.z.size() == 10001);
  for (std::size_t k = 0; k < tr.z.size(); ++k) {
    // each step adds 0.5 exactly; only the rounding of 0.1 + 0.5k can differ
    CHECK(std::abs(std::abs(tr.z[k]) - (0.1 + 0.5 * static_cast<double>(k))) <= 4 * std::numeric_limits<double>::epsilon() * (1 + 0.5 * k));
    if (k > 0) CHECK(tr.upper_branch[k - 1]);
  }
  // dyadic start: the closed form holds bitwise
  const auto dy = run_counterexample(0.5, 1.0, 1.0, 0.125, 10000);
  for (std::size_t k = 0; k < dy.z.size(); ++k) CHECK(dy.z[k] == 0.125 + 0.5 * static_cast<double>(k));

  Rng rng(2024);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    const double gamma = u(rng), c = 4 * u(rng), sigma = gamma / std::sqrt(c) * (1.05 + 2 * u(rng));
    const double z0 = (trial % 2 ? -1 : 1) * u(rng);
    const auto r = run_counterexample(gamma, sigma, c, z0, 2000);
    for (int t = 0; t <= 2000; ++t)
      CHECK(std::abs(r.z[static_cast<std::size_t>(t)]) >=
            std::abs(z0) + t * (sigma * std::sqrt(c) - gamma) - 1e-9 * (1 + t));
  }

  const auto bounded = run_counterexample(0.5, 0.2, 1.0, 0.1, 10000);
  double peak = 0.0;
  for (double z : bounded.z) peak = std::max(peak, std::abs(z));
  CHECK(peak <= 2.0);

  CHECK_THROWS_AS(run_counterexample(1.0, 1.0, 1.0, 0.1, 1), ConfigError);
}

TEST_CASE("min dist never exceeds running mean") {
  const auto model = small_model();
  SolverConfig cfg;
  cfg.gamma = 1.0 / model.lipschitz();
  cfg.iterations = 60;
  cfg.batch = 1;
  cfg.seed = 5;
  const auto r = run_pnp_sgd(model, AveragedFilterDenoiser(8, 8), cfg);
  const auto d = r.trace.dists();
  double mn = INFINITY, sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    mn = std::min(mn, d[k]);
    sum += d[k];
    CHECK(mn <= sum / static_cast<double>(k + 1));
  }
}
