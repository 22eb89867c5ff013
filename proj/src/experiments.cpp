#include "sbd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "sbd/certificates.hpp"
#include "sbd/ensembles.hpp"
#include "sbd/io.hpp"
#include "sbd/rng.hpp"

namespace sbd {

SuccessTest success_test(const LiftedMatrix& X_hat, const LiftedMatrix& X0,
                         Real threshold) {
  if (X_hat.rows() != X0.rows() || X_hat.cols() != X0.cols()) {
    throw DimensionError("success_test: dimension mismatch");
  }
  SuccessTest t;
  const Real x0_norm = X0.norm();
  if (x0_norm == 0.0) {
    t.rel_error = X_hat.norm();
    t.success = t.rel_error <= threshold;
    return t;
  }
  t.rel_error = (X_hat - X0).norm() / x0_norm;
  // tiny slack so an error of exactly `threshold` counts as success even
  // after roundoff
  t.success = t.rel_error <= threshold * (1.0 + 1e-9);
  return t;
}

namespace {

// Runs fn(0..count) across a thread pool; results must land in preallocated
// slots so the merge order is independent of scheduling.
void run_jobs(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(workers, count);
  pool.reserve(static_cast<size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

struct CellDims {
  int n, m, k, j;
};

int& dim_ref(CellDims& d, char name) {
  switch (name) {
    case 'N': return d.n;
    case 'M': return d.m;
    case 'K': return d.k;
    case 'J': return d.j;
    default: throw std::invalid_argument("unknown sweep dimension");
  }
}

bool dims_feasible(const CellDims& d) {
  return d.n > 0 && d.m > d.n && d.k > 0 && d.k < d.n && d.j >= 0 &&
         d.j <= d.m;
}

// One noiseless Monte-Carlo trial; any exception counts as a failure.
bool phase_trial(EnsembleTag ensemble, const CellDims& d, Real threshold,
                 const SolverConfig& solver, std::uint64_t trial_seed) {
  try {
    const MeasurementOperator op =
        make_operator(ensemble, d.n, d.m, d.k, trial_seed);
    const GroundTruth gt =
        random_ground_truth(d.m, d.k, d.j, derive_seed(trial_seed, 1));
    const CVec y = synthesize_measurements(gt, op.dictionary(), op.basis());
    const SolveResult res = solve_noiseless(y, op, solver);
    return success_test(res.X_hat, gt.X0, threshold).success;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::vector<PhaseCell> run_phase_transition(
    const PhaseGrid& grid, int workers,
    const std::function<void(const PhaseCell&)>& on_cell) {
  if (grid.x_values.empty() || grid.y_values.empty() || grid.trials < 1) {
    throw std::invalid_argument(
        "run_phase_transition: sweep ranges must be nonempty, trials >= 1");
  }
  const int nx = static_cast<int>(grid.x_values.size());
  const int ny = static_cast<int>(grid.y_values.size());
  const int cells = nx * ny;
  const int jobs = cells * grid.trials;
  std::vector<char> outcome(static_cast<size_t>(jobs), 0);
  std::vector<CellDims> dims(static_cast<size_t>(cells));
  for (int c = 0; c < cells; ++c) {
    CellDims d{grid.n, grid.m, grid.k, grid.j};
    dim_ref(d, grid.sweep_x) = grid.x_values[static_cast<size_t>(c % nx)];
    dim_ref(d, grid.sweep_y) = grid.y_values[static_cast<size_t>(c / nx)];
    dims[static_cast<size_t>(c)] = d;
  }
  run_jobs(jobs, workers, [&](int job) {
    const int c = job / grid.trials;
    const int trial = job % grid.trials;
    const CellDims& d = dims[static_cast<size_t>(c)];
    if (!dims_feasible(d)) return;
    const std::uint64_t trial_seed =
        derive_seed(derive_seed(grid.seed, static_cast<std::uint64_t>(c)),
                    static_cast<std::uint64_t>(trial));
    outcome[static_cast<size_t>(job)] =
        phase_trial(grid.ensemble, d, grid.success_threshold, grid.solver,
                    trial_seed)
            ? 1
            : 0;
  });
  std::vector<PhaseCell> result(static_cast<size_t>(cells));
  for (int c = 0; c < cells; ++c) {
    PhaseCell& cell = result[static_cast<size_t>(c)];
    const CellDims& d = dims[static_cast<size_t>(c)];
    cell.n = d.n;
    cell.m = d.m;
    cell.k = d.k;
    cell.j = d.j;
    cell.trials = grid.trials;
    for (int t = 0; t < grid.trials; ++t) {
      cell.successes += outcome[static_cast<size_t>(c * grid.trials + t)];
    }
    cell.rate = static_cast<Real>(cell.successes) / grid.trials;
    if (on_cell) on_cell(cell);
  }
  return result;
}

Real theoretical_offset_db(EnsembleTag ensemble, int j, int golfing_depth) {
  const Real c1 = 5.0 * std::sqrt(6.0);
  const Real c2 = 24.0;
  const Real blocks =
      ensemble == EnsembleTag::kFourier
          ? static_cast<Real>(golfing_depth) * static_cast<Real>(j)
          : static_cast<Real>(j);
  return 20.0 * std::log10(c1 + c2 * std::sqrt(blocks));
}

Real theoretical_noise_bound(Real nsr_db, EnsembleTag ensemble, int j,
                             int golfing_depth) {
  return nsr_db + theoretical_offset_db(ensemble, j, golfing_depth);
}

std::vector<NoisePoint> run_noise_curve(const NoiseCurveConfig& config,
                                        int workers) {
  if (config.nsr_db.empty() || config.trials < 1) {
    throw std::invalid_argument(
        "run_noise_curve: NSR grid must be nonempty, trials >= 1");
  }
  const int points = static_cast<int>(config.nsr_db.size());
  const int jobs = points * config.trials;
  std::vector<Real> errors(static_cast<size_t>(jobs), 0.0);
  run_jobs(jobs, workers, [&](int job) {
    const int p = job / config.trials;
    const int trial = job % config.trials;
    const std::uint64_t trial_seed =
        derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(p)),
                    static_cast<std::uint64_t>(trial));
    const MeasurementOperator op = make_operator(
        config.ensemble, config.n, config.m, config.k, trial_seed);
    const GroundTruth gt = random_ground_truth(config.m, config.k, config.j,
                                               derive_seed(trial_seed, 1));
    const CVec y = synthesize_measurements(gt, op.dictionary(), op.basis());
    NoiseSpec spec;
    spec.target_nsr_db = config.nsr_db[static_cast<size_t>(p)];
    spec.x0_frobenius = gt.X0.norm();
    const NoisyMeasurements noisy =
        add_noise(y, spec, derive_seed(trial_seed, 2));
    const SolveResult res =
        solve_noisy(noisy.y, op, noisy.eta_actual, config.solver);
    errors[static_cast<size_t>(job)] =
        success_test(res.X_hat, gt.X0, 1.0).rel_error;
  });

  const int depth =
      config.ensemble == EnsembleTag::kFourier
          ? default_golfing_depth(config.j,
                                  fourier_gamma_bound(config.m, config.k))
          : 0;
  std::vector<NoisePoint> result(static_cast<size_t>(points));
  for (int p = 0; p < points; ++p) {
    Real mean = 0.0;
    for (int t = 0; t < config.trials; ++t) {
      mean += errors[static_cast<size_t>(p * config.trials + t)];
    }
    mean /= config.trials;
    Real var = 0.0;
    for (int t = 0; t < config.trials; ++t) {
      const Real d = errors[static_cast<size_t>(p * config.trials + t)] - mean;
      var += d * d;
    }
    const Real sd =
        config.trials > 1 ? std::sqrt(var / (config.trials - 1)) : 0.0;
    NoisePoint& pt = result[static_cast<size_t>(p)];
    pt.nsr_db = config.nsr_db[static_cast<size_t>(p)];
    pt.mean_err_db = 20.0 * std::log10(mean);
    pt.std_err_db = 20.0 * std::log10(mean + sd) - pt.mean_err_db;
    pt.theory_db =
        theoretical_noise_bound(pt.nsr_db, config.ensemble, config.j, depth);
  }
  return result;
}

DoaResult run_doa_demo(const DoaConfig& config) {
  if (config.grid_points < 2 || config.noise_draws < 1) {
    throw std::invalid_argument(
        "run_doa_demo: need at least two grid points and one draw");
  }
  DoaResult result;
  result.grid_deg.resize(static_cast<size_t>(config.grid_points));
  const Real step = (config.grid_stop_deg - config.grid_start_deg) /
                    (config.grid_points - 1);
  for (int i = 0; i < config.grid_points; ++i) {
    result.grid_deg[static_cast<size_t>(i)] =
        config.grid_start_deg + step * i;
  }

  // snap each source to its nearest grid index
  std::vector<int> true_support;
  for (Real angle : config.source_angles_deg) {
    const int idx = static_cast<int>(
        std::lround((angle - config.grid_start_deg) / step));
    if (idx < 0 || idx >= config.grid_points) {
      throw std::invalid_argument("run_doa_demo: source angle off the grid");
    }
    true_support.push_back(idx);
  }
  const int m = config.grid_points;
  const int j = static_cast<int>(true_support.size());

  MeasurementOperator op(ula_manifold(config.n, result.grid_deg),
                         dft_subspace(config.n, config.k));
  const GramCache cache(op);

  // unit source strengths; only the calibration waveforms are random
  GroundTruth gt;
  gt.support = SupportSet(true_support, m);
  gt.amplitudes = RVec::Ones(j);
  gt.waveforms = CMat(config.k, j);
  gt.X0 = CMat::Zero(config.k, m);
  Rng rng(derive_seed(config.seed, 1));
  for (int t = 0; t < j; ++t) {
    CVec h(config.k);
    for (int i = 0; i < config.k; ++i) h(i) = rng.complex_normal();
    h /= h.norm();
    gt.waveforms.col(t) = h;
    gt.X0.col(gt.support[t]) = h;
  }

  const CVec y_clean = synthesize_measurements(gt, op.dictionary(), op.basis());
  const Real eta = y_clean.norm() * std::pow(10.0, -config.snr_db / 20.0);

  // With coherent neighboring steering vectors a little energy leaks to
  // adjacent grid angles, so angle estimates are the J strongest columns
  // (model order J is known to the demo) rather than a threshold cut.
  const auto top_j_support = [m, j](const LiftedMatrix& X) {
    const RVec norms = X.colwise().norm();
    std::vector<int> order(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) order[static_cast<size_t>(i)] = i;
    std::partial_sort(order.begin(), order.begin() + j, order.end(),
                      [&](int a, int b) { return norms(a) > norms(b); });
    return SupportSet(std::vector<int>(order.begin(), order.begin() + j), m);
  };

  result.total_draws = config.noise_draws;
  for (int d = 0; d < config.noise_draws; ++d) {
    NoiseSpec spec;
    spec.eta = eta;
    const NoisyMeasurements noisy =
        add_noise(y_clean, spec, derive_seed(config.seed, 100 + d));
    const SolveResult res =
        solve_noisy(noisy.y, op, noisy.eta_actual, config.solver, &cache);
    const SupportSet found = top_j_support(res.X_hat);
    if (found == gt.support) ++result.exact_draws;
    if (d == 0) {
      result.strengths = res.X_hat.colwise().norm();
      result.model = extract_parameters(res.X_hat, op.basis(),
                                        config.support_threshold);
      for (int t = 0; t < found.size(); ++t) {
        result.recovered_deg.push_back(
            result.grid_deg[static_cast<size_t>(found[t])]);
      }
      if (config.run_baseline) {
        const SolveResult base =
            solve_noisy_l1(noisy.y, op, noisy.eta_actual, config.solver,
                           &cache);
        const SupportSet base_support = top_j_support(base.X_hat);
        for (int t = 0; t < base_support.size(); ++t) {
          result.baseline_deg.push_back(
              result.grid_deg[static_cast<size_t>(base_support[t])]);
        }
      }
    }
  }
  return result;
}

namespace {

std::string join_ints(const std::vector<int>& values) {
  std::string s;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(values[i]);
  }
  return s;
}

std::string join_reals(const std::vector<Real>& values) {
  std::string s;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) s += ",";
    s += format_real(values[i]);
  }
  return s;
}

}  // namespace

void write_phase_csv(std::ostream& out, const PhaseGrid& grid,
                     const std::vector<PhaseCell>& cells) {
  out << "# config: ensemble=" << to_string(grid.ensemble) << " sweep="
      << grid.sweep_x << "x" << grid.sweep_y << " x=[" << join_ints(grid.x_values)
      << "] y=[" << join_ints(grid.y_values) << "] N=" << grid.n
      << " M=" << grid.m << " K=" << grid.k << " J=" << grid.j
      << " trials=" << grid.trials
      << " threshold=" << format_real(grid.success_threshold)
      << " seed=" << grid.seed << "\n";
  out << "ensemble,N,M,K,J,trials,successes,rate\n";
  for (const auto& c : cells) {
    out << to_string(grid.ensemble) << "," << c.n << "," << c.m << "," << c.k
        << "," << c.j << "," << c.trials << "," << c.successes << ","
        << format_real(c.rate) << "\n";
  }
}

void write_noise_csv(std::ostream& out, const NoiseCurveConfig& config,
                     const std::vector<NoisePoint>& points) {
  out << "# config: ensemble=" << to_string(config.ensemble)
      << " N=" << config.n << " M=" << config.m << " K=" << config.k
      << " J=" << config.j << " nsr_db=[" << join_reals(config.nsr_db)
      << "] trials=" << config.trials << " seed=" << config.seed << "\n";
  out << "nsr_db,mean_err_db,std_err_db,theory_db\n";
  for (const auto& p : points) {
    out << format_real(p.nsr_db) << "," << format_real(p.mean_err_db) << ","
        << format_real(p.std_err_db) << "," << format_real(p.theory_db)
        << "\n";
  }
}

void write_doa_csv(std::ostream& out, const DoaConfig& config,
                   const DoaResult& result) {
  out << "# config: N=" << config.n << " K=" << config.k << " M="
      << config.grid_points << " sources=[" << join_reals(config.source_angles_deg)
      << "] snr_db=" << format_real(config.snr_db)
      << " draws=" << config.noise_draws
      << " threshold=" << format_real(config.support_threshold)
      << " seed=" << config.seed << "\n";
  out << "angle_deg,strength\n";
  for (size_t i = 0; i < result.grid_deg.size(); ++i) {
    out << format_real(result.grid_deg[i]) << ","
        << format_real(result.strengths(static_cast<Eigen::Index>(i))) << "\n";
  }
}

}  // namespace sbd
