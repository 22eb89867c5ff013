#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sbd/certificates.hpp"
#include "sbd/ensembles.hpp"
#include "sbd/experiments.hpp"
#include "sbd/extraction.hpp"
#include "sbd/io.hpp"
#include "sbd/rng.hpp"
#include "sbd/solver.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sbd;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;   // bad arguments, unreadable files
constexpr int kExitFlagged = 2; // non-convergence or failed certificate

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int workers = 1;
};

std::string out_path(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / name).string();
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--rho", cfg.rho, "splitting penalty")
      ->capture_default_str();
  cmd->add_option("--tol-abs", cfg.tol_abs, "absolute stopping tolerance")
      ->capture_default_str();
  cmd->add_option("--tol-rel", cfg.tol_rel, "relative stopping tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iter", cfg.max_iter, "iteration cap")
      ->capture_default_str();
  cmd->add_option("--over-relaxation", cfg.over_relaxation,
                  "over-relaxation factor in [1.0, 1.8]")
      ->capture_default_str();
  cmd->add_flag("--adaptive-rho", cfg.adaptive_rho,
                "rescale rho by residual-ratio test");
}

struct SynthOpts {
  std::string ensemble = "gaussian";
  int n = 40, m = 60, k = 3, j = 2;
  double eta = -1.0;
  double nsr_db = std::numeric_limits<double>::quiet_NaN();
};

int cmd_synth(const GlobalOpts& g, const SynthOpts& o) {
  const EnsembleTag tag = ensemble_from_string(o.ensemble);
  const Instance inst = make_instance(tag, o.n, o.m, o.k, o.j, g.seed);
  const MeasurementOperator op = make_operator(tag, o.n, o.m, o.k, g.seed);
  Measurements meas;
  meas.y = synthesize_measurements(inst.truth, op.dictionary(), op.basis());
  if (o.eta >= 0.0 || !std::isnan(o.nsr_db)) {
    NoiseSpec spec;
    if (o.eta >= 0.0) {
      spec.eta = o.eta;
    } else {
      spec.target_nsr_db = o.nsr_db;
      spec.x0_frobenius = inst.truth.X0.norm();
    }
    const NoisyMeasurements noisy =
        add_noise(meas.y, spec, derive_seed(g.seed, 2));
    meas.y = noisy.y;
    meas.eta = noisy.eta_actual;
  }
  save_instance(out_path(g, "instance.txt"), inst);
  save_measurements(out_path(g, "measurements.txt"), meas);
  std::cout << "synth: wrote instance.txt and measurements.txt to "
            << g.out_dir << "\n";
  return kExitOk;
}

struct SolveOpts {
  std::string instance_path;
  std::string measurements_path;
  double eta = -1.0;     // override; default: value stored with measurements
  double lambda = -1.0;  // > 0 selects the regularized program
  double threshold = 1e-3;
  SolverConfig solver;
};

int cmd_solve(const GlobalOpts& g, const SolveOpts& o) {
  const Instance inst = load_instance(o.instance_path);
  const Measurements meas = load_measurements(o.measurements_path);
  const MeasurementOperator op =
      make_operator(inst.ensemble, inst.n, inst.m, inst.k, inst.seed);
  if (meas.y.size() != op.n()) {
    throw IoError("solve: measurement length does not match instance");
  }
  const double eta = o.eta >= 0.0 ? o.eta : meas.eta;
  SolveResult res;
  if (o.lambda > 0.0) {
    res = solve_regularized(meas.y, op, o.lambda, o.solver);
  } else if (eta > 0.0) {
    res = solve_noisy(meas.y, op, eta, o.solver);
  } else {
    res = solve_noiseless(meas.y, op, o.solver);
  }
  save_matrix(out_path(g, "xhat.txt"), res.X_hat);
  {
    std::ofstream out(out_path(g, "result.txt"));
    write_kv(out, solve_result_kv(res));
  }
  {
    const RecoveredModel model =
        extract_parameters(res.X_hat, op.basis(), o.threshold);
    std::ofstream out(out_path(g, "model.txt"));
    write_recovered_model(out, model);
  }
  std::cout << "solve: objective " << format_real(res.objective) << ", "
            << res.iterations << " iterations, "
            << (res.converged ? "converged" : "NOT converged") << "\n";
  return res.converged ? kExitOk : kExitFlagged;
}

struct CertOpts {
  std::string instance_path;
  std::string mode = "ls";           // ls | golfing
  std::string gamma_source = "bound";  // bound | empirical
  int depth = 0;                     // golfing P; 0 = default from J, gamma
};

int cmd_cert(const GlobalOpts& g, const CertOpts& o) {
  const Instance inst = load_instance(o.instance_path);
  const MeasurementOperator op =
      make_operator(inst.ensemble, inst.n, inst.m, inst.k, inst.seed);
  const SupportSet& T = inst.truth.support;
  CMat sign_x0t(inst.k, T.size());
  for (int t = 0; t < T.size(); ++t) {
    sign_x0t.col(t) = inst.truth.waveforms.col(t);  // columns are unit norm
  }

  Real gamma;
  if (o.gamma_source == "bound") {
    gamma = inst.ensemble == EnsembleTag::kFourier
                ? fourier_gamma_bound(inst.m, inst.k)
                : gaussian_gamma_bound(inst.n, inst.m);
  } else if (o.gamma_source == "empirical") {
    gamma = operator_norm_estimate(op).value;
  } else {
    throw CLI::ValidationError("--gamma-source must be bound or empirical");
  }

  const CMat phi = assemble_phi(op);
  const Real delta =
      isometry_constant(restrict_support(phi, T, inst.k).phi_compact);
  const Real beta = beta_crosscorrelation(op, T);

  CMat Y;
  CVec p_vec;
  if (o.mode == "ls") {
    const LsCertificate cert = ls_certificate(op, T, sign_x0t);
    Y = cert.Y;
    p_vec = cert.p;
  } else if (o.mode == "golfing") {
    const int depth =
        o.depth > 0 ? o.depth : default_golfing_depth(T.size(), gamma);
    const GolfingState state =
        golfing_certificate(op, T, sign_x0t, depth, derive_seed(g.seed, 3));
    Y = state.Y;
    p_vec = CVec::Zero(op.n());  // golfing has no explicit p; tau reads 0
  } else {
    throw CLI::ValidationError("--mode must be ls or golfing");
  }

  const CertificateReport rep =
      verify_certificate(Y, p_vec, T, sign_x0t, gamma, delta, beta);
  {
    std::ofstream out(out_path(g, "cert.txt"));
    out << "# mode " << o.mode << "\n";
    write_kv(out, certificate_report_kv(rep));
  }
  std::cout << "cert: delta " << format_real(rep.delta) << ", theta "
            << format_real(rep.theta) << ", inexact duality "
            << (rep.pass_inexact_duality ? "pass" : "FAIL") << "\n";
  return rep.pass_inexact_duality ? kExitOk : kExitFlagged;
}

struct ExperimentOpts {
  std::string name;              // phase-kj | phase-nj | phase-nk | noise | paper-full
  std::string preset = "desk";   // desk | paper
  std::string ensemble = "gaussian";
  int trials = 0;                // 0 = preset default
};

std::vector<int> range_incl(int lo, int hi, int step = 1) {
  std::vector<int> v;
  for (int x = lo; x <= hi; x += step) v.push_back(x);
  return v;
}

PhaseGrid phase_grid_for(const ExperimentOpts& o, std::uint64_t seed) {
  const bool paper = o.preset == "paper";
  PhaseGrid grid;
  grid.ensemble = ensemble_from_string(o.ensemble);
  grid.seed = seed;
  grid.n = paper ? 100 : 40;
  grid.m = paper ? 200 : 60;
  grid.trials = o.trials > 0 ? o.trials : (paper ? 40 : 20);
  if (o.name == "phase-kj") {
    grid.sweep_x = 'K';
    grid.sweep_y = 'J';
    grid.x_values = paper ? range_incl(1, 20) : range_incl(1, 8);
    grid.y_values = grid.x_values;
  } else if (o.name == "phase-nj") {
    grid.sweep_x = 'J';
    grid.sweep_y = 'N';
    grid.k = 3;
    grid.x_values = paper ? range_incl(1, 20) : range_incl(1, 8);
    grid.y_values = paper ? range_incl(20, 180, 20) : range_incl(15, 55, 10);
  } else if (o.name == "phase-nk") {
    grid.sweep_x = 'K';
    grid.sweep_y = 'N';
    grid.j = 3;
    grid.x_values = paper ? range_incl(1, 20) : range_incl(1, 8);
    grid.y_values = paper ? range_incl(20, 180, 20) : range_incl(15, 55, 10);
  } else {
    throw CLI::ValidationError("unknown phase experiment: " + o.name);
  }
  return grid;
}

int run_phase_experiment(const GlobalOpts& g, const ExperimentOpts& o) {
  const PhaseGrid grid = phase_grid_for(o, g.seed);
  std::ofstream out(out_path(g, o.name + ".csv"));
  const auto cells = run_phase_transition(
      grid, g.workers, [](const PhaseCell& c) {
        std::cout << "cell N=" << c.n << " M=" << c.m << " K=" << c.k
                  << " J=" << c.j << " rate=" << c.rate << "\n";
      });
  write_phase_csv(out, grid, cells);
  return kExitOk;
}

int run_noise_experiment(const GlobalOpts& g, const ExperimentOpts& o) {
  const bool paper = o.preset == "paper";
  NoiseCurveConfig cfg;
  cfg.ensemble = ensemble_from_string(o.ensemble);
  cfg.seed = g.seed;
  if (!paper) {
    cfg.n = 40;
    cfg.m = 60;
    cfg.k = 3;
    cfg.j = 3;
  }
  cfg.nsr_db = {-60, -50, -40, -30, -20, -10};
  cfg.trials = o.trials > 0 ? o.trials : (paper ? 40 : 20);
  const auto points = run_noise_curve(cfg, g.workers);
  std::ofstream out(out_path(g, "noise.csv"));
  write_noise_csv(out, cfg, points);
  for (const auto& p : points) {
    std::cout << "nsr " << p.nsr_db << " dB -> mean error " << p.mean_err_db
              << " dB (theory " << p.theory_db << " dB)\n";
  }
  return kExitOk;
}

int cmd_experiment(const GlobalOpts& g, const ExperimentOpts& o) {
  if (o.name == "noise") return run_noise_experiment(g, o);
  if (o.name == "paper-full") {
    ExperimentOpts sub = o;
    sub.preset = "paper";
    for (const char* name : {"phase-kj", "phase-nj", "phase-nk"}) {
      sub.name = name;
      run_phase_experiment(g, sub);
    }
    sub.name = "noise";
    run_noise_experiment(g, sub);
    return kExitOk;
  }
  return run_phase_experiment(g, o);
}

struct DoaOpts {
  DoaConfig cfg;
};

int cmd_doa(const GlobalOpts& g, DoaOpts& o) {
  o.cfg.seed = g.seed;
  const DoaResult result = run_doa_demo(o.cfg);
  {
    std::ofstream out(out_path(g, "doa.csv"));
    write_doa_csv(out, o.cfg, result);
  }
  {
    std::ofstream out(out_path(g, "doa_model.txt"));
    write_recovered_model(out, result.model);
  }
  std::cout << "doa: recovered angles";
  for (Real a : result.recovered_deg) std::cout << " " << a;
  std::cout << " (exact support in " << result.exact_draws << "/"
            << result.total_draws << " draws)\n";
  if (!result.baseline_deg.empty()) {
    std::cout << "doa baseline: angles";
    for (Real a : result.baseline_deg) std::cout << " " << a;
    std::cout << "\n";
  }
  return result.exact_draws == result.total_draws ? kExitOk : kExitFlagged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse recovery with blind per-atom modulation"};
  app.require_subcommand(1);
  app.fallthrough(true);  // global flags may follow the subcommand
  app.set_config("--config", "", "key-value config file; flags override");

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads for experiments")
      ->capture_default_str();

  SynthOpts synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a problem instance");
  synth_cmd->add_option("--ensemble", synth.ensemble, "gaussian | fourier")
      ->capture_default_str();
  synth_cmd->add_option("-N,--rows", synth.n, "measurements N")
      ->capture_default_str();
  synth_cmd->add_option("-M,--atoms", synth.m, "dictionary columns M")
      ->capture_default_str();
  synth_cmd->add_option("-K,--subspace", synth.k, "subspace dimension K")
      ->capture_default_str();
  synth_cmd->add_option("-J,--sparsity", synth.j, "support size J")
      ->capture_default_str();
  synth_cmd->add_option("--eta", synth.eta, "noise l2 budget (exact)");
  synth_cmd->add_option("--nsr-db", synth.nsr_db,
                        "noise-to-signal ratio in dB");

  SolveOpts solve;
  auto* solve_cmd = app.add_subcommand("solve", "solve a saved instance");
  solve_cmd->add_option("--instance", solve.instance_path, "instance file")
      ->required();
  solve_cmd
      ->add_option("--measurements", solve.measurements_path,
                   "measurements file")
      ->required();
  solve_cmd->add_option("--eta", solve.eta,
                        "noise ball radius; overrides the stored value");
  solve_cmd->add_option("--lambda", solve.lambda,
                        "regularization weight (selects the penalized program)");
  solve_cmd->add_option("--threshold", solve.threshold,
                        "relative support threshold for extraction")
      ->capture_default_str();
  add_solver_flags(solve_cmd, solve.solver);

  CertOpts cert;
  auto* cert_cmd =
      app.add_subcommand("cert", "compute and verify a dual certificate");
  cert_cmd->add_option("--instance", cert.instance_path, "instance file")
      ->required();
  cert_cmd->add_option("--mode", cert.mode, "ls | golfing")
      ->capture_default_str();
  cert_cmd->add_option("--gamma-source", cert.gamma_source,
                       "bound | empirical")
      ->capture_default_str();
  cert_cmd->add_option("-P,--depth", cert.depth,
                       "golfing partition count (0 = default rule)");

  ExperimentOpts exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Monte-Carlo sweeps");
  exp_cmd
      ->add_option("name", exp.name,
                   "phase-kj | phase-nj | phase-nk | noise | paper-full")
      ->required();
  exp_cmd->add_option("--preset", exp.preset, "desk | paper")
      ->capture_default_str();
  exp_cmd->add_option("--ensemble", exp.ensemble, "gaussian | fourier")
      ->capture_default_str();
  exp_cmd->add_option("--trials", exp.trials, "trials per cell (0 = preset)");

  DoaOpts doa;
  auto* doa_cmd =
      app.add_subcommand("doa", "direction-of-arrival demonstration");
  doa_cmd->add_option("-N,--elements", doa.cfg.n, "array elements")
      ->capture_default_str();
  doa_cmd->add_option("-K,--subspace", doa.cfg.k, "calibration dimension")
      ->capture_default_str();
  doa_cmd->add_option("--angles", doa.cfg.source_angles_deg,
                      "source angles in degrees");
  doa_cmd->add_option("--snr-db", doa.cfg.snr_db, "signal-to-noise ratio")
      ->capture_default_str();
  doa_cmd->add_option("--draws", doa.cfg.noise_draws, "noise realizations")
      ->capture_default_str();
  doa_cmd->add_option("--threshold", doa.cfg.support_threshold,
                      "relative support threshold")
      ->capture_default_str();
  doa_cmd->add_flag("--baseline", doa.cfg.run_baseline,
                    "also run the shared-modulation entrywise-l1 baseline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(g, synth);
    if (solve_cmd->parsed()) return cmd_solve(g, solve);
    if (cert_cmd->parsed()) return cmd_cert(g, cert);
    if (exp_cmd->parsed()) return cmd_experiment(g, exp);
    if (doa_cmd->parsed()) return cmd_doa(g, doa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
