#include "pnp/experiment.hpp"

#include "pnp/measurement_io.hpp"
#include "pnp/metrics.hpp"
#include "pnp/pgm.hpp"
#include "pnp/svg_plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

namespace pnp {

namespace fs = std::filesystem;

namespace {

// Seed streams derived from the master seed.
constexpr std::uint64_t kPhantomStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kReconstructStream = 2;
constexpr std::uint64_t kSweepStream = 1000;
constexpr std::uint64_t kCompareStream = 2000;
constexpr std::uint64_t kCertifyStream = 3000;

std::string gamma_label(double scale) {
  const double inv = 1.0 / scale;
  if (std::abs(inv - std::round(inv)) < 1e-9) {
    const long long d = std::llround(inv);
    return d == 1 ? "1/L" : fmt::format("1/{}L", d);
  }
  return fmt::format("{}/L", scale);
}

std::string gamma_file_label(double scale) {
  const double inv = 1.0 / scale;
  if (std::abs(inv - std::round(inv)) < 1e-9) return fmt::format("g1_{}L", std::llround(inv));
  return fmt::format("g{}", scale);
}

// Runs jobs on a small worker pool; results are consumed afterwards in job order.
template <typename Fn>
void run_pool(std::size_t count, Fn&& job) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      while (true) {
        std::size_t i = 0;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= count || failure) return;
          i = next++;
        }
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string geometry_metadata(const DtGeometry& g) {
  return fmt::format(
      "domain_side={}\ngrid={}\nwavelength={}\neps_background={}\ntransmitters={}\nreceivers={}\n"
      "ring_radius={}\nillumination={}\n",
      g.domain_side, g.grid, g.wavelength, g.eps_background, g.num_transmitters, g.num_receivers,
      g.ring_radius, g.illumination == Illumination::PointSource ? "point" : "plane");
}

}  // namespace

Image build_phantom(const ExperimentConfig& cfg) {
  PhantomSpec spec;
  spec.kind = cfg.phantom;
  spec.grid = cfg.geometry.grid;
  spec.seed = derive_seed(cfg.seed, kPhantomStream);
  spec.checker_block = cfg.checker_block;
  spec.pgm_path = cfg.phantom_path;
  return to_contrast(phantom_generate(spec), cfg.contrast, cfg.geometry.domain_side);
}

MeasurementModel simulate_model(const ExperimentConfig& cfg) {
  const Image truth = build_phantom(cfg);
  const std::uint64_t noise_seed = derive_seed(cfg.seed, kNoiseStream);
  if (cfg.model == "dt") return build_dt_model(cfg.geometry, truth, noise_seed, cfg.input_snr_db);
  if (cfg.model == "gaussian")
    return build_gaussian_model(truth.size(), static_cast<std::size_t>(cfg.gaussian_rows),
                                static_cast<std::size_t>(cfg.gaussian_components), noise_seed, truth,
                                cfg.input_snr_db);
  throw ConfigError("unknown model '" + cfg.model + "'");
}

MeasurementModel obtain_model(const ExperimentConfig& cfg) {
  if (!cfg.measurements.empty()) return load_measurements(cfg.measurements);
  return simulate_model(cfg);
}

std::string model_metadata(const MeasurementModel& model) {
  std::string out = fmt::format("format=PNPM1\nkind={}\n",
                                model.kind == ModelKind::DiffractionTomography ? "dt" : "dense");
  out += fmt::format("n={}\nM={}\nI={}\nwidth={}\nheight={}\n", model.input_dim(), model.output_dim(),
                     model.num_components(), model.width, model.height);
  if (model.geometry) out += geometry_metadata(*model.geometry);
  out += fmt::format("noise_seed={}\ninput_snr_db={}\nachieved_snr_db={}\nlipschitz={}\n", model.seed,
                     format_real(model.input_snr_db), format_real(model.achieved_snr_db),
                     format_real(model.lipschitz()));
  return out;
}

SimulateResult cmd_simulate(const ExperimentConfig& cfg) {
  validate_config(cfg, "simulate");
  const MeasurementModel model = simulate_model(cfg);
  ensure_dir(cfg.output_dir);
  SimulateResult res;
  res.container = cfg.output_dir / "measurements.pnpm";
  res.metadata = cfg.output_dir / "measurements.meta";
  res.phantom_pgm = cfg.output_dir / "phantom.pgm";
  save_measurements(res.container, model);
  write_text_file(res.metadata, model_metadata(model) + fmt::format("master_seed={}\n", cfg.seed));
  write_pgm(res.phantom_pgm, quantize_pgm(*model.truth, 0.0, cfg.contrast));
  res.achieved_snr_db = model.achieved_snr_db;
  return res;
}

SolverResult execute_run(const ExperimentConfig& cfg, const MeasurementModel& model, const RunSpec& spec) {
  if (!(model.lipschitz() > 0.0)) throw ConfigError("execute_run: model has zero Lipschitz constant");
  SolverConfig sc;
  sc.gamma = spec.gamma_scale / model.lipschitz();
  sc.batch = static_cast<std::size_t>(spec.batch);
  sc.iterations = spec.iterations;
  sc.q_schedule = spec.accelerated ? QSchedule::Fista : QSchedule::Constant1;
  sc.seed = spec.seed;
  sc.dist_stride = cfg.dist_stride;
  sc.record_timing = cfg.record_timing;
  sc.cg_tol = cfg.cg_tol;
  sc.cg_max_iter = cfg.cg_max_iter;
  if (model.truth) sc.reference = model.truth->pixels;
  const int w = model.width;
  const int h = model.height;

  if (spec.algorithm == "ista" || spec.algorithm == "admm") {
    const double sigma = denoiser_sigma(cfg, "tv");
    const double lambda = cfg.lambda > 0.0 ? cfg.lambda : sigma * sigma / sc.gamma;
    TvProxOptions opt;
    opt.inner_iters = cfg.tv_inner_iters;
    opt.inner_tol = cfg.tv_inner_tol;
    opt.variant = cfg.tv_variant;
    const TvRegularizer reg(lambda, w, h, opt);
    return spec.algorithm == "ista" ? run_ista(model, reg, sc) : run_admm(model, reg, sc);
  }

  const DenoiserPtr den = make_denoiser(cfg, spec.denoiser, w, h);
  sc.sigma = denoiser_sigma(cfg, spec.denoiser);
  if (spec.algorithm == "pnp-ista") return run_pnp_ista(model, *den, sc);
  if (spec.algorithm == "pnp-admm") return run_pnp_admm(model, *den, sc);
  if (spec.algorithm == "pnp-sgd") {
    if (static_cast<std::size_t>(spec.batch) > model.num_components() && cfg.sampling == "epoch")
      throw ConfigError("execute_run: epoch sampling needs B <= I");
    sc.sampling = resolve_sampling(cfg.sampling, sc.batch, model.num_components());
    return run_pnp_sgd(model, *den, sc);
  }
  throw ConfigError("unknown algorithm '" + spec.algorithm + "'");
}

ReconstructResult cmd_reconstruct(const ExperimentConfig& cfg) {
  validate_config(cfg, "reconstruct");
  const MeasurementModel model = load_measurements(cfg.measurements);
  RunSpec spec;
  spec.algorithm = cfg.algorithm;
  spec.denoiser = cfg.denoiser;
  spec.accelerated = cfg.accelerated;
  spec.gamma_scale = cfg.gamma_scale;
  spec.batch = cfg.batch;
  spec.iterations = cfg.iterations;
  spec.seed = derive_seed(cfg.seed, kReconstructStream);

  ReconstructResult res;
  res.run = execute_run(cfg, model, spec);
  ensure_dir(cfg.output_dir);
  res.trace_csv = cfg.output_dir / "trace.csv";
  res.image_pgm = cfg.output_dir / "recon.pgm";
  res.metadata = cfg.output_dir / "recon.meta";
  write_text_file(res.trace_csv, format_trace_csv(res.run));

  double lo = res.run.x.allFinite() ? res.run.x.minCoeff() : 0.0;
  double hi = res.run.x.allFinite() ? res.run.x.maxCoeff() : 1.0;
  if (!(hi > lo)) hi = lo + 1.0;
  write_pgm(res.image_pgm, quantize_pgm(Image(res.run.x, model.width, model.height), lo, hi));

  std::string meta = fmt::format("window_lo={}\nwindow_hi={}\n", format_real(lo), format_real(hi));
  meta += fmt::format("status={}\n", res.run.status == RunStatus::Completed ? "completed" : "diverged");
  if (!res.run.diagnostic.empty()) meta += "reason=" + res.run.diagnostic + "\n";
  meta += fmt::format("iterations_run={}\ncg_warnings={}\n", res.run.iterations_run, res.run.cg_warnings);
  if (!res.run.trace.records.empty())
    meta += "final_snr_db=" + format_real(res.run.trace.records.back().snr_db) + "\n";
  meta += dump_config(cfg);
  write_text_file(res.metadata, meta);
  return res;
}

double SweepResult::cell(const std::string& denoiser, const std::string& variant, double gamma_scale,
                         int batch) const {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : runs) {
    if (r.denoiser != denoiser || r.gamma_scale != gamma_scale || r.batch != batch) continue;
    if (variant != "best" && r.variant != variant) continue;
    if (std::isnan(best) || r.min_dist < best) best = r.min_dist;
  }
  return best;
}

SweepResult cmd_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg, "sweep");
  const MeasurementModel model = obtain_model(cfg);

  // Distinct (gamma, B) cells: the step-size sweep at fixed B, then the minibatch sweep at fixed gamma.
  std::vector<std::pair<double, int>> cells;
  auto add_cell = [&](double g, int b) {
    if (std::find(cells.begin(), cells.end(), std::make_pair(g, b)) == cells.end()) cells.emplace_back(g, b);
  };
  for (double g : cfg.sweep_gammas) add_cell(g, cfg.sweep_fixed_batch);
  for (int b : cfg.sweep_batches) add_cell(cfg.sweep_fixed_gamma, b);

  struct Job {
    std::string denoiser;
    bool accelerated;
    std::size_t cell;
  };
  std::vector<Job> jobs;
  for (const auto& d : cfg.sweep_denoisers)
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (bool acc : {false, true}) jobs.push_back({d, acc, c});

  std::vector<SolverResult> results(jobs.size());
  std::vector<std::string> failures(jobs.size());
  run_pool(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    RunSpec spec;
    spec.algorithm = "pnp-sgd";
    spec.denoiser = job.denoiser;
    spec.accelerated = job.accelerated;
    spec.gamma_scale = cells[job.cell].first;
    spec.batch = cells[job.cell].second;
    spec.iterations = cfg.iterations;
    spec.seed = derive_seed(cfg.seed, kSweepStream + job.cell);
    try {
      results[j] = execute_run(cfg, model, spec);
    } catch (const ConfigError& e) {
      failures[j] = e.what();
    }
  });

  // Single collector writes every artifact.
  SweepResult res;
  const fs::path dir = cfg.output_dir / "sweep";
  ensure_dir(dir);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    SweepRun run;
    run.denoiser = job.denoiser;
    run.variant = job.accelerated ? "accelerated" : "basic";
    run.gamma_scale = cells[job.cell].first;
    run.batch = cells[job.cell].second;
    run.trace_csv = dir / fmt::format("{}_{}_{}_B{}.csv", run.denoiser, run.variant,
                                      gamma_file_label(run.gamma_scale), run.batch);
    if (!failures[j].empty()) {
      run.status = RunStatus::Diverged;
      run.reason = "config_error";
      run.min_dist = std::numeric_limits<double>::quiet_NaN();
      run.final_snr_db = std::numeric_limits<double>::quiet_NaN();
      run.trace_csv.clear();
    } else {
      const SolverResult& r = results[j];
      run.status = r.status;
      run.reason = r.diagnostic;
      run.dists = r.trace.dists();
      const TraceSummary s = summarize(r.trace);
      run.min_dist = s.min_dist;
      run.final_snr_db = s.final_snr_db;
      const std::string csv = format_trace_csv(r);
      write_text_file(run.trace_csv, csv);
      if (cfg.plots) {
        PlotOptions opt;
        opt.title = fmt::format("{} {} gamma={} B={}", run.denoiser, run.variant, gamma_label(run.gamma_scale),
                                run.batch);
        auto svg_path = run.trace_csv;
        svg_path.replace_extension(".svg");
        write_text_file(svg_path, svg_from_trace_csvs({{run.variant, csv}}, "k", "dist", opt));
      }
    }
    res.runs.push_back(std::move(run));
  }

  // Grouped plots in the layout of the step-size and minibatch figures.
  if (cfg.plots) {
    for (const auto& d : cfg.sweep_denoisers) {
      std::vector<std::pair<std::string, std::string>> by_gamma, by_batch;
      for (const auto& r : res.runs) {
        if (r.denoiser != d || r.trace_csv.empty()) continue;
        const std::string text = read_text_file(r.trace_csv);
        const std::string tag = r.variant == "accelerated" ? "acc" : "basic";
        if (r.batch == cfg.sweep_fixed_batch &&
            std::find(cfg.sweep_gammas.begin(), cfg.sweep_gammas.end(), r.gamma_scale) != cfg.sweep_gammas.end())
          by_gamma.emplace_back(fmt::format("{} gamma={}", tag, gamma_label(r.gamma_scale)), text);
        if (r.gamma_scale == cfg.sweep_fixed_gamma &&
            std::find(cfg.sweep_batches.begin(), cfg.sweep_batches.end(), r.batch) != cfg.sweep_batches.end())
          by_batch.emplace_back(fmt::format("{} B={}", tag, r.batch), text);
      }
      PlotOptions opt;
      opt.width = 760;
      opt.title = fmt::format("{}: step size, B={}", d, cfg.sweep_fixed_batch);
      write_text_file(dir / (d + "_gamma.svg"), svg_from_trace_csvs(by_gamma, "k", "dist", opt));
      opt.title = fmt::format("{}: minibatch size, gamma={}", d, gamma_label(cfg.sweep_fixed_gamma));
      write_text_file(dir / (d + "_batch.svg"), svg_from_trace_csvs(by_batch, "k", "dist", opt));
    }
  }

  CsvTable runs_table;
  runs_table.schema = "pnp-sweep-runs/1";
  runs_table.columns = {"denoiser", "variant", "gamma_scale", "batch", "status", "reason",
                        "min_dist", "final_snr_db", "trace_file"};
  for (const auto& r : res.runs)
    runs_table.rows.push_back({r.denoiser, r.variant, format_real(r.gamma_scale), std::to_string(r.batch),
                               r.status == RunStatus::Completed ? "completed" : "failed", r.reason,
                               format_real(r.min_dist), format_real(r.final_snr_db),
                               r.trace_csv.empty() ? "" : r.trace_csv.filename().string()});
  write_text_file(cfg.output_dir / "sweep_runs.csv", format_csv_table(runs_table));

  res.summary.schema = "pnp-sweep/1";
  res.summary.columns = {"denoiser", "variant"};
  for (double g : cfg.sweep_gammas) res.summary.columns.push_back("gamma=" + gamma_label(g));
  for (int b : cfg.sweep_batches) res.summary.columns.push_back(fmt::format("B={}", b));
  for (const auto& d : cfg.sweep_denoisers) {
    for (const std::string variant : {"basic", "accelerated", "best"}) {
      std::vector<std::string> row{d, variant};
      for (double g : cfg.sweep_gammas) row.push_back(format_real(res.cell(d, variant, g, cfg.sweep_fixed_batch)));
      for (int b : cfg.sweep_batches) row.push_back(format_real(res.cell(d, variant, cfg.sweep_fixed_gamma, b)));
      res.summary.rows.push_back(std::move(row));
    }
  }
  res.summary_csv = cfg.output_dir / "sweep_summary.csv";
  write_text_file(res.summary_csv, format_csv_table(res.summary));
  return res;
}

std::vector<std::size_t> fixed_subset(std::size_t num_components, std::size_t budget) {
  if (budget < 1 || budget > num_components) throw ConfigError("fixed_subset: budget must lie in [1, I]");
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < budget; ++j) idx.push_back(j * num_components / budget);
  return idx;
}

const CompareRun& CompareResult::find(const std::string& algorithm, int budget) const {
  for (const auto& r : runs)
    if (r.algorithm == algorithm && r.budget == budget) return r;
  throw ConfigError("compare: no run for " + algorithm + " at budget " + std::to_string(budget));
}

CompareResult cmd_compare(const ExperimentConfig& cfg) {
  validate_config(cfg, "compare");
  const MeasurementModel model = obtain_model(cfg);
  const std::size_t total = model.num_components();
  CompareResult res;
  const fs::path dir = cfg.output_dir / "compare";
  ensure_dir(dir);

  ExperimentConfig run_cfg = cfg;
  run_cfg.record_timing = cfg.compare_timing;
  run_cfg.dist_stride = cfg.compare_iterations;  // distance only at k = 0 and the last iterate

  for (int budget : cfg.compare_budgets) {
    if (static_cast<std::size_t>(budget) > total)
      throw ConfigError(fmt::format("compare: budget {} exceeds I = {}", budget, total));
    const auto subset_idx = fixed_subset(total, static_cast<std::size_t>(budget));
    const MeasurementModel subset = model.subset(subset_idx);
    std::vector<std::pair<std::string, std::string>> csvs;

    // Runs are sequential so the wallclock columns are not distorted by each other.
    for (const std::string algo : {"pnp-fista", "pnp-admm", "pnp-sgd"}) {
      RunSpec spec;
      spec.denoiser = cfg.denoiser;
      spec.gamma_scale = cfg.gamma_scale;
      spec.iterations = cfg.compare_iterations;
      spec.seed = derive_seed(cfg.seed, kCompareStream + static_cast<std::uint64_t>(budget));
      spec.batch = budget;
      ExperimentConfig c = run_cfg;
      SolverResult r;
      if (algo == "pnp-fista") {
        spec.algorithm = "pnp-ista";
        spec.accelerated = true;
        r = execute_run(c, subset, spec);
      } else if (algo == "pnp-admm") {
        spec.algorithm = "pnp-admm";
        r = execute_run(c, subset, spec);
      } else {
        spec.algorithm = "pnp-sgd";
        spec.accelerated = true;
        c.sampling = "epoch";
        r = execute_run(c, model, spec);
      }
      CompareRun run;
      run.algorithm = algo;
      run.budget = budget;
      run.status = r.status;
      const TraceSummary s = summarize(r.trace);
      run.final_snr_db = s.final_snr_db;
      run.per_iteration_seconds = s.per_iteration_seconds;
      run.trace_csv = dir / fmt::format("{}_budget{}.csv", algo, budget);
      const std::string csv = format_trace_csv(r);
      write_text_file(run.trace_csv, csv);
      csvs.emplace_back(algo, csv);
      res.runs.push_back(std::move(run));
    }
    if (cfg.plots) {
      PlotOptions opt;
      opt.log_y = false;
      opt.title = fmt::format("SNR vs iteration, budget {} of {}", budget, total);
      write_text_file(dir / fmt::format("snr_iteration_budget{}.svg", budget),
                      svg_from_trace_csvs(csvs, "k", "snr_db", opt));
      opt.title = fmt::format("SNR vs time, budget {} of {}", budget, total);
      opt.x_label = "elapsed_s";
      write_text_file(dir / fmt::format("snr_time_budget{}.svg", budget),
                      svg_from_trace_csvs(csvs, "elapsed_s", "snr_db", opt));
    }
  }

  CsvTable t;
  t.schema = "pnp-compare/1";
  t.columns = {"budget", "algorithm", "status", "final_snr_db", "per_iteration_seconds", "trace_file"};
  for (const auto& r : res.runs)
    t.rows.push_back({std::to_string(r.budget), r.algorithm, r.status == RunStatus::Completed ? "completed" : "diverged",
                      format_real(r.final_snr_db), format_real(r.per_iteration_seconds),
                      r.trace_csv.filename().string()});
  res.summary_csv = cfg.output_dir / "compare_summary.csv";
  write_text_file(res.summary_csv, format_csv_table(t));
  return res;
}

std::string format_counterexample_csv(const CounterexampleTrace& trace, double gamma, double sigma, double c) {
  CsvTable t;
  t.schema = "pnp-counterexample/1";
  t.columns = {"k", "z", "x", "dist", "residual", "upper_branch"};
  for (std::size_t k = 0; k < trace.z.size(); ++k) {
    const double z = trace.z[k];
    const double x = k == 0 ? std::numeric_limits<double>::quiet_NaN() : trace.x[k - 1];
    // residual |z - P(z)|^2 with P(v) = D(v - gamma d'(v))
    const double pz = shift_denoiser(z - gamma * huber_gradient(z), sigma, c);
    t.rows.push_back({std::to_string(k), format_real(z), format_real(x), format_real(z * z),
                      format_real((z - pz) * (z - pz)),
                      k == 0 ? "" : (trace.upper_branch[k - 1] ? "1" : "0")});
  }
  return format_csv_table(t);
}

CounterexampleResult cmd_counterexample(const ExperimentConfig& cfg) {
  validate_config(cfg, "counterexample");
  CounterexampleResult res;
  res.trace = run_counterexample(cfg.ce_gamma, cfg.ce_sigma, cfg.ce_c, cfg.ce_z0, cfg.ce_iterations);
  ensure_dir(cfg.output_dir);
  res.csv = cfg.output_dir / "counterexample.csv";
  write_text_file(res.csv, format_counterexample_csv(res.trace, cfg.ce_gamma, cfg.ce_sigma, cfg.ce_c));
  return res;
}

CertifyResult cmd_certify(const ExperimentConfig& cfg) {
  validate_config(cfg, "certify");
  CertifyResult res;
  const int g = cfg.cert_grid;
  const auto n = static_cast<std::size_t>(g) * static_cast<std::size_t>(g);
  std::uint64_t stream = kCertifyStream;
  for (const std::string name : {"tv", "filter", "shift"}) {
    ExperimentConfig c = cfg;
    c.damping = 0.0;
    const DenoiserPtr d = make_denoiser(c, name, g, g);
    CertifyRow row;
    row.denoiser = name;
    row.sigma = denoiser_sigma(cfg, name);
    const double tol = cfg.cert_tol + (name == "tv" ? cfg.tv_inner_tol : 0.0);
    row.certificate = certify_averaged(*d, n, cfg.cert_alpha, row.sigma, static_cast<std::size_t>(cfg.cert_pairs),
                                       cfg.cert_domain_scale, derive_seed(cfg.seed, stream++), tol);
    if (name == "shift") {
      // Samples with no zero entries see the full shift sigma sqrt(c) on every pixel.
      Rng rng(derive_seed(cfg.seed, stream++));
      std::uniform_real_distribution<double> mag(0.5, 2.0);
      std::bernoulli_distribution sign(0.5);
      std::vector<RealVec> samples;
      for (int s = 0; s < 16; ++s) {
        RealVec x(static_cast<Eigen::Index>(n));
        for (auto& v : x) v = sign(rng) ? mag(rng) : -mag(rng);
        samples.push_back(std::move(x));
      }
      row.certificate.bounded_constant_c = estimate_bounded_constant(*d, row.sigma, samples);
    }
    res.rows.push_back(std::move(row));
  }
  CsvTable t;
  t.schema = "pnp-certify/1";
  t.columns = {"denoiser", "alpha", "sigma", "pairs", "max_violation", "tolerance", "passed", "bounded_constant"};
  for (const auto& r : res.rows)
    t.rows.push_back({r.denoiser, format_real(r.certificate.alpha_tested), format_real(r.sigma),
                      std::to_string(r.certificate.pairs_tested), format_real(r.certificate.max_violation),
                      format_real(r.certificate.tolerance), r.certificate.passed ? "true" : "false",
                      r.certificate.bounded_constant_c ? format_real(*r.certificate.bounded_constant_c) : ""});
  ensure_dir(cfg.output_dir);
  res.csv = cfg.output_dir / "certify.csv";
  write_text_file(res.csv, format_csv_table(t));
  return res;
}

}  // namespace pnp
