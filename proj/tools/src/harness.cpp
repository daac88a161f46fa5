#include "harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "csv.hpp"
#include "mtvpar/metrics.hpp"
#include "mtvpar/mtv_par.hpp"
#include "svg.hpp"

namespace mtvpar::io {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double reduction(double baseline, double improved) {
  return baseline > 0.0 ? (baseline - improved) / baseline : 0.0;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception by index is rethrown.
template <typename Fn>
void for_each_index(std::size_t count, std::size_t threads, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(threads, count));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string_view to_string(Scenario scenario) noexcept {
  switch (scenario) {
    case Scenario::ConstantRate: return "constant_rate";
    case Scenario::DynamicRate: return "dynamic_rate";
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view text) {
  if (text == "constant_rate") return Scenario::ConstantRate;
  if (text == "dynamic_rate") return Scenario::DynamicRate;
  return std::nullopt;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(8);
  for (int i = 0; i < 8; ++i) grid[i] = 0.1 * std::pow(8.0, i / 7.0);
  return grid;
}

int scenario_window(Scenario scenario, std::size_t trials) {
  return scenario == Scenario::ConstantRate ? KernelConfig::full_pooling_window(trials) : 10;
}

RateFunctionSpec scenario_rate(Scenario scenario, std::size_t trials, std::size_t frames) {
  return scenario == Scenario::ConstantRate
             ? RateFunctionSpec::bimodal_constant(trials, frames)
             : RateFunctionSpec::bimodal_dynamic(trials, frames);
}

void require_valid(const StudyConfig& cfg) {
  if (cfg.replicates < 1) throw Error(ErrorCode::BadConfig, "replicates must be at least 1");
  if (cfg.lambda_grid.empty()) throw Error(ErrorCode::BadConfig, "empty lambda grid");
  for (double l : cfg.lambda_grid) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw Error(ErrorCode::BadPenalty, "grid lambdas must be positive");
    }
  }
  if (!(cfg.a > 0.0)) {
    throw Error(ErrorCode::BadConfig, "the time-varying method needs a > 0");
  }
  if (cfg.trials < 1 || cfg.frames < 2) {
    throw Error(ErrorCode::BadConfig, "need at least one trial of two frames");
  }
  if (!(cfg.q >= 0.0)) throw Error(ErrorCode::BadConfig, "q must be nonnegative");
}

std::uint64_t replicate_seed(std::uint64_t seed, int rep) {
  return substream_seed(seed, static_cast<std::uint64_t>(rep));
}

Score score_estimate(const SpikeRaster& truth_spikes, const RateField& truth_rates,
                     const SpikeRaster& est_spikes, const RateField& est_rates, double q) {
  if (!truth_spikes.counts.same_shape(est_spikes.counts)) {
    throw Error(ErrorCode::DimensionMismatch, "estimated and true rasters differ in shape");
  }
  const std::size_t trials = truth_spikes.trials();
  Score s;
  for (std::size_t r = 0; r < trials; ++r) {
    s.vp += vp_distance(raster_to_times(est_spikes.counts.row(r), est_spikes.sample_rate_hz),
                        raster_to_times(truth_spikes.counts.row(r), truth_spikes.sample_rate_hz),
                        q);
  }
  s.vp /= static_cast<double>(trials);
  s.l2 = l2_rate_error(truth_rates, est_rates);
  s.l2_marginal = l2_rate_error(marginal_rate(truth_rates), marginal_rate(est_rates));
  return s;
}

std::size_t vp_optimum(const std::vector<GridPoint>& points) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].mean_vp < points[best].mean_vp) best = i;
  }
  return best;
}

StudyResult run_study(const StudyConfig& cfg) {
  require_valid(cfg);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t grid = cfg.lambda_grid.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
  const int window = cfg.window_B.value_or(scenario_window(cfg.scenario, cfg.trials));

  struct Cell {
    Score score;
    bool max_iter = false;
  };
  // cells[rep][method * grid + k], method 0 = varying, 1 = constant
  std::vector<std::vector<Cell>> cells(reps, std::vector<Cell>(2 * grid));

  for_each_index(reps, cfg.threads, [&](std::size_t rep) {
    SimConfig sim;
    sim.trials = cfg.trials;
    sim.frames = cfg.frames;
    sim.gamma = cfg.true_gamma;
    sim.noise_sd = cfg.noise_sd;
    sim.sample_rate_hz = cfg.sample_rate_hz;
    sim.seed = replicate_seed(cfg.seed, static_cast<int>(rep));
    const SimulatedDataset data =
        simulate_dataset(scenario_rate(cfg.scenario, cfg.trials, cfg.frames), sim);
    for (std::size_t method = 0; method < 2; ++method) {
      for (std::size_t k = 0; k < grid; ++k) {
        FitConfig fc;
        fc.base_lambda = cfg.lambda_grid[k];
        fc.kernel = KernelConfig{cfg.sigma_ms, window, method == 0 ? cfg.a : 0.0};
        if (cfg.fit_gamma) fc.gamma = std::vector<double>(cfg.trials, *cfg.fit_gamma);
        fc.max_iter = cfg.max_iter;
        const FitResult fit = mtvpar::fit(data.traces, fc);
        Cell& cell = cells[rep][method * grid + k];
        cell.score = score_estimate(data.spikes, data.rates, fit.raster, fit.rates, cfg.q);
        cell.max_iter = fit.termination == Termination::MaxIter;
      }
    }
  });

  StudyResult result{.config = cfg, .varying = {}, .constant = {}};
  for (std::size_t method = 0; method < 2; ++method) {
    auto& points = method == 0 ? result.varying : result.constant;
    for (std::size_t k = 0; k < grid; ++k) {
      GridPoint p;
      p.lambda = cfg.lambda_grid[k];
      p.method = std::string(method == 0 ? kVaryingMethod : kConstantMethod);
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const Cell& cell = cells[rep][method * grid + k];
        p.mean_vp += cell.score.vp;
        p.mean_l2 += cell.score.l2;
        p.mean_l2_marginal += cell.score.l2_marginal;
        p.max_iter_runs += cell.max_iter ? 1 : 0;
      }
      p.mean_vp /= static_cast<double>(reps);
      p.mean_l2 /= static_cast<double>(reps);
      p.mean_l2_marginal /= static_cast<double>(reps);
      p.n_replicates = cfg.replicates;
      points.push_back(p);
    }
  }
  result.best_varying = vp_optimum(result.varying);
  result.best_constant = vp_optimum(result.constant);
  const GridPoint& tv = result.varying[result.best_varying];
  const GridPoint& cp = result.constant[result.best_constant];
  result.vp_reduction = reduction(cp.mean_vp, tv.mean_vp);
  result.l2_reduction = reduction(cp.mean_l2, tv.mean_l2);
  result.l2_marginal_reduction = reduction(cp.mean_l2_marginal, tv.mean_l2_marginal);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string study_csv(const StudyResult& result) {
  std::string out =
      "scenario,lambda,method,mean_vp,mean_l2_rate,mean_l2_marginal,n_replicates,"
      "max_iter_runs\n";
  for (const auto* points : {&result.varying, &result.constant}) {
    for (const GridPoint& p : *points) {
      out += std::string(to_string(result.config.scenario)) + ',' + format_double(p.lambda) +
             ',' + p.method + ',' + format_double(p.mean_vp) + ',' +
             format_double(p.mean_l2) + ',' + format_double(p.mean_l2_marginal) + ',' +
             std::to_string(p.n_replicates) + ',' + std::to_string(p.max_iter_runs) + '\n';
    }
  }
  return out;
}

std::string study_report(const StudyResult& result) {
  const StudyConfig& cfg = result.config;
  const GridPoint& tv = result.varying[result.best_varying];
  const GridPoint& cp = result.constant[result.best_constant];
  std::string md = "# Benchmark: " + std::string(to_string(cfg.scenario)) + "\n\n";
  md += "- replicates: " + std::to_string(cfg.replicates) + ", seed: " +
        std::to_string(cfg.seed) + "\n";
  md += "- trials x frames: " + std::to_string(cfg.trials) + " x " +
        std::to_string(cfg.frames) + " at " + fixed(cfg.sample_rate_hz, 1) + " Hz\n";
  md += "- simulated gamma " + fixed(cfg.true_gamma, 3) + ", noise sd " +
        fixed(cfg.noise_sd, 3) + "\n";
  md += "- kernel: sigma " + fixed(cfg.sigma_ms, 0) + " ms, B = " +
        std::to_string(cfg.window_B.value_or(scenario_window(cfg.scenario, cfg.trials))) +
        ", a = " + fixed(cfg.a, 2) + " (time-varying) vs 0 (constant)\n";
  md += "- fit gamma: " + (cfg.fit_gamma ? fixed(*cfg.fit_gamma, 4) : std::string("auto")) +
        ", max_iter " + std::to_string(cfg.max_iter) + ", VP q = " + fixed(cfg.q, 3) +
        " per second\n\n";

  md += "| lambda | VP time-varying | VP constant | L2 time-varying | L2 constant |"
        " L2 marginal time-varying | L2 marginal constant |\n";
  md += "|---|---|---|---|---|---|---|\n";
  for (std::size_t k = 0; k < result.varying.size(); ++k) {
    const GridPoint& a = result.varying[k];
    const GridPoint& b = result.constant[k];
    md += "| " + fixed(a.lambda, 4) + (k == result.best_varying ? " *" : "") +
          (k == result.best_constant ? " +" : "") + " | " + fixed(a.mean_vp, 3) + " | " +
          fixed(b.mean_vp, 3) + " | " + fixed(a.mean_l2, 4) + " | " + fixed(b.mean_l2, 4) +
          " | " + fixed(a.mean_l2_marginal, 4) + " | " + fixed(b.mean_l2_marginal, 4) + " |\n";
  }
  md += "\n`*` VP-optimal lambda for the time-varying penalty, `+` for the constant one.\n\n";
  md += "## At each method's VP-optimal lambda\n\n";
  md += "| | time-varying | constant | reduction |\n|---|---|---|---|\n";
  md += "| lambda | " + fixed(tv.lambda, 4) + " | " + fixed(cp.lambda, 4) + " | |\n";
  md += "| mean VP | " + fixed(tv.mean_vp, 3) + " | " + fixed(cp.mean_vp, 3) + " | " +
        fixed(100.0 * result.vp_reduction, 1) + "% |\n";
  md += "| mean L2 rate (field) | " + fixed(tv.mean_l2, 4) + " | " + fixed(cp.mean_l2, 4) +
        " | " + fixed(100.0 * result.l2_reduction, 1) + "% |\n";
  md += "| mean L2 rate (marginal) | " + fixed(tv.mean_l2_marginal, 4) + " | " +
        fixed(cp.mean_l2_marginal, 4) + " | " +
        fixed(100.0 * result.l2_marginal_reduction, 1) + "% |\n\n";
  int max_iter = 0;
  for (const auto* points : {&result.varying, &result.constant}) {
    for (const GridPoint& p : *points) max_iter += p.max_iter_runs;
  }
  md += "Fits ending at max_iter: " + std::to_string(max_iter) + ". Wall time: " +
        fixed(result.seconds, 1) + " s.\n";
  return md;
}

void write_study_outputs(const std::filesystem::path& dir, const StudyResult& result) {
  std::filesystem::create_directories(dir / "plots");
  write_file(dir / "benchmark_results.csv", study_csv(result));
  write_file(dir / "report.md", study_report(result));

  auto series = [&](const std::vector<GridPoint>& points, double GridPoint::*field,
                    const char* name, const char* color, bool dashed) {
    Series s{name, {}, {}, color, dashed};
    for (const GridPoint& p : points) {
      s.x.push_back(p.lambda);
      s.y.push_back(p.*field);
    }
    return s;
  };
  const LineChart vp{"VP distance", "lambda", "mean VP distance", true,
                     {series(result.varying, &GridPoint::mean_vp, "time-varying", "#d62728", false),
                      series(result.constant, &GridPoint::mean_vp, "constant", "#1f77b4", true)}};
  const LineChart l2{"Rate error", "lambda", "mean L2 rate error (spikes/s)", true,
                     {series(result.varying, &GridPoint::mean_l2, "time-varying", "#d62728", false),
                      series(result.constant, &GridPoint::mean_l2, "constant", "#1f77b4", true)}};
  write_file(dir / "plots" / "vp.svg", render_svg({vp}));
  write_file(dir / "plots" / "l2.svg", render_svg({l2}));
}

}  // namespace mtvpar::io
