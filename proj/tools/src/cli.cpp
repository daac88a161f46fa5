#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "harness.hpp"
#include "manifest.hpp"
#include "mtvpar/mtvpar.hpp"
#include "svg.hpp"

namespace mtvpar::io {

namespace fs = std::filesystem;

namespace {

struct Shared {
  std::string out;
  std::uint64_t seed = 1;
  double hz = 50.0;
  std::size_t threads = 1;
};

void add_shared(CLI::App* cmd, Shared& s, bool out_required) {
  auto* out = cmd->add_option("--out", s.out, "Output directory");
  if (out_required) out->required();
  cmd->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  cmd->add_option("--hz", s.hz, "Sample rate in Hz")->capture_default_str();
  cmd->add_option("--threads", s.threads, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

std::string real(double v) { return format_double(v); }

fs::path prepare_out(const std::string& out) {
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "cannot create output directory " + out);
  }
  return dir;
}

std::string absolute_string(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

// ---- simulate ---------------------------------------------------------

struct SimulateFlags {
  Shared shared;
  std::vector<std::string> rate{"bimodal"};
  std::optional<std::size_t> trials;
  std::optional<std::size_t> frames;
  double gamma = 0.96;
  double noise = 0.15;
  double amplitude = 1.0;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  const std::string& kind = f.rate.front();
  const bool table = kind == "table";
  if (table != (f.rate.size() == 2)) {
    throw Error(ErrorCode::BadConfig, "use --rate table FILE; other kinds take no file");
  }
  std::size_t trials = f.trials.value_or(50);
  std::size_t frames = f.frames.value_or(1000);
  RateFunctionSpec spec;
  std::vector<std::string> inputs;
  if (kind == "bimodal") {
    spec = RateFunctionSpec::bimodal_constant(trials, frames);
  } else if (kind == "bimodal2d") {
    spec = RateFunctionSpec::bimodal_dynamic(trials, frames);
  } else if (kind == "zero") {
    spec = RateFunctionSpec::zero(trials, frames);
  } else if (table) {
    const fs::path path(f.rate[1]);
    MatrixFile<double> file = read_real_matrix(path);
    if ((f.trials && *f.trials != file.values.rows()) ||
        (f.frames && *f.frames != file.values.cols())) {
      throw Error(ErrorCode::DimensionMismatch, "--R/--T disagree with the rate table shape");
    }
    trials = file.values.rows();
    frames = file.values.cols();
    spec = RateFunctionSpec::custom_table(std::move(file.values));
    inputs.push_back(absolute_string(path));
  } else {
    throw Error(ErrorCode::BadConfig, "unknown rate kind '" + kind + "'");
  }

  SimConfig cfg;
  cfg.trials = trials;
  cfg.frames = frames;
  cfg.gamma = f.gamma;
  cfg.noise_sd = f.noise;
  cfg.sample_rate_hz = f.shared.hz;
  cfg.spike_amplitude = f.amplitude;
  cfg.seed = f.shared.seed;
  const SimulatedDataset data = simulate_dataset(spec, cfg);

  const fs::path dir = prepare_out(f.shared.out);
  write_traces(dir / "traces.csv", data.traces);
  write_matrix(dir / "truth_spikes.csv", data.spikes.counts, cfg.sample_rate_hz);
  write_matrix(dir / "truth_rates.csv", data.rates.rates, cfg.sample_rate_hz);

  RunManifest m;
  m.command = "simulate";
  m.seed = cfg.seed;
  m.config = {{"rate", kind},          {"R", trials},          {"T", frames},
              {"gamma", cfg.gamma},    {"noise", cfg.noise_sd}, {"amplitude", cfg.spike_amplitude},
              {"hz", cfg.sample_rate_hz}, {"seed", cfg.seed}};
  m.argv = {"simulate", "--rate", kind};
  if (table) {
    m.config["table"] = inputs.front();
    m.argv.push_back(inputs.front());
  }
  for (auto& extra : std::vector<std::string>{
           "--R", std::to_string(trials), "--T", std::to_string(frames), "--gamma",
           real(cfg.gamma), "--noise", real(cfg.noise_sd), "--amplitude",
           real(cfg.spike_amplitude), "--hz", real(cfg.sample_rate_hz), "--seed",
           std::to_string(cfg.seed)}) {
    m.argv.push_back(extra);
  }
  m.inputs = inputs;
  std::vector<fs::path> input_paths(inputs.begin(), inputs.end());
  m.input_digest = digest_files(input_paths);
  m.timestamp = utc_timestamp();
  write_manifest(dir, m);

  long total = 0;
  for (int c : data.spikes.counts.values()) total += c;
  out << "simulated " << trials << " trials x " << frames << " frames, " << total
      << " spikes -> " << dir.string() << "\n";
  return kExitOk;
}

// ---- fit ----------------------------------------------------------------

struct FitFlags {
  Shared shared;
  bool hz_given = false;
  std::string traces;
  double lambda = 0.0;
  double a = 1.0;
  double sigma_ms = 200.0;
  std::optional<int> window_B;
  std::string gamma = "auto";
  int max_iter = 20;
};

nlohmann::json segments_json(const FitResult& res, double lambda) {
  nlohmann::json trials = nlohmann::json::array();
  for (std::size_t r = 0; r < res.segmentations.size(); ++r) {
    const Segmentation& seg = res.segmentations[r];
    std::vector<std::size_t> frames;
    for (std::size_t tau : seg.changepoints) frames.push_back(tau + 1);
    trials.push_back({{"trial", r + 1},
                      {"gamma", res.gamma[r]},
                      {"objective", seg.objective},
                      {"changepoints", seg.changepoints},
                      {"spike_frames", frames},
                      {"jumps", seg.jumps}});
  }
  return {{"lambda", lambda},
          {"termination", std::string(to_string(res.termination))},
          {"iterations", res.iterations},
          {"objective_trace", res.objective_trace},
          {"trials", trials}};
}

int cmd_fit(const FitFlags& f, std::ostream& out) {
  const fs::path traces_path(f.traces);
  TraceSet traces = read_traces(traces_path, f.shared.hz);
  if (f.hz_given) traces.sample_rate_hz = f.shared.hz;

  FitConfig cfg;
  cfg.base_lambda = f.lambda;
  cfg.kernel.sigma_ms = f.sigma_ms;
  cfg.kernel.a = f.a;
  cfg.kernel.window_B =
      f.window_B.value_or(KernelConfig::full_pooling_window(traces.trials()));
  cfg.max_iter = f.max_iter;
  cfg.threads = f.shared.threads;
  if (f.gamma != "auto") {
    double g = 0.0;
    try {
      g = parse_double(f.gamma, 1, 1);
    } catch (const Error&) {
      throw Error(ErrorCode::BadConfig, "--gamma must be 'auto' or a number");
    }
    cfg.gamma = std::vector<double>(traces.trials(), g);
  }
  const FitResult res = fit(traces, cfg);

  const fs::path dir = prepare_out(f.shared.out);
  write_spike_rows(dir / "spikes.csv", spike_rows(res.segmentations, traces.sample_rate_hz));
  write_matrix(dir / "rates.csv", res.rates.rates, traces.sample_rate_hz);
  write_matrix(dir / "penalties.csv", res.penalties.penalties, traces.sample_rate_hz);
  write_file(dir / "segments.json", segments_json(res, f.lambda).dump(2) + "\n");

  RunManifest m;
  m.command = "fit";
  m.seed = f.shared.seed;
  const std::string abs_traces = absolute_string(traces_path);
  m.config = {{"traces", abs_traces},
              {"lambda", f.lambda},
              {"a", f.a},
              {"sigma_ms", f.sigma_ms},
              {"B", cfg.kernel.window_B},
              {"gamma", f.gamma},
              {"max_iter", f.max_iter},
              {"hz", traces.sample_rate_hz},
              {"threads", f.shared.threads}};
  m.argv = {"fit",         "--traces", abs_traces,           "--lambda", real(f.lambda),
            "--a",         real(f.a),  "--sigma-ms",         real(f.sigma_ms),
            "--B",         std::to_string(cfg.kernel.window_B),
            "--gamma",     f.gamma,    "--max-iter",         std::to_string(f.max_iter),
            "--hz",        real(traces.sample_rate_hz),
            "--seed",      std::to_string(f.shared.seed)};
  m.inputs = {abs_traces};
  m.input_digest = digest_files({traces_path});
  m.timestamp = utc_timestamp();
  write_manifest(dir, m);

  std::size_t spikes = 0;
  for (const auto& seg : res.segmentations) spikes += seg.changepoints.size();
  out << "fit: " << spikes << " spikes, " << to_string(res.termination) << " after "
      << res.iterations << " iterations -> " << dir.string() << "\n";
  return res.termination == Termination::MaxIter ? kExitMaxIter : kExitOk;
}

// ---- evaluate -----------------------------------------------------------

struct EvaluateFlags {
  Shared shared;
  std::string est;
  std::string truth;
  double q = 1.0;
};

bool is_run_dir(const fs::path& p) {
  return fs::is_regular_file(p / "spikes.csv") || fs::is_regular_file(p / "truth_spikes.csv");
}

bool is_truth_dir(const fs::path& p) { return fs::is_regular_file(p / "truth_spikes.csv"); }

std::vector<fs::path> sorted_subdirs(const fs::path& p) {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(p)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

struct EstRun {
  fs::path est;
  fs::path truth;
};

// A run directory; a directory of runs sharing one truth (or with truth
// subdirectories of the same names); or replicate directories of runs,
// matched to truth/<replicate>.
std::vector<EstRun> collect_runs(const fs::path& est, const fs::path& truth) {
  if (!fs::is_directory(est)) throw Error(ErrorCode::MissingInput, "no directory " + est.string());
  if (!fs::is_directory(truth)) {
    throw Error(ErrorCode::MissingInput, "no directory " + truth.string());
  }
  auto truth_for = [&](const std::string& name) {
    return is_truth_dir(truth) ? truth : truth / name;
  };
  std::vector<EstRun> runs;
  if (is_run_dir(est)) {
    runs.push_back({est, truth});
  } else {
    for (const fs::path& sub : sorted_subdirs(est)) {
      if (is_run_dir(sub)) {
        runs.push_back({sub, truth_for(sub.filename().string())});
        continue;
      }
      for (const fs::path& run : sorted_subdirs(sub)) {
        if (is_run_dir(run)) runs.push_back({run, truth_for(sub.filename().string())});
      }
    }
  }
  if (runs.empty()) {
    throw Error(ErrorCode::MissingInput, "no spikes.csv found under " + est.string());
  }
  for (const EstRun& r : runs) {
    if (!is_truth_dir(r.truth)) {
      throw Error(ErrorCode::MissingInput, "no truth_spikes.csv in " + r.truth.string());
    }
  }
  return runs;
}

fs::path require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error(ErrorCode::MissingInput, "missing " + p.string());
  return p;
}

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  const std::vector<EstRun> runs = collect_runs(f.est, f.truth);

  struct Key {
    std::string method;
    double lambda;
    bool operator<(const Key& o) const {
      if (method != o.method) return method < o.method;
      // NaN lambdas (no fit manifest) sort last and compare equal.
      const bool a = std::isnan(lambda), b = std::isnan(o.lambda);
      if (a || b) return !a && b;
      return lambda < o.lambda;
    }
  };
  struct Sum {
    double vp = 0, l2 = 0, l2m = 0;
    int n = 0;
  };
  std::map<Key, Sum> groups;
  std::vector<fs::path> inputs;

  for (const EstRun& run : runs) {
    const fs::path truth_spikes_path = require_file(run.truth / "truth_spikes.csv");
    const fs::path truth_rates_path = require_file(run.truth / "truth_rates.csv");
    MatrixFile<int> ts = read_count_matrix(truth_spikes_path);
    MatrixFile<double> tr = read_real_matrix(truth_rates_path);
    const double hz = ts.sample_rate_hz.value_or(f.shared.hz);
    const SpikeRaster truth_spikes{std::move(ts.values), hz};
    const RateField truth_rates{std::move(tr.values)};
    inputs.push_back(truth_spikes_path);
    inputs.push_back(truth_rates_path);

    Key key{"truth", std::numeric_limits<double>::quiet_NaN()};
    SpikeRaster est_spikes;
    RateField est_rates;
    if (fs::is_regular_file(run.est / "spikes.csv")) {
      const fs::path sp = run.est / "spikes.csv";
      const fs::path rp = require_file(run.est / "rates.csv");
      est_spikes = raster_from_rows(read_spike_rows(sp), truth_spikes.trials(),
                                    truth_spikes.frames(), hz);
      est_rates = RateField{read_real_matrix(rp).values};
      inputs.push_back(sp);
      inputs.push_back(rp);
      key.method = "estimate";
      if (fs::is_regular_file(run.est / "manifest.json")) {
        const RunManifest m = read_manifest(run.est / "manifest.json");
        if (m.command == "fit") {
          key.lambda = m.config.at("lambda").get<double>();
          key.method = std::string(m.config.at("a").get<double>() > 0.0 ? kVaryingMethod
                                                                          : kConstantMethod);
        }
      }
    } else {
      const fs::path sp = run.est / "truth_spikes.csv";
      const fs::path rp = require_file(run.est / "truth_rates.csv");
      est_spikes = SpikeRaster{read_count_matrix(sp).values, hz};
      est_rates = RateField{read_real_matrix(rp).values};
      inputs.push_back(sp);
      inputs.push_back(rp);
    }
    if (!est_rates.rates.same_shape(truth_rates.rates) ||
        !est_spikes.counts.same_shape(truth_spikes.counts)) {
      throw Error(ErrorCode::DimensionMismatch,
                  run.est.string() + " does not match the shape of " + run.truth.string());
    }
    const Score s = score_estimate(truth_spikes, truth_rates, est_spikes, est_rates, f.q);
    Sum& g = groups[key];
    g.vp += s.vp;
    g.l2 += s.l2;
    g.l2m += s.l2_marginal;
    g.n += 1;
  }

  const fs::path dir = prepare_out(f.shared.out);
  if (fs::is_regular_file(dir / "manifest.json") &&
      read_manifest(dir / "manifest.json").command != "evaluate") {
    throw Error(ErrorCode::BadConfig,
                dir.string() + " already holds another command's manifest; choose a new --out");
  }
  std::string csv = "lambda,method,mean_vp,mean_l2_rate,n_replicates,mean_l2_marginal\n";
  std::map<std::string, std::pair<Series, Series>> by_method;
  for (const auto& [key, g] : groups) {
    const double vp = g.vp / g.n, l2 = g.l2 / g.n, l2m = g.l2m / g.n;
    csv += format_double(key.lambda) + ',' + key.method + ',' + format_double(vp) + ',' +
           format_double(l2) + ',' + std::to_string(g.n) + ',' + format_double(l2m) + '\n';
    auto& [vps, l2s] = by_method[key.method];
    vps.name = l2s.name = key.method;
    vps.x.push_back(key.lambda);
    vps.y.push_back(vp);
    l2s.x.push_back(key.lambda);
    l2s.y.push_back(l2);
  }
  write_file(dir / "metrics.csv", csv);

  const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
  LineChart vp_chart{"VP distance", "lambda", "mean VP distance", true, {}};
  LineChart l2_chart{"Rate error", "lambda", "mean L2 rate error (spikes/s)", true, {}};
  std::size_t colour = 0;
  for (auto& [method, pair] : by_method) {
    pair.first.color = pair.second.color = palette[colour++ % 4];
    pair.first.dashed = pair.second.dashed = method == kConstantMethod;
    vp_chart.series.push_back(pair.first);
    l2_chart.series.push_back(pair.second);
  }
  write_file(dir / "summary.svg", render_svg({vp_chart, l2_chart}));

  RunManifest m;
  m.command = "evaluate";
  const std::string est_abs = absolute_string(f.est), truth_abs = absolute_string(f.truth);
  m.config = {{"est", est_abs}, {"truth", truth_abs}, {"q", f.q}, {"hz", f.shared.hz},
              {"runs", runs.size()}};
  m.argv = {"evaluate", "--est", est_abs, "--truth", truth_abs, "--q", real(f.q),
            "--hz", real(f.shared.hz)};
  for (const fs::path& p : inputs) m.inputs.push_back(absolute_string(p));
  m.input_digest = digest_files(inputs);
  m.timestamp = utc_timestamp();
  write_manifest(dir, m);

  out << "evaluated " << runs.size() << " run(s) in " << groups.size() << " group(s) -> "
      << (dir / "metrics.csv").string() << "\n";
  return kExitOk;
}

// ---- benchmark ----------------------------------------------------------

struct BenchmarkFlags {
  Shared shared;
  std::string scenario = "constant_rate";
  int replicates = 20;
  std::string lambda_grid;
  std::size_t trials = 50;
  std::size_t frames = 1000;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::size_t start = 0, column = 1;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string_view item(text.data() + start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    grid.push_back(parse_double(item, 1, column));
    column += comma - start + 1;
    start = comma + 1;
  }
  return grid;
}

int cmd_benchmark(const BenchmarkFlags& f, std::ostream& out) {
  const auto scenario = parse_scenario(f.scenario);
  if (!scenario) throw Error(ErrorCode::BadConfig, "unknown scenario '" + f.scenario + "'");
  StudyConfig cfg;
  cfg.scenario = *scenario;
  cfg.replicates = f.replicates;
  if (!f.lambda_grid.empty()) cfg.lambda_grid = parse_grid(f.lambda_grid);
  cfg.seed = f.shared.seed;
  cfg.threads = f.shared.threads;
  cfg.sample_rate_hz = f.shared.hz;
  cfg.trials = f.trials;
  cfg.frames = f.frames;
  const StudyResult result = run_study(cfg);

  const fs::path dir = prepare_out(f.shared.out);
  write_study_outputs(dir, result);

  std::string grid_text;
  nlohmann::json grid_json = nlohmann::json::array();
  for (double l : cfg.lambda_grid) {
    grid_text += (grid_text.empty() ? "" : ",") + real(l);
    grid_json.push_back(l);
  }
  RunManifest m;
  m.command = "benchmark";
  m.seed = cfg.seed;
  m.config = {{"scenario", f.scenario},
              {"replicates", cfg.replicates},
              {"lambda_grid", grid_json},
              {"R", cfg.trials},
              {"T", cfg.frames},
              {"hz", cfg.sample_rate_hz},
              {"gamma", cfg.true_gamma},
              {"noise", cfg.noise_sd},
              {"sigma_ms", cfg.sigma_ms},
              {"B", scenario_window(cfg.scenario, cfg.trials)},
              {"fit_gamma", "auto"},
              {"a", cfg.a},
              {"max_iter", cfg.max_iter},
              {"q", cfg.q},
              {"seed", cfg.seed}};
  m.argv = {"benchmark", "--scenario", f.scenario, "--replicates",
            std::to_string(cfg.replicates), "--lambda-grid", grid_text,
            "--R", std::to_string(cfg.trials), "--T", std::to_string(cfg.frames),
            "--hz", real(cfg.sample_rate_hz), "--seed", std::to_string(cfg.seed),
            "--threads", std::to_string(cfg.threads)};
  m.input_digest = digest_files({});
  m.timestamp = utc_timestamp();
  write_manifest(dir, m);

  const GridPoint& tv = result.varying[result.best_varying];
  const GridPoint& cp = result.constant[result.best_constant];
  out << to_string(cfg.scenario) << ": VP " << tv.mean_vp << " (lambda " << tv.lambda
      << ") vs " << cp.mean_vp << " (lambda " << cp.lambda << "), reduction "
      << 100.0 * result.vp_reduction << "%; L2 reduction " << 100.0 * result.l2_reduction
      << "% -> " << dir.string() << "\n";
  return kExitOk;
}

// ---- replay -------------------------------------------------------------

struct ReplayFlags {
  std::string manifest;
  std::string out;
};

int cmd_replay(const ReplayFlags& f, std::ostream& out, std::ostream& err) {
  const RunManifest m = read_manifest(f.manifest);
  std::vector<fs::path> inputs(m.inputs.begin(), m.inputs.end());
  if (digest_files(inputs) != m.input_digest) {
    throw Error(ErrorCode::IoError, "inputs changed since the manifest was written");
  }
  if (m.argv.empty() || m.argv.front() != m.command) {
    throw Error(ErrorCode::ParseError, "manifest has no replayable command line");
  }
  std::vector<std::string> args = m.argv;
  args.push_back("--out");
  args.push_back(f.out);
  return run_cli(args, out, err);
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::MissingInput:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::EmptyTrial:
    case ErrorCode::ConstantTrace:
    case ErrorCode::DimensionMismatch:
      return kExitParse;
    default:
      return kExitUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spike detection and firing-rate estimation for multi-trial calcium imaging",
               "mtvpar"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate spike trains and fluorescence traces");
  add_shared(simulate, sim.shared, true);
  simulate->add_option("--rate", sim.rate, "bimodal | bimodal2d | zero | table FILE")
      ->expected(1, 2)
      ->capture_default_str();
  simulate->add_option("--R", sim.trials, "Trials (default 50)");
  simulate->add_option("--T", sim.frames, "Frames per trial (default 1000)");
  simulate->add_option("--gamma", sim.gamma, "Calcium decay")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "Noise standard deviation")->capture_default_str();
  simulate->add_option("--amplitude", sim.amplitude, "Calcium jump per spike")
      ->capture_default_str();

  FitFlags fitf;
  auto* fit_cmd = app.add_subcommand("fit", "Detect spikes and estimate firing rates");
  add_shared(fit_cmd, fitf.shared, true);
  fit_cmd->add_option("--traces", fitf.traces, "traces.csv")->required();
  fit_cmd->add_option("--lambda", fitf.lambda, "Base penalty")->required();
  fit_cmd->add_option("--a", fitf.a, "Penalty sharpness; 0 gives a constant penalty")
      ->capture_default_str();
  fit_cmd->add_option("--sigma-ms", fitf.sigma_ms, "Kernel bandwidth in ms")->capture_default_str();
  fit_cmd->add_option("--B", fitf.window_B, "Trial window (default: all trials)");
  fit_cmd->add_option("--gamma", fitf.gamma, "auto or a decay in (0, 1)")->capture_default_str();
  fit_cmd->add_option("--max-iter", fitf.max_iter, "Alternation limit")->capture_default_str();

  EvaluateFlags ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score estimates against ground truth");
  add_shared(evaluate, ev.shared, true);
  evaluate->add_option("--est", ev.est, "Run directory or directory of runs")->required();
  evaluate->add_option("--truth", ev.truth, "Simulation directory")->required();
  evaluate->add_option("--q", ev.q, "VP shift cost per second")->capture_default_str();

  BenchmarkFlags bench;
  auto* benchmark = app.add_subcommand("benchmark", "Monte-Carlo comparison over a lambda grid");
  add_shared(benchmark, bench.shared, true);
  benchmark->add_option("--scenario", bench.scenario, "constant_rate | dynamic_rate")
      ->capture_default_str();
  benchmark->add_option("--replicates", bench.replicates, "Simulated data sets")
      ->capture_default_str();
  benchmark->add_option("--lambda-grid", bench.lambda_grid,
                        "Comma-separated lambdas (default: 8 log-spaced from 0.1 to 0.8)");
  benchmark->add_option("--R", bench.trials, "Trials")->capture_default_str();
  benchmark->add_option("--T", bench.frames, "Frames per trial")->capture_default_str();

  ReplayFlags replay;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("--manifest", replay.manifest, "manifest.json")->required();
  replay_cmd->add_option("--out", replay.out, "Output directory")->required();

  std::vector<std::string> storage{"mtvpar"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (fit_cmd->parsed()) {
      fitf.hz_given = fit_cmd->count("--hz") > 0;
      return cmd_fit(fitf, out);
    }
    if (evaluate->parsed()) return cmd_evaluate(ev, out);
    if (benchmark->parsed()) return cmd_benchmark(bench, out);
    if (replay_cmd->parsed()) return cmd_replay(replay, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitUsage;
}

}  // namespace mtvpar::io
