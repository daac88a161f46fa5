// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   mtvpar_acceptance [--only N[,N...]] [--threads K]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/tools/minima.hpp>

#include "harness.hpp"
#include "mtvpar/mtvpar.hpp"

namespace {

using namespace mtvpar;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string pct(double v) { return fmt(100.0 * v, 3) + "%"; }

// ---- shared instance generators ---------------------------------------------

// AR(1) trace with Bernoulli spikes and Gaussian noise.
std::vector<double> random_trace(std::mt19937_64& rng, std::size_t frames, double gamma) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double spike_prob = 0.05 + 0.25 * u(rng);
  const double noise = 0.05 + 0.4 * u(rng);
  std::normal_distribution<double> gauss(0.0, noise);
  std::vector<double> y(frames);
  double c = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    c = gamma * c + (u(rng) < spike_prob ? 0.5 + 1.5 * u(rng) : 0.0);
    y[t] = c + gauss(rng);
  }
  return y;
}

std::vector<double> random_penalty(std::mt19937_64& rng, std::size_t frames) {
  std::uniform_real_distribution<double> u(0.05, 1.5);
  if (std::bernoulli_distribution(0.3)(rng)) return std::vector<double>(frames, u(rng));
  std::vector<double> p(frames);
  for (double& v : p) v = u(rng);
  return p;
}

// 1/2 sum (y - c)^2 plus the spike-frame penalties, recomputed from scratch.
double direct_objective(const std::vector<double>& y, const Segmentation& s,
                        const std::vector<double>& penalty) {
  long double sq = 0.0L;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const long double d = (long double)y[t] - s.calcium[t];
    sq += d * d;
  }
  long double pen = 0.0L;
  for (std::size_t tau : s.changepoints) pen += penalty[tau];
  return double(0.5L * sq + pen);
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---- 1 and 2: Monte-Carlo comparison -----------------------------------------

Outcome study_criterion(io::Scenario scenario, std::uint64_t seed, std::size_t threads,
                        double vp_target, double l2_target) {
  io::StudyConfig cfg;
  cfg.scenario = scenario;
  cfg.seed = seed;
  cfg.threads = threads;
  const io::StudyResult res = io::run_study(cfg);
  const auto& v = res.varying[res.best_varying];
  const auto& c = res.constant[res.best_constant];
  std::ostringstream os;
  os << "VP " << fmt(c.mean_vp) << " -> " << fmt(v.mean_vp) << " (" << pct(res.vp_reduction)
     << ", need >= " << pct(vp_target) << "); l2 " << fmt(c.mean_l2) << " -> " << fmt(v.mean_l2)
     << " (" << pct(res.l2_reduction) << ", need >= " << pct(l2_target) << "); lambda* "
     << fmt(v.lambda, 3) << "/" << fmt(c.lambda, 3) << "; marginal l2 " << pct(res.l2_marginal_reduction)
     << "; " << fmt(res.seconds, 3) << " s";
  const bool ok = res.vp_reduction >= vp_target && res.l2_reduction >= l2_target &&
                  res.seconds < 600.0;
  return {ok, os.str()};
}

// ---- 3: solver exactness -----------------------------------------------------

Outcome solver_exactness() {
  std::mt19937_64 rng(7301);
  std::uniform_real_distribution<double> gamma_dist(0.5, 0.99);
  int brute_bad = 0, brute_spikes = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t frames = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
    const double gamma = gamma_dist(rng);
    const auto y = random_trace(rng, frames, gamma);
    const auto pen = random_penalty(rng, frames);
    const Segmentation exact = solve_l0_exact(y, gamma, pen);
    const Segmentation brute = brute_force_l0(y, gamma, pen);
    brute_spikes += int(exact.changepoints.size());
    if (exact.changepoints != brute.changepoints ||
        !rel_close(exact.objective, brute.objective, 1e-9) ||
        !rel_close(exact.objective, direct_objective(y, exact, pen), 1e-9)) {
      ++brute_bad;
    }
  }
  int pruned_bad = 0, pruned_spikes = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t frames = i % 2 == 0 ? 50 : 200;
    const double gamma = gamma_dist(rng);
    const auto y = random_trace(rng, frames, gamma);
    const auto pen = random_penalty(rng, frames);
    const Segmentation exact = solve_l0_exact(y, gamma, pen);
    const Segmentation pruned = solve_l0(y, gamma, pen);
    pruned_spikes += int(pruned.changepoints.size());
    if (exact.changepoints != pruned.changepoints ||
        !rel_close(exact.objective, pruned.objective, 1e-9)) {
      ++pruned_bad;
    }
  }
  std::ostringstream os;
  os << "exact vs brute force: " << 200 - brute_bad << "/200 agree (" << brute_spikes
     << " changepoints); pruned vs exact: " << 500 - pruned_bad << "/500 agree ("
     << pruned_spikes << " changepoints)";
  return {brute_bad == 0 && pruned_bad == 0, os.str()};
}

// ---- 4: closed-form segment cost ------------------------------------------------

Outcome closed_form() {
  std::mt19937_64 rng(7401);
  std::uniform_real_distribution<double> gamma_dist(0.5, 0.999);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double gamma = gamma_dist(rng);
    const auto y = random_trace(rng, 80, gamma);
    std::size_t first = std::uniform_int_distribution<std::size_t>(1, 80)(rng);
    std::size_t last = std::uniform_int_distribution<std::size_t>(1, 80)(rng);
    if (first > last) std::swap(first, last);

    const auto residual = [&](double level) {
      double s = 0.0, w = 1.0;
      for (std::size_t t = first; t <= last; ++t, w *= gamma) {
        const double d = y[t - 1] - level * w;
        s += d * d;
      }
      return 0.5 * s;
    };
    double ymax = 0.0;
    for (std::size_t t = first; t <= last; ++t) ymax = std::max(ymax, std::abs(y[t - 1]));
    const double bound = ymax / (1.0 - gamma) + 1.0;
    const auto [level, cost] = boost::math::tools::brent_find_minima(
        residual, -bound, bound, std::numeric_limits<double>::digits);
    (void)level;
    worst = std::max(worst, std::abs(segment_cost(y, first, last, gamma) - cost));
  }
  return {worst <= 1e-8, "200 segments, max |closed form - numeric minimum| = " + fmt(worst, 3) +
                             " (need <= 1e-08)"};
}

// ---- 5: penalty normalization ----------------------------------------------------

Outcome penalty_normalization() {
  std::mt19937_64 rng(7501);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int zero_trials = 0;
  bool a0_constant = true;
  for (int field = 0; field < 100; ++field) {
    const std::size_t trials = 1 + field % 12, frames = 50 + 37 * (field % 9);
    RateField rates{Matrix<double>(trials, frames, 0.0)};
    for (std::size_t r = 0; r < trials; ++r) {
      const int kind = int(u(rng) * 4);
      if (kind == 0) {
        ++zero_trials;
        continue;
      }
      const double scale = std::pow(10.0, 4.0 * u(rng) - 2.0);
      for (std::size_t t = 0; t < frames; ++t) {
        if (kind == 1) rates.rates(r, t) = scale * u(rng);
        if (kind == 2) rates.rates(r, t) = scale * std::exp(-std::pow((double(t) - frames / 2.0) / 20.0, 2));
        if (kind == 3) rates.rates(r, t) = u(rng) < 0.05 ? scale : 0.0;
      }
    }
    const double lambda = std::pow(10.0, 3.0 * u(rng) - 2.0);
    for (double a : {0.5, 1.0, 3.0, 10.0}) {
      const PenaltyField pf = build_penalty(rates, lambda, a);
      for (std::size_t r = 0; r < trials; ++r) {
        long double sum = 0.0L;
        for (double p : pf.penalties.row(r)) sum += p;
        worst = std::max(worst, std::abs(double(sum / frames) - lambda) / lambda);
      }
    }
    const PenaltyField flat = build_penalty(rates, lambda, 0.0);
    for (double p : flat.penalties.values()) a0_constant = a0_constant && p == lambda;
  }
  std::ostringstream os;
  os << "100 fields (" << zero_trials << " all-zero trials), max relative mean error "
     << fmt(worst, 3) << " (need <= 1e-09); a=0 exactly constant: " << (a0_constant ? "yes" : "no");
  return {worst <= 1e-9 && a0_constant, os.str()};
}

// ---- 6: metric axioms ------------------------------------------------------------

// Textbook Victor-Purpura recursion over prefixes.
double reference_vp(const std::vector<double>& a, const std::vector<double>& b, double q) {
  std::vector<std::vector<double>> g(a.size() + 1, std::vector<double>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) g[i][0] = double(i);
  for (std::size_t j = 0; j <= b.size(); ++j) g[0][j] = double(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      g[i][j] = std::min({g[i - 1][j] + 1.0, g[i][j - 1] + 1.0,
                          g[i - 1][j - 1] + q * std::abs(a[i - 1] - b[j - 1])});
    }
  }
  return g[a.size()][b.size()];
}

std::vector<double> random_train(std::mt19937_64& rng) {
  std::set<double> times;
  const int n = std::uniform_int_distribution<int>(0, 15)(rng);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  while (int(times.size()) < n) times.insert(u(rng));
  return {times.begin(), times.end()};
}

Outcome metric_axioms() {
  std::mt19937_64 rng(7601);
  const double qs[] = {0.1, 1.0, 10.0};
  int bad = 0;
  std::string first_bad;
  const auto fail = [&](const std::string& what) {
    if (bad++ == 0) first_bad = what;
  };
  for (int i = 0; i < 1000; ++i) {
    const double q = qs[i % 3];
    const auto a = random_train(rng), b = random_train(rng), c = random_train(rng);
    const double ab = vp_distance(a, b, q), ba = vp_distance(b, a, q);
    const double bc = vp_distance(b, c, q), ac = vp_distance(a, c, q);
    if (std::abs(ab - ba) > 1e-12) fail("symmetry");
    if (vp_distance(a, a, q) != 0.0) fail("identity");
    if (a != b && !(ab > 0.0)) fail("positivity");
    if (ac > ab + bc + 1e-12) fail("triangle");
    if (std::abs(ab - reference_vp(a, b, q)) > 1e-12) fail("reference recursion");
    if (vp_distance(a, {}, q) != double(a.size())) fail("empty train");
  }
  return {bad == 0, "1000 triples, " + std::to_string(bad) + " violations" +
                        (bad ? " (first: " + first_bad + ")" : std::string())};
}

// ---- 7: thinning fidelity ---------------------------------------------------------

constexpr std::size_t kBinFrames = 50;

std::vector<double> binned_totals(const RateFunctionSpec& spec, int trains, std::uint64_t seed) {
  std::vector<double> bins(spec.frames / kBinFrames, 0.0);
  for (int i = 0; i < trains; ++i) {
    const auto counts = simulate_spike_train(spec, 1, spec.frames, substream_seed(seed, i));
    for (std::size_t t = 0; t < counts.size(); ++t) bins[t / kBinFrames] += counts[t];
  }
  return bins;
}

// Expected bin totals straight from the two-bump formula.
std::vector<double> expected_totals(std::size_t frames, int trains) {
  std::vector<double> bins(frames / kBinFrames, 0.0);
  for (std::size_t t = 1; t <= frames; ++t) {
    const double z1 = (double(t) - 300.0) / 150.0, z2 = (double(t) - 700.0) / 150.0;
    bins[(t - 1) / kBinFrames] += 0.01 + 0.19 * (std::exp(-z1 * z1) + std::exp(-z2 * z2));
  }
  for (double& b : bins) b *= trains;
  return bins;
}

Outcome thinning_fidelity() {
  const auto spec = RateFunctionSpec::bimodal_constant(1, 1000);
  const int trains = 2000;
  const auto expected = expected_totals(spec.frames, trains);

  const auto observed = binned_totals(spec, trains, 7701);
  int misses = 0;
  for (std::size_t b = 0; b < observed.size(); ++b) {
    const boost::math::poisson_distribution<double> law(expected[b]);
    if (observed[b] < boost::math::quantile(law, 0.005) ||
        observed[b] > boost::math::quantile(law, 0.995)) {
      ++misses;
    }
  }
  const boost::math::binomial_distribution<double> miss_law(double(observed.size()), 0.01);
  const double allowed = boost::math::quantile(miss_law, 0.999);

  bool chi_ok = true;
  std::string pvals;
  for (std::uint64_t seed : {7711u, 7722u, 7733u}) {
    const auto obs = binned_totals(spec, trains, seed);
    double stat = 0.0;
    for (std::size_t b = 0; b < obs.size(); ++b) {
      stat += (obs[b] - expected[b]) * (obs[b] - expected[b]) / expected[b];
    }
    const boost::math::chi_squared_distribution<double> chi(double(obs.size()));
    const double p = boost::math::cdf(boost::math::complement(chi, stat));
    chi_ok = chi_ok && p > 0.001;
    pvals += (pvals.empty() ? "" : ", ") + fmt(p, 3);
  }
  std::ostringstream os;
  os << "2000 trains, " << misses << "/" << observed.size()
     << " bins outside 99% Poisson bands (allowed <= " << allowed << "); chi-square p = " << pvals
     << " (need > 0.001)";
  return {misses <= allowed && chi_ok, os.str()};
}

// ---- 8: scaling ---------------------------------------------------------------------

Outcome scaling() {
  const std::size_t frames = 100000;
  const RateFunctionSpec one = RateFunctionSpec::bimodal_constant(1, 1000);
  Matrix<double> table(1, frames);
  for (std::size_t t = 0; t < frames; ++t) table(0, t) = eval_rate(one, 1, t % 1000 + 1);
  SimConfig sim;
  sim.trials = 1;
  sim.frames = frames;
  sim.seed = 7801;
  const auto data = simulate_dataset(RateFunctionSpec::custom_table(std::move(table)), sim);
  const auto y = data.traces.values.row(0);
  const std::vector<double> pen(frames, 0.3);

  const auto start = Clock::now();
  const Segmentation full = solve_l0(y, sim.gamma, pen);
  const double elapsed = seconds_since(start);

  const std::size_t prefix = 5000;
  const auto head = y.first(prefix);
  const std::span<const double> head_pen(pen.data(), prefix);
  const Segmentation pruned = solve_l0(head, sim.gamma, head_pen);
  const Segmentation exact = solve_l0_exact(head, sim.gamma, head_pen);
  const bool same = pruned.changepoints == exact.changepoints && pruned.calcium == exact.calcium &&
                    rel_close(pruned.objective, exact.objective, 1e-9);

  int true_spikes = 0;
  for (int c : data.spikes.counts.values()) true_spikes += c;
  std::ostringstream os;
  os << "T=100000 (" << true_spikes << " true spikes, " << full.changepoints.size()
     << " found) in " << fmt(elapsed, 3) << " s (need < 2 s); 5000-frame prefix "
     << (same ? "identical" : "DIFFERS") << " to exact (" << exact.changepoints.size()
     << " changepoints)";
  return {elapsed < 2.0 && same, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string item; std::getline(ss, item, ',');) only.insert(std::stoi(item));
    } else if (arg == "--threads" && i + 1 < argc) {
      threads = std::stoul(argv[++i]);
    } else {
      std::cerr << "usage: mtvpar_acceptance [--only N[,N...]] [--threads K]\n";
      return 2;
    }
  }

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [&] { return study_criterion(io::Scenario::ConstantRate, 7101, threads, 0.10, 0.50); }},
      {2, [&] { return study_criterion(io::Scenario::DynamicRate, 7201, threads, 0.05, 0.25); }},
      {3, solver_exactness},
      {4, closed_form},
      {5, penalty_normalization},
      {6, metric_axioms},
      {7, thinning_fidelity},
      {8, scaling},
  };

  int failed = 0;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    failed += !out.pass;
    std::cout << "criterion " << id << ": " << (out.pass ? "PASS" : "FAIL") << "  " << out.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
