// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mansa/dp_oracle.hpp"
#include "mansa/junction.hpp"
#include "mansa/report.hpp"
#include "mansa/run_config.hpp"
#include "mansa/sweep.hpp"
#include "mansa/trainer.hpp"
#include "support/random_mdp.hpp"

using namespace mansa;
using mansa::testing::random_mdp;
using mansa::testing::RandomMdpShape;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double ci_half_width(const std::vector<double>& xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return 1.96 * std::sqrt(ss / (xs.size() - 1.0)) / std::sqrt(static_cast<double>(xs.size()));
}

std::vector<double> ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = (i + j) / 2.0 + 1.0;
    i = j + 1;
  }
  return r;
}

// Pearson correlation of the ranks, so ties get averaged ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

RunConfig load(const std::string& name) {
  return load_run_config(fs::path(MANSA_SOURCE_DIR) / "configs" / (name + ".json"));
}

std::vector<double> no_intervention_values(const FiniteMDP& m) {
  std::vector<double> v(m.state_count, 0.0);
  for (int it = 0; it < 100'000; ++it) {
    std::vector<double> next(m.state_count, 0.0);
    double diff = 0.0;
    for (int s = 0; s < m.state_count; ++s) {
      if (m.terminal[s]) continue;
      double best = -1e300;
      for (int a = 0; a < m.joint_action_count; ++a) {
        if (!m.allowed(s, a)) continue;
        double q = m.rewards[s][a];
        for (int t = 0; t < m.state_count; ++t) q += m.discount * m.transitions[s][a][t] * v[t];
        best = std::max(best, q);
      }
      next[s] = best;
      diff = std::max(diff, std::abs(next[s] - v[s]));
    }
    v = next;
    if (diff < 1e-14) break;
  }
  return v;
}

// Two agents with two actions each, so four joint actions.
std::vector<MdpFixture> oracle_fixtures() {
  std::vector<MdpFixture> out;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(mix_seed(seed, 77));
    RandomMdpShape shape;
    shape.min_states = 1;
    shape.max_states = 4;
    shape.min_actions = 4;
    shape.max_actions = 4;
    shape.discount = 0.9;
    shape.terminal_states = seed % 3 == 0;
    shape.restrict_direct = seed % 2 == 0;
    out.push_back(random_mdp(rng, shape));
  }
  return out;
}

Verdict contraction() {
  const auto start = Clock::now();
  Rng rng(2024);
  int violations = 0;
  double worst = -1e300;
  for (int k = 0; k < 1000; ++k) {
    RandomMdpShape shape;
    shape.max_states = 6;
    shape.max_actions = 8;
    shape.discount = std::vector<double>{0.5, 0.9, 0.99}[k % 3];
    shape.terminal_states = k % 5 == 0;
    const MdpFixture fx = random_mdp(rng, shape);
    const double c = uniform01(rng);
    std::vector<double> v1(fx.mdp.state_count), v2(fx.mdp.state_count);
    for (int s = 0; s < fx.mdp.state_count; ++s) {
      v1[s] = uniform01(rng) * 200 - 100;
      v2[s] = uniform01(rng) * 200 - 100;
    }
    const auto t1 = bellman_backup(v1, fx.mdp, fx.central, c);
    const auto t2 = bellman_backup(v2, fx.mdp, fx.central, c);
    double dt = 0.0, dv = 0.0;
    for (int s = 0; s < fx.mdp.state_count; ++s) {
      dt = std::max(dt, std::abs(t1[s] - t2[s]));
      dv = std::max(dv, std::abs(v1[s] - v2[s]));
    }
    worst = std::max(worst, dt - shape.discount * dv);
    violations += dt > shape.discount * dv + 1e-12;
  }
  const double secs = seconds_since(start);
  return {violations == 0 && secs < 5.0,
          "violations=" + std::to_string(violations) + " max(|Tv1-Tv2|-g|v1-v2|)=" + fmt(worst) +
              " time=" + fmt(secs, 3) + "s"};
}

Verdict oracle_equivalence(const std::vector<MdpFixture>& fixtures) {
  const auto start = Clock::now();
  double worst = 0.0;
  int set_mismatch = 0, activations = 0;
  for (const auto& fx : fixtures) {
    for (double c : {0.0, 0.01, 0.5}) {
      const SwitchSolution sol = solve_switching(fx.mdp, fx.central, c, 1e-10);
      const BruteForceResult bf = brute_force_switching(fx.mdp, fx.central, c);
      for (int s = 0; s < fx.mdp.state_count; ++s) worst = std::max(worst, std::abs(sol.values[s] - bf.values[s]));
      const auto g = heaviside_policy(sol.q_values, fx.central, c, fx.mdp.direct_allowed);
      std::vector<bool> g_live = g;
      for (int s = 0; s < fx.mdp.state_count; ++s) g_live[s] = g[s] && !fx.mdp.terminal[s];
      set_mismatch += g_live != bf.activation_set;
      activations += static_cast<int>(std::count(bf.activation_set.begin(), bf.activation_set.end(), true));
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-6 && set_mismatch == 0 && secs < 60.0,
          "max|v_vi-v_bf|=" + fmt(worst) + " set_mismatches=" + std::to_string(set_mismatch) +
              " enumerated_activations=" + std::to_string(activations) + " time=" + fmt(secs, 3) + "s"};
}

Verdict budget_dp(const std::vector<MdpFixture>& fixtures) {
  const double c = 0.01;
  const int n_max = 6, n_large = 400;
  double worst_monotone = 0.0, worst_zero = 0.0, worst_large = 0.0;
  long violations = 0, rollouts = 0, activations = 0;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    const auto& fx = fixtures[f];
    const BudgetedSolution sol = solve_budgeted(fx.mdp, fx.central, c, n_max, 1e-11);
    for (int x = 1; x <= n_max; ++x) {
      for (int s = 0; s < fx.mdp.state_count; ++s) {
        worst_monotone = std::max(worst_monotone, sol.values[x - 1][s] - sol.values[x][s]);
      }
    }
    const auto base = no_intervention_values(fx.mdp);
    for (int s = 0; s < fx.mdp.state_count; ++s) worst_zero = std::max(worst_zero, std::abs(sol.values[0][s] - base[s]));

    const BudgetedSolution large = solve_budgeted(fx.mdp, fx.central, c, n_large, 1e-11);
    const SwitchSolution free = solve_switching(fx.mdp, fx.central, c, 1e-11);
    for (int s = 0; s < fx.mdp.state_count; ++s) {
      worst_large = std::max(worst_large, std::abs(large.values[n_large][s] - free.values[s]));
    }

    const int n = 1 + static_cast<int>(f % 3);
    const BudgetedSolution small = solve_budgeted(fx.mdp, fx.central, c, n, 1e-11);
    Rng rng(mix_seed(f, 9));
    for (int r = 0; r < 10'000; ++r) {
      const RolloutStats st = simulate_budgeted(fx.mdp, fx.central, c, small, r % fx.mdp.state_count, 100, rng);
      violations += st.activations > n;
      activations += st.activations;
      ++rollouts;
    }
  }
  const bool pass = worst_monotone <= 1e-12 && worst_zero <= 1e-9 && worst_large <= 1e-6 && violations == 0;
  return {pass, "max_decrease_in_n=" + fmt(worst_monotone) + " |v(n=0)-v_plain|=" + fmt(worst_zero) +
                    " |v(n=400)-v_free|=" + fmt(worst_large) + " rollouts=" + std::to_string(rollouts) +
                    " activations=" + std::to_string(activations) + " violations=" + std::to_string(violations)};
}

std::map<double, std::vector<SweepRow>> by_value(const std::vector<SweepRow>& rows) {
  std::map<double, std::vector<SweepRow>> out;
  for (const auto& r : rows) out[r.value].push_back(r);
  return out;
}

std::vector<double> mean_cl_calls(const std::map<double, std::vector<SweepRow>>& groups, std::vector<double>& alphas) {
  std::vector<double> out;
  for (const auto& [alpha, rows] : groups) {
    alphas.push_back(alpha);
    double total = 0.0;
    for (const auto& r : rows) total += static_cast<double>(r.cl_calls);
    out.push_back(total / rows.size());
  }
  return out;
}

std::string join(const std::vector<double>& xs, int digits = 5) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i], digits);
  return s;
}

const std::vector<double> kAlphas{0.0, 0.25, 0.5, 0.75, 1.0};

Verdict assurance_trend() {
  const RunConfig config = load("assurance");
  const auto groups = by_value(sweep(config, SweepParameter::alpha, kAlphas));
  std::vector<double> alphas;
  const auto calls = mean_cl_calls(groups, alphas);
  const double rho = spearman(alphas, calls);
  return {calls.back() < calls.front() && rho <= -0.8,
          "mean_cl_calls[alpha=0..1]=" + join(calls) + " spearman=" + fmt(rho)};
}

Verdict nonmonotonic_trend() {
  RunConfig config = load("nonmonotonic");
  const auto groups = by_value(sweep(config, SweepParameter::alpha, kAlphas));
  std::vector<double> alphas;
  const auto calls = mean_cl_calls(groups, alphas);

  const auto& at_one = groups.at(1.0);
  int hits = 0;
  std::vector<double> mansa;
  for (const auto& r : at_one) {
    hits += std::abs(r.final_return - 8.0) <= 0.5;
    mansa.push_back(r.final_return);
  }
  config.env.alpha = 1.0;
  std::vector<double> iql, central;
  for (std::uint64_t seed : config.schedule.seeds) {
    RunConfig c = config;
    c.global.mode = SwitchMode::independent_only;
    iql.push_back(train(c, seed).final_return());
    c.global.mode = SwitchMode::central_only;
    central.push_back(train(c, seed).final_return());
  }
  const double best_baseline = std::max(mean(iql), mean(central));
  const bool pass = calls.back() < calls.front() && hits >= 2 && mean(mansa) >= best_baseline - 0.5;
  return {pass, "mean_cl_calls[alpha=0..1]=" + join(calls) + " spearman=" + fmt(spearman(alphas, calls)) +
                    " seeds_at_8=" + std::to_string(hits) + "/3 mansa=" + fmt(mean(mansa)) +
                    " iql_only=" + fmt(mean(iql)) + " central_only=" + fmt(mean(central))};
}

struct LbfRuns {
  std::vector<RunArtifacts> runs;
  std::vector<double> returns() const {
    std::vector<double> out;
    for (const auto& r : runs) out.push_back(r.final_return() / achievable_max_return(r.config.env));
    return out;
  }
  std::vector<double> cl_calls() const {
    std::vector<double> out;
    for (const auto& r : runs) out.push_back(static_cast<double>(r.cl_calls));
    return out;
  }
  std::vector<double> cl_pct() const {
    std::vector<double> out;
    for (const auto& r : runs) out.push_back(r.cl_call_pct());
    return out;
  }
};

LbfRuns train_all(const RunConfig& config, const std::function<RunArtifacts(const RunConfig&, std::uint64_t)>& fn) {
  LbfRuns out;
  for (std::uint64_t seed : config.schedule.seeds) out.runs.push_back(fn(config, seed));
  return out;
}

RunArtifacts learned(const RunConfig& c, std::uint64_t seed) { return train(c, seed); }
RunArtifacts coin(const RunConfig& c, std::uint64_t seed) { return random_switch_baseline(c, seed); }

Verdict improvement_over_il(const LbfRuns& mansa, const RunConfig& coop) {
  RunConfig c = coop;
  c.global.mode = SwitchMode::independent_only;
  const LbfRuns iql = train_all(c, learned);
  const double m = mean(mansa.returns()), i = mean(iql.returns());
  return {m >= i - 0.05 && m >= 0.8,
          "mansa=" + fmt(m) + " [" + join(mansa.returns(), 3) + "] iql_only=" + fmt(i) + " [" +
              join(iql.returns(), 3) + "]"};
}

Verdict thrift_across_coupling(const LbfRuns& coop) {
  const LbfRuns weak = train_all(load("lbf_noncoop"), learned);
  const double a = mean(weak.cl_pct()), b = mean(coop.cl_pct());
  return {a < b, "cl_pct noncoop=" + fmt(a, 6) + " [" + join(weak.cl_pct(), 5) + "] coop=" + fmt(b, 6) + " [" +
                     join(coop.cl_pct(), 5) + "]"};
}

Verdict junction_locality() {
  const RunConfig config = load("junction");
  int good = 0;
  std::string detail;
  for (std::uint64_t seed : config.schedule.seeds) {
    const RunArtifacts run = train(config, seed);
    double near = 0.0, far = 0.0;
    int n_near = 0, n_far = 0;
    for (const auto& row : heatmap(run)) {
      const int d = crossing_distance({row.x, row.y});
      if (d <= 1) {
        near += row.rate;
        ++n_near;
      } else if (d >= 3) {
        far += row.rate;
        ++n_far;
      }
    }
    near = n_near ? near / n_near : 0.0;
    far = n_far ? far / n_far : 0.0;
    good += n_near > 0 && n_far > 0 && near > far;
    detail += " seed" + std::to_string(seed) + ":near=" + fmt(near, 3) + ",far=" + fmt(far, 3) +
              ",return=" + fmt(run.final_return(), 3);
  }
  return {good == static_cast<int>(config.schedule.seeds.size()), "seeds_near_gt_far=" + std::to_string(good) + "/3" + detail};
}

Verdict budget_sweep(const LbfRuns& reference, const RunConfig& coop) {
  const std::vector<double> fractions{0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> means, halves;
  long overspent = 0;
  for (double f : fractions) {
    std::vector<double> rets;
    for (const auto& ref : reference.runs) {
      const RunConfig c = with_parameter(coop, SweepParameter::budget_fraction, f, ref.cl_calls);
      try {
        const RunArtifacts run = train(c, ref.seed);
        overspent += static_cast<std::int64_t>(run.cl_calls) > c.budget.total;
        rets.push_back(run.final_return());
      } catch (const InvariantViolation&) {
        ++overspent;
        rets.push_back(0.0);
      }
    }
    means.push_back(mean(rets));
    halves.push_back(ci_half_width(rets));
  }
  int bad_pairs = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    for (std::size_t j = i + 1; j < fractions.size(); ++j) {
      const bool rises = means[j] >= means[i];
      const bool overlap = means[j] + halves[j] >= means[i] - halves[i];
      bad_pairs += !(rises || overlap);
    }
  }
  return {bad_pairs == 0 && overspent == 0, "mean_return[10,25,50,75,100%]=" + join(means, 3) + " ci=" +
                                                join(halves, 3) + " bad_pairs=" + std::to_string(bad_pairs) +
                                                " budget_violations=" + std::to_string(overspent)};
}

Verdict cost_robustness(const LbfRuns& at_001, const RunConfig& coop) {
  std::vector<double> means;
  for (double c : {0.005, 0.01, 0.02, 0.05}) {
    if (c == 0.01) {
      means.push_back(mean(at_001.returns()));
      continue;
    }
    const RunConfig cfg = with_parameter(coop, SweepParameter::switching_cost, c);
    means.push_back(mean(train_all(cfg, learned).returns()));
  }
  const double hi = *std::max_element(means.begin(), means.end());
  const double lo = *std::min_element(means.begin(), means.end());
  const double spread = hi > 0.0 ? (hi - lo) / hi : 1.0;
  const LbfRuns tiny = train_all(with_parameter(coop, SweepParameter::switching_cost, 1e-4), learned);
  const double calls_tiny = mean(tiny.cl_calls()), calls_ref = mean(at_001.cl_calls());
  return {spread <= 0.1 && calls_tiny > calls_ref,
          "mean_return[c=.005,.01,.02,.05]=" + join(means, 3) + " spread=" + fmt(spread, 3) +
              " cl_calls c=1e-4:" + fmt(calls_tiny, 7) + " c=1e-2:" + fmt(calls_ref, 7)};
}

Verdict learned_vs_random(const LbfRuns& mansa, const RunConfig& coop) {
  const LbfRuns flips = train_all(coop, coin);
  const double m = mean(mansa.returns()), r = mean(flips.returns());
  return {m >= r, "mansa=" + fmt(m) + " coin=" + fmt(r) + " [" + join(flips.returns(), 3) + "]"};
}

Verdict determinism() {
  int mismatched = 0, bookkeeping = 0, runs = 0;
  RunConfig lbf = load("lbf_coop");
  lbf.schedule.total_steps = 20'000;
  lbf.schedule.eval_period = 2'000;
  lbf.schedule.buffer_capacity = 20'000;
  RunConfig junction = load("junction");
  junction.schedule.total_steps = 20'000;
  junction.schedule.buffer_capacity = 20'000;
  RunConfig budgeted = lbf;
  budgeted.budget = {true, 3'000};
  for (const RunConfig* cfg : {&lbf, &junction, &budgeted}) {
    RunConfig c = *cfg;
    for (std::uint64_t seed : {1, 7}) {
      std::ostringstream a, b;
      const RunArtifacts first = train(c, seed);
      write_metrics_csv(a, first.metrics);
      const RunArtifacts second = train(c, seed);
      write_metrics_csv(b, second.metrics);
      mismatched += a.str() != b.str();
      ++runs;

      std::uint64_t sum = 0;
      std::size_t m = 0;
      for (const auto* rec : first.buffer.in_order()) {
        sum += rec->switch_decision;
        if (m < first.metrics.size() && rec->step == first.metrics[m].step) {
          bookkeeping += first.metrics[m].cl_calls_cum != sum;
          ++m;
        }
      }
      bookkeeping += m != first.metrics.size();
    }
  }
  return {mismatched == 0 && bookkeeping == 0, "runs=" + std::to_string(runs) + " csv_mismatches=" +
                                                   std::to_string(mismatched) +
                                                   " cl_call_mismatches=" + std::to_string(bookkeeping)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&failures](int id, const char* name, const std::function<Verdict()>& check) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s criterion %2d %-28s %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  };

  const auto fixtures = oracle_fixtures();
  report(1, "contraction", contraction);
  report(2, "oracle-equivalence", [&] { return oracle_equivalence(fixtures); });
  report(3, "budget-dp", [&] { return budget_dp(fixtures); });
  report(4, "assurance-trend", assurance_trend);
  report(5, "nonmonotonic-trend", nonmonotonic_trend);

  const RunConfig coop = load("lbf_coop");
  LbfRuns mansa_coop;
  std::string lbf_error;
  try {
    mansa_coop = train_all(coop, learned);
  } catch (const std::exception& e) {
    lbf_error = e.what();
  }
  auto needs_lbf = [&](const std::function<Verdict()>& f) {
    return [&, f] { return lbf_error.empty() ? f() : Verdict{false, "coop training failed: " + lbf_error}; };
  };
  report(6, "improvement-over-il", needs_lbf([&] { return improvement_over_il(mansa_coop, coop); }));
  report(7, "cl-thrift-across-coupling", needs_lbf([&] { return thrift_across_coupling(mansa_coop); }));
  report(8, "junction-heatmap-locality", junction_locality);
  report(9, "budget-sweep-shape", needs_lbf([&] { return budget_sweep(mansa_coop, coop); }));
  report(10, "switching-cost-robustness", needs_lbf([&] { return cost_robustness(mansa_coop, coop); }));
  report(11, "learned-vs-random", needs_lbf([&] { return learned_vs_random(mansa_coop, coop); }));
  report(12, "determinism-bookkeeping", determinism);

  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
