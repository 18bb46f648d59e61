// Copyright 2026 The trust-audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trust/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "trust/errors.hpp"
#include "trust/rng.hpp"

namespace trust::mc {

namespace {

// Stream domain tags keep the sub-streams of different simulations apart.
enum : std::uint64_t { kSegmentTag = 1, kTraceTag = 2, kHonestTag = 3, kMaliciousTag = 4, kMajorityTag = 5 };

constexpr std::int64_t kChunk = 4096;

// Runs fn(begin, end) over fixed-size trial chunks on a worker pool and
// returns the chunk results in chunk order, so any reduction over them is
// independent of scheduling.
template <class T, class Fn>
std::vector<T> run_chunks(std::int64_t n, unsigned threads, Fn fn) {
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<T> out(static_cast<std::size_t>(chunks));
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, std::max<std::int64_t>(chunks, 1)));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= chunks) return;
      try {
        out[static_cast<std::size_t>(i)] = fn(i * kChunk, std::min(n, (i + 1) * kChunk));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// Number of correct votes cast by k seats of one segment.
int correct_votes(rng::Philox& g, const stats::TierParams& t) {
  int correct = 0;
  for (int i = 0; i < t.k; ++i) {
    const bool malicious = rng::bernoulli(g, t.rho);
    if (!malicious && rng::bernoulli(g, 1.0 - t.epsilon)) ++correct;
  }
  return correct;
}

bool same_params(const stats::TierParams& a, const stats::TierParams& b) {
  return a.tier == b.tier && a.k == b.k && a.epsilon == b.epsilon && a.rho == b.rho;
}

graph::Tier swept_tier(const stats::VoteConfig& v) {
  for (const auto& s : v.segments) {
    if (s.tier == graph::Tier::kHuman) return s.tier;
  }
  if (v.segments.empty()) throw InvalidArgument("config has no segments");
  return v.segments.front().tier;
}

const stats::TierParams& swept_params(const stats::VoteConfig& v) {
  const auto t = swept_tier(v);
  for (const auto& s : v.segments) {
    if (s.tier == t) return s;
  }
  return v.segments.front();
}

double sigma_band(double p, std::int64_t n) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void SimConfig::validate() const {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (horizon_trials && *horizon_trials < 1) throw InvalidArgument("horizon_trials must be >= 1");
  for (double v : rho_grid) {
    if (!(v >= 0.0 && v <= 0.4)) throw InvalidArgument("rho grid value outside [0, 0.4]: " + fmt(v));
  }
  for (double v : epsilon_grid) {
    if (!(v >= 0.0 && v <= 0.4)) throw InvalidArgument("epsilon grid value outside [0, 0.4]: " + fmt(v));
  }
  if (!(eps_target > 0.0 && eps_target < 1.0)) throw InvalidArgument("eps_target must be in (0,1)");
}

Frequency make_frequency(std::int64_t hits, std::int64_t trials) {
  Frequency f;
  f.hits = hits;
  f.trials = trials;
  f.value = trials > 0 ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  f.std_error = trials > 0 ? sigma_band(f.value, trials) : 0.0;
  return f;
}

std::vector<TierPass> simulate_segments(const SimConfig& cfg) {
  cfg.validate();
  std::vector<stats::TierParams> distinct;
  for (const auto& s : cfg.vote_cfg.segments) {
    if (std::none_of(distinct.begin(), distinct.end(), [&](const auto& d) { return same_params(d, s); })) {
      distinct.push_back(s);
    }
  }
  std::vector<TierPass> out;
  for (std::size_t j = 0; j < distinct.size(); ++j) {
    const auto& t = distinct[j];
    const int q = stats::quorum(t.k, cfg.vote_cfg.tau);
    auto hits = run_chunks<std::int64_t>(cfg.trials, cfg.threads, [&](std::int64_t b, std::int64_t e) {
      std::int64_t h = 0;
      for (std::int64_t i = b; i < e; ++i) {
        auto g = rng::substream(cfg.seed, {kSegmentTag, j, static_cast<std::uint64_t>(i)});
        if (correct_votes(g, t) >= q) ++h;
      }
      return h;
    });
    std::int64_t total = 0;
    for (auto h : hits) total += h;
    out.push_back({t, make_frequency(total, cfg.trials), stats::segment_pass_prob(t, cfg.vote_cfg.tau)});
  }
  return out;
}

TraceResult simulate_traces(const SimConfig& cfg) {
  cfg.validate();
  const auto& v = cfg.vote_cfg;
  if (v.segments.empty()) throw InvalidArgument("trace simulation needs at least one segment");
  const double threshold = v.threshold_weight();
  std::vector<int> quorums;
  for (const auto& s : v.segments) quorums.push_back(stats::quorum(s.k, v.tau));
  auto fails = run_chunks<std::int64_t>(cfg.trials, cfg.threads, [&](std::int64_t b, std::int64_t e) {
    std::int64_t f = 0;
    for (std::int64_t i = b; i < e; ++i) {
      auto g = rng::substream(cfg.seed, {kTraceTag, static_cast<std::uint64_t>(i)});
      double w = 0.0;
      for (std::size_t s = 0; s < v.segments.size(); ++s) {
        if (correct_votes(g, v.segments[s]) >= quorums[s]) w += v.segments[s].w;
      }
      if (!stats::trace_passes(w, threshold)) ++f;
    }
    return f;
  });
  std::int64_t total = 0;
  for (auto f : fails) total += f;
  TraceResult r;
  r.empirical_fail = make_frequency(total, cfg.trials);
  if (v.segments.size() <= kExactTraceMaxSegments) r.exact_fail = stats::exact_trace_fail_prob(v);
  r.bounds = stats::trace_fail_bound(v);
  return r;
}

HorizonResult simulate_horizon(const SimConfig& cfg) {
  cfg.validate();
  const auto& ep = cfg.econ;
  ep.validate();
  const double lambda_t = ep.expected_segments();
  const std::int64_t n = cfg.horizon_trial_count();

  struct Acc {
    std::int64_t honest_nonpositive = 0;
    std::int64_t malicious_nonnegative = 0;
    double sum_h = 0, sum_h2 = 0, sum_m = 0, sum_m2 = 0;
    double sum_n = 0, sum_n2 = 0, sum_hn = 0, sum_rep = 0;
  };
  auto segments_for = [&](rng::Philox& g) -> std::uint64_t {
    if (cfg.fixed_count_mode) return static_cast<std::uint64_t>(std::llround(lambda_t));
    return rng::poisson(g, lambda_t);
  };
  auto parts = run_chunks<Acc>(n, cfg.threads, [&](std::int64_t b, std::int64_t e) {
    Acc a;
    for (std::int64_t i = b; i < e; ++i) {
      auto gh = rng::substream(cfg.seed, {kHonestTag, static_cast<std::uint64_t>(i)});
      const std::uint64_t nh = segments_for(gh);
      double r = econ::kInitialReputation;
      double payoff = 0.0;
      for (std::uint64_t s = 0; s < nh; ++s) {
        a.sum_rep += r;
        const bool correct = rng::bernoulli(gh, 1.0 - ep.epsilon_H);
        if (correct) {
          payoff += ep.R;
        } else if (rng::bernoulli(gh, econ::slash_probability(r, ep))) {
          payoff -= ep.P;
        }
        r = econ::update_reputation(r, correct, ep.gamma);
      }
      if (payoff <= 0.0) ++a.honest_nonpositive;
      const double dn = static_cast<double>(nh);
      a.sum_h += payoff;
      a.sum_h2 += payoff * payoff;
      a.sum_n += dn;
      a.sum_n2 += dn * dn;
      a.sum_hn += payoff * dn;

      auto gm = rng::substream(cfg.seed, {kMaliciousTag, static_cast<std::uint64_t>(i)});
      const std::uint64_t nm = segments_for(gm);
      double rm = econ::kInitialReputation;
      double pm = 0.0;
      for (std::uint64_t s = 0; s < nm; ++s) {
        if (rng::bernoulli(gm, econ::slash_probability(rm, ep))) pm -= ep.P;
        rm = econ::update_reputation(rm, false, ep.gamma);
      }
      if (pm >= 0.0) ++a.malicious_nonnegative;
      a.sum_m += pm;
      a.sum_m2 += pm * pm;
    }
    return a;
  });
  Acc t;
  for (const auto& a : parts) {
    t.honest_nonpositive += a.honest_nonpositive;
    t.malicious_nonnegative += a.malicious_nonnegative;
    t.sum_h += a.sum_h;
    t.sum_h2 += a.sum_h2;
    t.sum_m += a.sum_m;
    t.sum_m2 += a.sum_m2;
    t.sum_n += a.sum_n;
    t.sum_n2 += a.sum_n2;
    t.sum_hn += a.sum_hn;
    t.sum_rep += a.sum_rep;
  }

  HorizonResult h;
  const double dn = static_cast<double>(n);
  h.trials = n;
  h.fixed_count = cfg.fixed_count_mode;
  h.expected_segments = lambda_t;
  h.honest_nonpositive = t.honest_nonpositive;
  h.malicious_nonnegative = t.malicious_nonnegative;
  h.mean_honest = t.sum_h / dn;
  h.mean_malicious = t.sum_m / dn;
  auto se = [&](double sum, double sum2) {
    if (n < 2) return 0.0;
    const double var = std::max(0.0, (sum2 - sum * sum / dn) / (dn - 1.0));
    return std::sqrt(var / dn);
  };
  h.se_honest = se(t.sum_h, t.sum_h2);
  h.se_malicious = se(t.sum_m, t.sum_m2);
  h.mean_segments = t.sum_n / dn;
  if (t.sum_n > 0.0) {
    const double m = t.sum_h / t.sum_n;
    h.honest_per_segment = m;
    h.mean_honest_reputation = t.sum_rep / t.sum_n;
    // Ratio-estimator standard error: residuals d_i = h_i - m N_i.
    const double sum_d2 = t.sum_h2 - 2.0 * m * t.sum_hn + m * m * t.sum_n2;
    const double nbar = t.sum_n / dn;
    h.honest_per_segment_se = n > 1 ? std::sqrt(std::max(0.0, sum_d2 / (dn - 1.0)) / dn) / nbar : 0.0;
  }
  const auto dials = econ::check_economic_dials(ep);
  h.e1_holds = dials.e1;
  h.e2_holds = dials.e2;
  h.mu_H_at_mean_reputation = econ::expected_payoff_honest(h.mean_honest_reputation, ep);
  h.sigma_H_sq = econ::payoff_variance_bound(ep).sup;
  if (dials.mu_min > 0.0) h.tail = econ::tail_bounds(ep, h.sigma_H_sq);
  h.malicious_mean_bound = econ::malicious_horizon_loss_bound(ep);
  return h;
}

SimReport simulate(const SimConfig& cfg) {
  return {simulate_segments(cfg), simulate_traces(cfg), simulate_horizon(cfg)};
}

Frequency simulate_committee_majority(int k, double epsilon, std::int64_t trials, std::uint64_t seed,
                                      unsigned threads) {
  if (k < 1) throw InvalidArgument("committee size must be >= 1");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  auto hits = run_chunks<std::int64_t>(trials, threads, [&](std::int64_t b, std::int64_t e) {
    std::int64_t h = 0;
    for (std::int64_t i = b; i < e; ++i) {
      auto g = rng::substream(seed, {kMajorityTag, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)});
      int wrong = 0;
      for (int s = 0; s < k; ++s) wrong += rng::bernoulli(g, epsilon) ? 1 : 0;
      if (2 * wrong >= k) ++h;  // no strict correct majority
    }
    return h;
  });
  std::int64_t total = 0;
  for (auto h : hits) total += h;
  return make_frequency(total, trials);
}

std::uint64_t cell_seed(std::uint64_t seed, double rho, double epsilon) {
  return rng::derive_key(seed, {std::bit_cast<std::uint64_t>(rho), std::bit_cast<std::uint64_t>(epsilon)});
}

SimConfig cell_config(const SimConfig& cfg, double rho, double epsilon) {
  SimConfig c = cfg;
  const auto tier = swept_tier(cfg.vote_cfg);
  for (auto& s : c.vote_cfg.segments) {
    if (s.tier == tier) {
      s.rho = rho;
      s.epsilon = epsilon;
    }
  }
  c.econ.epsilon_H = epsilon;
  c.seed = cell_seed(cfg.seed, rho, epsilon);
  c.rho_grid.clear();
  c.epsilon_grid.clear();
  return c;
}

std::vector<SweepCell> sweep(const SimConfig& cfg) {
  if (cfg.rho_grid.empty() && cfg.epsilon_grid.empty()) throw EmptyGrid("sweep needs a rho or epsilon grid");
  cfg.validate();
  const auto& base = swept_params(cfg.vote_cfg);
  const std::vector<double> rhos = cfg.rho_grid.empty() ? std::vector<double>{base.rho} : cfg.rho_grid;
  const std::vector<double> epss = cfg.epsilon_grid.empty() ? std::vector<double>{base.epsilon} : cfg.epsilon_grid;
  std::vector<SweepCell> cells;
  for (double rho : rhos) {
    for (double eps : epss) {
      const SimConfig c = cell_config(cfg, rho, eps);
      SweepCell cell;
      cell.rho = rho;
      cell.epsilon = eps;
      cell.seed = c.seed;
      cell.report = simulate(c);
      const auto dials = econ::check_economic_dials(c.econ);
      cell.e1 = dials.e1;
      cell.e2 = dials.e2;
      cell.s1 = stats::check_s1(c.vote_cfg, c.econ.lambda_rate, c.econ.horizon_T, c.eps_target);
      cell.feasible = cell.e1 && cell.e2 && cell.s1.holds &&
                      cell.report.trace.empirical_fail.value <= c.eps_target;
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<Assertion> check_report(const SimReport& r) {
  std::vector<Assertion> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  // Within z standard errors of p, the error taken from p itself so an exact
  // probability of 0 or 1 demands an exact match.
  auto near = [](double emp, double p, std::int64_t n, double z) {
    return std::fabs(emp - p) <= z * sigma_band(p, n) + 1e-12;
  };
  for (const auto& t : r.segments) {
    const auto& p = t.params;
    std::string name = "segment pass " + std::string(graph::to_string(p.tier)) + " k=" + std::to_string(p.k) +
                       " eps=" + fmt(p.epsilon) + " rho=" + fmt(p.rho);
    add(name, near(t.empirical.value, t.analytic, t.empirical.trials, 4.0),
        "empirical " + fmt(t.empirical.value) + " vs exact " + fmt(t.analytic));
  }
  const auto& tr = r.trace;
  const std::int64_t n = tr.empirical_fail.trials;
  const double bound = tr.bounds.min;
  add("trace fail <= min(Hoeffding, Chernoff)",
      tr.empirical_fail.value <= bound + 4.0 * sigma_band(bound, n) + 1e-12,
      "empirical " + fmt(tr.empirical_fail.value) + ", bound " + fmt(bound));
  if (tr.exact_fail) {
    add("trace fail matches convolution", near(tr.empirical_fail.value, *tr.exact_fail, n, 4.0),
        "empirical " + fmt(tr.empirical_fail.value) + " vs exact " + fmt(*tr.exact_fail));
  }
  const auto& h = r.horizon;
  if (!h.e1_holds || !h.tail) {
    add("horizon", true, "E1 violated; horizon assertions suppressed");
    return out;
  }
  const double hn = static_cast<double>(h.honest_nonpositive) / static_cast<double>(h.trials);
  const double mp = static_cast<double>(h.malicious_nonnegative) / static_cast<double>(h.trials);
  add("honest horizon loss <= tail bound",
      hn <= h.tail->honest_loss + 4.0 * sigma_band(h.tail->honest_loss, h.trials),
      std::to_string(h.honest_nonpositive) + " of " + std::to_string(h.trials) + ", ln bound " +
          fmt(h.tail->ln_honest_loss));
  add("malicious horizon profit <= tail bound",
      mp <= h.tail->malicious_profit + 4.0 * sigma_band(h.tail->malicious_profit, h.trials),
      std::to_string(h.malicious_nonnegative) + " of " + std::to_string(h.trials) + ", ln bound " +
          fmt(h.tail->ln_malicious_profit));
  if (h.e2_holds) {
    add("malicious mean <= -lambda T delta P", h.mean_malicious <= h.malicious_mean_bound + 4.0 * h.se_malicious,
        "mean " + fmt(h.mean_malicious) + ", bound " + fmt(h.malicious_mean_bound));
  }
  if (h.mean_segments > 0.0) {
    add("honest payoff per segment near mu_H(mean reputation)",
        std::fabs(h.honest_per_segment - h.mu_H_at_mean_reputation) <= 4.0 * h.honest_per_segment_se + 1e-12,
        "mean " + fmt(h.honest_per_segment) + " vs " + fmt(h.mu_H_at_mean_reputation) + " (se " +
            fmt(h.honest_per_segment_se) + ")");
  }
  return out;
}

}  // namespace trust::mc
