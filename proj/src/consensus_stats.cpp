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

#include "trust/consensus_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "trust/errors.hpp"

namespace trust::stats {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// n * ln(x), with 0 * ln(0) taken as 0.
double n_log(double n, double x) {
  if (n == 0.0) return 0.0;
  return n * std::log(x);
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_tier(const TierParams& t) {
  if (t.k < 1) throw InvalidArgument("seat count must be >= 1");
  if (!(t.epsilon >= 0.0 && t.epsilon <= 1.0)) throw InvalidArgument("epsilon outside [0,1]");
  if (!(t.rho >= 0.0 && t.rho <= 1.0)) throw InvalidArgument("rho outside [0,1]");
}

}  // namespace

TierParams default_tier(graph::Tier tier) {
  switch (tier) {
    case graph::Tier::kComputational: return {tier, 1, 0.0, 0.0, 1.0};
    case graph::Tier::kLlm: return {tier, 3, 0.05, 0.0, 1.0};
    case graph::Tier::kHuman: return {tier, 5, 0.30, 0.10, 1.0};
  }
  return {};
}

double VoteConfig::total_weight() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.w;
  return total;
}

int quorum(int k, double tau) {
  return static_cast<int>(std::ceil(tau * k - 1e-9));
}

double segment_pass_prob(const TierParams& t, double tau) {
  check_tier(t);
  const int k = t.k;
  const int q = quorum(k, tau);
  const double rho = t.rho;
  const double eps = t.epsilon;

  if (k <= 30) {
    double total = 0.0;
    for (int m = 0; m <= k; ++m) {
      const int honest = k - m;
      double inner = 0.0;
      for (int c = std::max(q, 0); c <= honest; ++c) {
        inner += choose(honest, c) * std::pow(1.0 - eps, c) * std::pow(eps, honest - c);
      }
      total += choose(k, m) * std::pow(rho, m) * std::pow(1.0 - rho, honest) * inner;
    }
    return std::clamp(total, 0.0, 1.0);
  }

  double log_total = kNegInf;
  for (int m = 0; m <= k; ++m) {
    const int honest = k - m;
    double log_inner = kNegInf;
    for (int c = std::max(q, 0); c <= honest; ++c) {
      log_inner = log_add(log_inner, log_choose(honest, c) + n_log(c, 1.0 - eps) +
                                         n_log(honest - c, eps));
    }
    const double log_outer = log_choose(k, m) + n_log(m, rho) + n_log(honest, 1.0 - rho);
    log_total = log_add(log_total, log_outer + log_inner);
  }
  return std::clamp(std::exp(log_total), 0.0, 1.0);
}

TraceMoments trace_moments(const VoteConfig& cfg) {
  TraceMoments m;
  for (const auto& s : cfg.segments) {
    const double p = segment_pass_prob(s, cfg.tau);
    m.mu += s.w * p;
    m.sigma_sq += s.w * s.w * p * (1.0 - p);
    m.sigma_max_sq += s.w * s.w;
  }
  return m;
}

double chernoff_lambda_max(const VoteConfig& cfg) {
  double wmax = 0.0;
  for (const auto& s : cfg.segments) wmax = std::max(wmax, s.w);
  return wmax > 0.0 ? 50.0 / wmax : 50.0;
}

namespace {

struct WeightedPass {
  double w;
  double p;
};

std::vector<WeightedPass> pass_table(const VoteConfig& cfg) {
  std::vector<WeightedPass> out;
  out.reserve(cfg.segments.size());
  for (const auto& s : cfg.segments) out.push_back({s.w, segment_pass_prob(s, cfg.tau)});
  return out;
}

double chernoff_exponent(const std::vector<WeightedPass>& table, double w_beta, double lambda) {
  double f = lambda * w_beta;
  for (const auto& [w, p] : table) {
    // ln(p e^{-lambda w} + (1 - p))
    const double a = p > 0.0 ? std::log(p) - lambda * w : kNegInf;
    const double b = p < 1.0 ? std::log1p(-p) : kNegInf;
    f += log_add(a, b);
  }
  return f;
}

}  // namespace

double chernoff_log_bound(const VoteConfig& cfg, double lambda) {
  return chernoff_exponent(pass_table(cfg), cfg.threshold_weight(), lambda);
}

TraceFailBound trace_fail_bound(const VoteConfig& cfg) {
  if (cfg.segments.empty()) throw InvalidArgument("vote config has no segments");
  const TraceMoments m = trace_moments(cfg);
  const double w_beta = cfg.threshold_weight();
  TraceFailBound b;
  if (!(m.mu > w_beta)) return b;

  const double gap = m.mu - w_beta;
  b.ln_hoeffding = -2.0 * gap * gap / m.sigma_max_sq;
  b.hoeffding = std::exp(b.ln_hoeffding);

  // Coarse log-spaced grid to bracket the minimum of the convex exponent,
  // then golden-section refinement.
  const double hi = chernoff_lambda_max(cfg);
  const auto table = pass_table(cfg);
  auto exponent = [&](double lambda) { return chernoff_exponent(table, w_beta, lambda); };
  constexpr int kGrid = 241;
  constexpr double kDecades = 12.0;
  std::vector<double> grid(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = hi * std::pow(10.0, -kDecades * (kGrid - 1 - i) / (kGrid - 1));
  }
  int best = 0;
  double best_f = exponent(grid[0]);
  for (int i = 1; i < kGrid; ++i) {
    const double f = exponent(grid[i]);
    if (f < best_f) {
      best_f = f;
      best = i;
    }
  }
  double a = best > 0 ? grid[best - 1] : 0.0;
  double c = best + 1 < kGrid ? grid[best + 1] : hi;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = c - inv_phi * (c - a);
  double x2 = a + inv_phi * (c - a);
  double f1 = exponent(x1);
  double f2 = exponent(x2);
  while (c - a > 1e-9 * std::max(std::abs(x1), 1e-300)) {
    if (f1 < f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - inv_phi * (c - a);
      f1 = exponent(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (c - a);
      f2 = exponent(x2);
    }
  }
  double lambda = f1 < f2 ? x1 : x2;
  double f = std::min(f1, f2);
  if (best_f < f) {
    f = best_f;
    lambda = grid[best];
  }
  b.ln_chernoff = std::min(f, 0.0);
  b.chernoff = std::exp(b.ln_chernoff);
  b.chernoff_lambda = lambda;
  b.min = std::min(b.hoeffding, b.chernoff);
  return b;
}

bool trace_passes(double weighted_total, double threshold) {
  return weighted_total >= threshold - 1e-9 * std::max(1.0, std::abs(threshold));
}

double exact_trace_fail_prob(const VoteConfig& cfg) {
  // Distribution of W keyed on a fixed-point grid so equal sums reached in
  // different orders merge.
  constexpr double kScale = 1e9;
  std::map<long long, std::pair<double, double>> dist{{0, {0.0, 1.0}}};
  for (const auto& s : cfg.segments) {
    const double p = segment_pass_prob(s, cfg.tau);
    std::map<long long, std::pair<double, double>> next;
    for (const auto& [key, entry] : dist) {
      const auto [w, prob] = entry;
      if (p < 1.0) {
        auto& miss = next[key];
        miss.first = w;
        miss.second += prob * (1.0 - p);
      }
      if (p > 0.0) {
        const double passed = w + s.w;
        auto& hit = next[std::llround(passed * kScale)];
        hit.first = passed;
        hit.second += prob * p;
      }
    }
    dist = std::move(next);
  }
  const double threshold = cfg.threshold_weight();
  double fail = 0.0;
  for (const auto& [key, entry] : dist) {
    if (!trace_passes(entry.first, threshold)) fail += entry.second;
  }
  return std::clamp(fail, 0.0, 1.0);
}

double committee_error_bound(int k, double epsilon) {
  if (k < 1) throw InvalidArgument("committee size must be >= 1");
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
  if (epsilon >= 0.5) {
    throw EpsilonTooLarge("majority bound needs epsilon < 0.5, got " + std::to_string(epsilon));
  }
  const double gap = 0.5 - epsilon;
  return std::exp(-2.0 * k * gap * gap);
}

S1Check check_s1(const VoteConfig& cfg, double lambda_rate, double horizon, double eps_target) {
  if (!(eps_target > 0.0 && eps_target < 1.0)) {
    throw InvalidArgument("eps_target must lie in (0,1)");
  }
  const TraceMoments m = trace_moments(cfg);
  S1Check out;
  out.lhs = m.mu - cfg.threshold_weight();
  const double log_term = std::log(lambda_rate * horizon / eps_target);
  out.rhs = log_term > 0.0 ? std::sqrt(0.5 * m.sigma_sq * log_term) : 0.0;
  out.margin = out.lhs - out.rhs;
  out.holds = out.lhs >= out.rhs;
  return out;
}

}  // namespace trust::stats
