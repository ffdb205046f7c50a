#pragma once

// Monte-Carlo experiment harness.  Three experiments (aggregate channel
// gain vs N, sum rate vs N, wall time vs N) share one loop structure:
// channels are drawn once per (N, trial) and every strategy is evaluated
// on the same draw, so cross-strategy comparisons are paired.  Also hosts
// the projected-gradient oracle used by the tests to certify the spectral
// solver against plain first-order ascent.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bdris/active.hpp"
#include "bdris/channel.hpp"
#include "bdris/passive.hpp"
#include "bdris/projections.hpp"

namespace bdris {

enum class PassiveStrategy { PoP, PoO, NoRIS };
enum class ActiveStrategy { FP, RZF, None };

// PoO stops being practical once the N^2 x N^2 eigendecomposition
// dominates; the harness skips PoO rows above this N unless told
// otherwise.
inline constexpr int kDefaultPooNCap = 32;

// One experiment arm: a passive design (projection of the low-complexity
// or the optimal relaxed solution onto an architecture, or no RIS at all)
// optionally followed by an active design.  Labels look like "PoP-FC",
// "PoO-GC4", "PoP-SC+FP", "NoRIS+RZF".
struct StrategySpec {
  PassiveStrategy passive = PassiveStrategy::PoP;
  Architecture arch = Architecture::fully_connected();  // unused for NoRIS
  ActiveStrategy active = ActiveStrategy::None;

  std::string label() const {
    std::string out;
    switch (passive) {
      case PassiveStrategy::PoP: out = "PoP-" + arch.label(); break;
      case PassiveStrategy::PoO: out = "PoO-" + arch.label(); break;
      case PassiveStrategy::NoRIS: out = "NoRIS"; break;
    }
    switch (active) {
      case ActiveStrategy::FP: out += "+FP"; break;
      case ActiveStrategy::RZF: out += "+RZF"; break;
      case ActiveStrategy::None: break;
    }
    return out;
  }

  static StrategySpec parse(const std::string& text);
};

namespace detail {

inline std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t') out.push_back(c);
  }
  return out;
}

inline Architecture parse_architecture(const std::string& text,
                                       const std::string& full_label) {
  if (text == "FC") return Architecture::fully_connected();
  if (text == "SC") return Architecture::single_connected();
  if (text.size() > 2 && text.rfind("GC", 0) == 0) {
    const std::string digits = text.substr(2);
    int g = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), g);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && g > 0) {
      return Architecture::group_connected(g);
    }
  }
  throw std::invalid_argument("unknown architecture '" + text +
                              "' in strategy '" + full_label + "'");
}

}  // namespace detail

inline StrategySpec StrategySpec::parse(const std::string& text) {
  const std::string clean = detail::strip_spaces(text);
  if (clean.empty()) {
    throw std::invalid_argument("empty strategy label");
  }
  std::string passive_part = clean;
  std::string active_part;
  bool has_active = false;
  if (const auto plus = clean.find('+'); plus != std::string::npos) {
    passive_part = clean.substr(0, plus);
    active_part = clean.substr(plus + 1);
    has_active = true;
  }

  StrategySpec spec;
  if (passive_part == "NoRIS") {
    spec.passive = PassiveStrategy::NoRIS;
  } else if (passive_part.rfind("PoP-", 0) == 0) {
    spec.passive = PassiveStrategy::PoP;
    spec.arch = detail::parse_architecture(passive_part.substr(4), text);
  } else if (passive_part.rfind("PoO-", 0) == 0) {
    spec.passive = PassiveStrategy::PoO;
    spec.arch = detail::parse_architecture(passive_part.substr(4), text);
  } else {
    throw std::invalid_argument("unknown strategy '" + text + "'");
  }

  if (!has_active) {
    spec.active = ActiveStrategy::None;
  } else if (active_part == "FP") {
    spec.active = ActiveStrategy::FP;
  } else if (active_part == "RZF") {
    spec.active = ActiveStrategy::RZF;
  } else {
    throw std::invalid_argument("unknown active design '" + active_part +
                                "' in strategy '" + text + "'");
  }
  return spec;
}

struct ResultRow {
  std::string strategy;
  int n = 0;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  double mean_time_s = 0.0;
  int trials = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

// Unbiased sample standard deviation; NaN below two samples.
inline double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  return 0.5 * (v[mid - 1] + v[mid]);
}

inline double seconds_since(
    std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// Strategies that actually run at this N: PoO beyond the cap is skipped,
// and group-connected architectures must tile N exactly.
inline std::vector<StrategySpec> active_at(
    const std::vector<StrategySpec>& strategies, int n, int poo_n_cap) {
  std::vector<StrategySpec> out;
  for (const StrategySpec& s : strategies) {
    if (s.passive == PassiveStrategy::PoO && n > poo_n_cap) continue;
    if (s.passive != PassiveStrategy::NoRIS &&
        s.arch.kind == Connectivity::GroupConnected &&
        n % s.arch.group != 0) {
      throw std::invalid_argument("strategy '" + s.label() +
                                  "': group size does not divide N = " +
                                  std::to_string(n));
    }
    out.push_back(s);
  }
  return out;
}

// Passive stage for one strategy on one realization.  Returns the
// scattering matrix (identity-free NoRIS is signalled by an empty
// optional-like zero-size matrix) and stores the stage wall time.
struct PassiveOutcome {
  CMatrix theta;  // 0x0 for NoRIS
  double seconds = 0.0;
};

inline PassiveOutcome run_passive_stage(const ChannelSet& ch,
                                        const StrategySpec& s) {
  PassiveOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  if (s.passive != PassiveStrategy::NoRIS) {
    const RelaxationMethod method = s.passive == PassiveStrategy::PoP
                                        ? RelaxationMethod::LowComplexity
                                        : RelaxationMethod::Optimal;
    out.theta = passive_design(ch, s.arch, method).theta;
  }
  out.seconds = seconds_since(t0);
  return out;
}

}  // namespace detail

// Channel-gain sweep: mean aggregate channel gain per (strategy, N).
// Strategies must be passive-only.  PoO rows with N above poo_n_cap are
// skipped.
inline ExperimentResult run_channel_gain(const ScenarioConfig& config,
                                         const std::vector<StrategySpec>&
                                             strategies,
                                         const std::vector<int>& n_list,
                                         int poo_n_cap = kDefaultPooNCap) {
  for (const StrategySpec& s : strategies) {
    if (s.active != ActiveStrategy::None) {
      throw std::invalid_argument(
          "run_channel_gain: strategy '" + s.label() +
          "' has an active stage; the channel-gain experiment is "
          "passive-only");
    }
  }
  config.validate();

  ExperimentResult result;
  for (int n : n_list) {
    ScenarioConfig cfg_n = config;
    cfg_n.N = n;
    const std::vector<StrategySpec> live =
        detail::active_at(strategies, n, poo_n_cap);
    if (live.empty()) continue;

    std::vector<std::vector<double>> gains(live.size());
    std::vector<std::vector<double>> times(live.size());
    for (int trial = 0; trial < config.trials; ++trial) {
      const ChannelSet ch =
          sample_channels(cfg_n, static_cast<std::uint64_t>(trial));
      for (size_t i = 0; i < live.size(); ++i) {
        const detail::PassiveOutcome po = detail::run_passive_stage(ch, live[i]);
        const double gain = live[i].passive == PassiveStrategy::NoRIS
                                ? ch.G_mat.squaredNorm()
                                : sum_channel_gain(ch, po.theta);
        gains[i].push_back(gain);
        times[i].push_back(po.seconds);
      }
    }
    for (size_t i = 0; i < live.size(); ++i) {
      result.rows.push_back(ResultRow{
          live[i].label(), n, "sum_channel_gain", detail::mean_of(gains[i]),
          detail::stddev_of(gains[i]), detail::mean_of(times[i]),
          static_cast<int>(config.trials)});
    }
  }
  return result;
}

// Sum-rate sweep: mean sum rate after the two-stage pipeline per
// (strategy, N).  Strategies must name an active design.
inline ExperimentResult run_sum_rate(const ScenarioConfig& config,
                                     const std::vector<StrategySpec>&
                                         strategies,
                                     const std::vector<int>& n_list,
                                     int poo_n_cap = kDefaultPooNCap) {
  for (const StrategySpec& s : strategies) {
    if (s.active == ActiveStrategy::None) {
      throw std::invalid_argument("run_sum_rate: strategy '" + s.label() +
                                  "' lacks an active design");
    }
  }
  config.validate();
  const double sigma2 = noise_power_watts(config);
  const double p_t = transmit_power(config);

  ExperimentResult result;
  for (int n : n_list) {
    ScenarioConfig cfg_n = config;
    cfg_n.N = n;
    const std::vector<StrategySpec> live =
        detail::active_at(strategies, n, poo_n_cap);
    if (live.empty()) continue;

    std::vector<std::vector<double>> rates(live.size());
    std::vector<std::vector<double>> times(live.size());
    for (int trial = 0; trial < config.trials; ++trial) {
      const ChannelSet ch =
          sample_channels(cfg_n, static_cast<std::uint64_t>(trial));
      for (size_t i = 0; i < live.size(); ++i) {
        const detail::PassiveOutcome po = detail::run_passive_stage(ch, live[i]);
        const auto t0 = std::chrono::steady_clock::now();
        const CMatrix f_eff = live[i].passive == PassiveStrategy::NoRIS
                                  ? ch.G_mat
                                  : effective_channel(ch, po.theta);
        const Precoder w =
            live[i].active == ActiveStrategy::FP
                ? fp_beamforming(f_eff, p_t, sigma2).first
                : rzf_beamforming(f_eff, p_t, sigma2);
        const double rate = sum_rate(f_eff, w, sigma2);
        const double active_s = detail::seconds_since(t0);
        rates[i].push_back(rate);
        times[i].push_back(po.seconds + active_s);
      }
    }
    for (size_t i = 0; i < live.size(); ++i) {
      result.rows.push_back(ResultRow{
          live[i].label(), n, "sum_rate", detail::mean_of(rates[i]),
          detail::stddev_of(rates[i]), detail::mean_of(times[i]),
          static_cast<int>(config.trials)});
    }
  }
  return result;
}

// Timing sweep: wall time of the two-stage solve per (strategy, N),
// split into passive and active stages.  Channel generation is not timed.
// Each stage yields a mean row and a median row ("*_median_s"): the mean
// column of a median row holds the median, the std column the sample
// deviation of the underlying times in both cases.
inline ExperimentResult run_timing(const ScenarioConfig& config,
                                   const std::vector<StrategySpec>&
                                       strategies,
                                   const std::vector<int>& n_list,
                                   int poo_n_cap = kDefaultPooNCap) {
  for (const StrategySpec& s : strategies) {
    if (s.active == ActiveStrategy::None) {
      throw std::invalid_argument("run_timing: strategy '" + s.label() +
                                  "' lacks an active design");
    }
  }
  config.validate();
  const double sigma2 = noise_power_watts(config);
  const double p_t = transmit_power(config);

  ExperimentResult result;
  for (int n : n_list) {
    ScenarioConfig cfg_n = config;
    cfg_n.N = n;
    const std::vector<StrategySpec> live =
        detail::active_at(strategies, n, poo_n_cap);
    if (live.empty()) continue;

    std::vector<std::vector<double>> passive_s(live.size());
    std::vector<std::vector<double>> active_s(live.size());
    std::vector<std::vector<double>> total_s(live.size());
    for (int trial = 0; trial < config.trials; ++trial) {
      const ChannelSet ch =
          sample_channels(cfg_n, static_cast<std::uint64_t>(trial));
      for (size_t i = 0; i < live.size(); ++i) {
        const detail::PassiveOutcome po = detail::run_passive_stage(ch, live[i]);
        const auto t0 = std::chrono::steady_clock::now();
        const CMatrix f_eff = live[i].passive == PassiveStrategy::NoRIS
                                  ? ch.G_mat
                                  : effective_channel(ch, po.theta);
        const Precoder w =
            live[i].active == ActiveStrategy::FP
                ? fp_beamforming(f_eff, p_t, sigma2).first
                : rzf_beamforming(f_eff, p_t, sigma2);
        (void)w;
        const double act = detail::seconds_since(t0);
        passive_s[i].push_back(po.seconds);
        active_s[i].push_back(act);
        total_s[i].push_back(po.seconds + act);
      }
    }
    for (size_t i = 0; i < live.size(); ++i) {
      const std::string label = live[i].label();
      const double mean_total = detail::mean_of(total_s[i]);
      const int trials = static_cast<int>(config.trials);
      const auto emit = [&](const std::string& metric,
                            const std::vector<double>& samples,
                            bool median) {
        result.rows.push_back(ResultRow{
            label, n, metric,
            median ? detail::median_of(samples) : detail::mean_of(samples),
            detail::stddev_of(samples), mean_total, trials});
      };
      emit("passive_time_s", passive_s[i], false);
      emit("passive_time_median_s", passive_s[i], true);
      emit("active_time_s", active_s[i], false);
      emit("active_time_median_s", active_s[i], true);
      emit("total_time_s", total_s[i], false);
      emit("total_time_median_s", total_s[i], true);
    }
  }
  return result;
}

// First-order reference solver for the relaxed problem: projected
// gradient ascent from theta0 with a backtracking step, staying inside
// ||Theta||_F^2 <= N.  Monotone by construction.
inline RelaxedSolution projected_gradient_from(const ChannelSet& ch,
                                               const CMatrix& theta0,
                                               int step_count) {
  const int n = ch.ris_elements();
  const double n_d = static_cast<double>(n);
  const auto objective = [&](const CMatrix& th) {
    return (ch.G_mat.adjoint() + ch.H_mat.adjoint() * th * ch.E_mat)
        .squaredNorm();
  };
  const auto gradient = [&](const CMatrix& th) -> CMatrix {
    return ch.H_mat *
           (ch.G_mat.adjoint() + ch.H_mat.adjoint() * th * ch.E_mat) *
           ch.E_mat.adjoint();
  };
  const auto clamp_to_ball = [&](CMatrix th) -> CMatrix {
    const double sq = th.squaredNorm();
    if (sq > n_d) th *= std::sqrt(n_d / sq);
    return th;
  };

  CMatrix theta = clamp_to_ball(theta0);
  double best = objective(theta);
  const double g0 = gradient(theta).norm();
  double step = g0 > 0.0 ? std::sqrt(n_d) / g0 : 1.0;
  const double step_floor = step * 1e-16;

  for (int it = 0; it < step_count; ++it) {
    const CMatrix g = gradient(theta);
    const CMatrix candidate = clamp_to_ball(theta + step * g);
    const double value = objective(candidate);
    if (value > best) {
      theta = candidate;
      best = value;
      step *= 1.6;
    } else {
      step *= 0.5;
      if (step < step_floor) break;
    }
  }

  RelaxedSolution sol;
  sol.theta = theta;
  sol.method = RelaxationMethod::Oracle;
  sol.objective = best;
  return sol;
}

// Brute-force oracle: multistart projected gradient ascent.  First start
// is the gradient direction at zero, the rest are random boundary points
// from a fixed-seed stream.  Intended for small N; used by tests to
// certify relaxed_optimal.
inline RelaxedSolution projected_gradient_oracle(const ChannelSet& ch,
                                                 int step_count = 1000,
                                                 int restarts = 20) {
  const int n = ch.ris_elements();
  const double n_d = static_cast<double>(n);

  restarts = std::max(restarts, 1);
  std::vector<CMatrix> starts;
  const CMatrix m = sum_gain_gradient_at_zero(ch);
  if (m.norm() > 0.0) {
    starts.push_back(std::sqrt(n_d) / m.norm() * m);
  }
  detail::GaussianPairSampler gauss(UINT64_C(0x9e3779b97f4a7c15));
  while (static_cast<int>(starts.size()) < restarts) {
    CMatrix r(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        r(i, j) = gauss.complex_normal(1.0);
      }
    }
    if (r.norm() == 0.0) continue;
    starts.push_back(std::sqrt(n_d) / r.norm() * r);
  }

  RelaxedSolution best;
  best.method = RelaxationMethod::Oracle;
  best.objective = -1.0;
  for (const CMatrix& s : starts) {
    RelaxedSolution cand = projected_gradient_from(ch, s, step_count);
    if (cand.objective > best.objective) best = std::move(cand);
  }
  return best;
}

}  // namespace bdris
