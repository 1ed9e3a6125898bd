#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/core/error.hpp"

namespace retell::eval {

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;    // two-sided
  int n = 0;               // non-zero differences used
  int zeros_dropped = 0;
  bool exact = false;
  double effect_size = 0.0;  // matched-pairs rank-biserial (W+ - W-) / (W+ + W-)
};

struct WilcoxonOptions {
  int exact_max_n = 20;
  int min_nonzero = 5;
};

namespace detail {

// Doubled mid-ranks of |d| (integers even when ties produce half ranks).
inline std::vector<std::int64_t> doubled_midranks(const std::vector<double>& abs_diffs) {
  const auto n = abs_diffs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return abs_diffs[a] < abs_diffs[b]; });
  std::vector<std::int64_t> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && abs_diffs[order[j + 1]] == abs_diffs[order[i]]) ++j;
    // positions i..j (0-based) share rank ((i+1)+(j+1))/2
    auto doubled = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
    i = j + 1;
  }
  return ranks;
}

inline double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace detail

// Paired-sample signed-rank test on d = a - b. Zero differences are dropped,
// ties get mid-ranks. Exact null distribution (subset-sum counting over the
// actual ranks) up to exact_max_n, else the normal approximation with tie
// and continuity corrections.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> paired,
                                           const WilcoxonOptions& opts = {}) {
  std::vector<double> diffs;
  WilcoxonResult r;
  for (const auto& [a, b] : paired) {
    double d = a - b;
    if (d == 0.0) {
      ++r.zeros_dropped;
    } else {
      diffs.push_back(d);
    }
  }
  if (diffs.empty()) fail(ErrorCode::degenerate_input, "all paired differences are zero");
  if (static_cast<int>(diffs.size()) < opts.min_nonzero) {
    fail(ErrorCode::invalid_argument, "need at least " + std::to_string(opts.min_nonzero) +
                                          " non-zero differences, got " + std::to_string(diffs.size()));
  }
  r.n = static_cast<int>(diffs.size());

  std::vector<double> abs_diffs;
  for (double d : diffs) abs_diffs.push_back(std::abs(d));
  const auto ranks = detail::doubled_midranks(abs_diffs);

  std::int64_t plus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    total2 += ranks[i];
    if (diffs[i] > 0) plus2 += ranks[i];
  }
  const std::int64_t minus2 = total2 - plus2;
  r.w_plus = static_cast<double>(plus2) / 2.0;
  r.w_minus = static_cast<double>(minus2) / 2.0;
  r.statistic = std::min(r.w_plus, r.w_minus);
  r.effect_size = (r.w_plus - r.w_minus) / (r.w_plus + r.w_minus);

  if (r.n <= opts.exact_max_n) {
    r.exact = true;
    // counts[s]: number of sign assignments whose doubled W+ equals s
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total2) + 1, 0);
    counts[0] = 1;
    std::int64_t reach = 0;
    for (auto rank : ranks) {
      for (std::int64_t s = reach; s >= 0; --s) {
        if (counts[s]) counts[s + rank] += counts[s];
      }
      reach += rank;
    }
    const std::int64_t t2 = std::min(plus2, minus2);
    std::uint64_t tail = 0;
    for (std::int64_t s = 0; s <= t2; ++s) tail += counts[s];
    const double total = std::ldexp(1.0, r.n);
    r.p_value = std::min(1.0, 2.0 * static_cast<double>(tail) / total);
  } else {
    const double n = r.n;
    double tie_term = 0.0;
    std::vector<std::int64_t> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
    const double mean = n * (n + 1) / 4.0;
    const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::abs(r.w_plus - mean) - 0.5) / std::sqrt(var);
    r.p_value = std::clamp(detail::normal_two_sided(z), 0.0, 1.0);
  }
  return r;
}

inline void to_json(nlohmann::json& j, const WilcoxonResult& r) {
  j = {{"statistic", r.statistic}, {"w_plus", r.w_plus},   {"w_minus", r.w_minus},
       {"p_value", r.p_value},     {"n", r.n},             {"zeros_dropped", r.zeros_dropped},
       {"exact", r.exact},         {"effect_size", r.effect_size}};
}

}  // namespace retell::eval
