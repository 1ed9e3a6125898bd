#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/core/error.hpp"
#include "retell/core/text.hpp"

namespace retell::feedback {

struct LabeledSimilarity {
  double similarity = 0.0;
  bool correct = false;
};

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct Calibration {
  std::vector<RocPoint> points;  // ascending threshold
  double auc = 0.0;
  double chosen_threshold = 0.0;
  double youden_j = 0.0;
  std::string criterion = "youden";
};

// ROC over every distinct similarity used as a threshold (predict correct
// when similarity >= threshold). The operating point maximizes Youden's
// J = tpr - fpr, ties to the smaller threshold; AUC is the trapezoid area
// from (0, 0). Comparisons use integer counts, so ties are exact.
inline Calibration calibrate_threshold(std::span<const LabeledSimilarity> labeled) {
  std::int64_t pos = 0, neg = 0;
  for (const auto& l : labeled) (l.correct ? pos : neg) += 1;
  if (pos == 0 || neg == 0) {
    fail(ErrorCode::calibration, "calibration needs at least one correct and one incorrect example");
  }

  std::vector<LabeledSimilarity> sorted(labeled.begin(), labeled.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.similarity > b.similarity; });

  struct Count {
    double threshold;
    std::int64_t tp, fp;
  };
  std::vector<Count> counts;  // descending threshold
  std::int64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].similarity;
    while (i < sorted.size() && sorted[i].similarity == t) {
      (sorted[i].correct ? tp : fp) += 1;
      ++i;
    }
    counts.push_back({t, tp, fp});
  }

  Calibration cal;
  std::int64_t area2 = 0;  // 2 * P * N * AUC
  std::int64_t prev_tp = 0, prev_fp = 0;
  for (const auto& c : counts) {
    area2 += (c.fp - prev_fp) * (c.tp + prev_tp);
    prev_tp = c.tp;
    prev_fp = c.fp;
  }
  cal.auc = static_cast<double>(area2) / static_cast<double>(2 * pos * neg);

  std::int64_t best_j = 0;  // J * P * N
  bool have_best = false;
  for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
    cal.points.push_back({it->threshold, static_cast<double>(it->tp) / static_cast<double>(pos),
                          static_cast<double>(it->fp) / static_cast<double>(neg)});
    std::int64_t j = it->tp * neg - it->fp * pos;
    if (!have_best || j > best_j) {
      best_j = j;
      have_best = true;
      cal.chosen_threshold = it->threshold;
    }
  }
  cal.youden_j = static_cast<double>(best_j) / static_cast<double>(pos * neg);
  return cal;
}

// "similarity,label" rows; a header row is optional. Labels: correct /
// incorrect, 1 / 0, true / false, yes / no.
inline std::vector<LabeledSimilarity> parse_labeled_csv(const std::string& csv) {
  std::vector<LabeledSimilarity> out;
  std::istringstream in(csv);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    auto cols = text::split(line, ',');
    if (cols.size() != 2) fail(ErrorCode::invalid_argument, "line " + std::to_string(line_no) + ": expected 2 columns");
    auto label = text::to_lower(cols[1]);
    if (line_no == 1 && text::to_lower(cols[0]) == "similarity") continue;
    LabeledSimilarity row;
    try {
      std::size_t used = 0;
      row.similarity = std::stod(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail(ErrorCode::invalid_argument, "line " + std::to_string(line_no) + ": bad similarity '" + cols[0] + "'");
    }
    if (label == "correct" || label == "1" || label == "true" || label == "yes") {
      row.correct = true;
    } else if (label == "incorrect" || label == "0" || label == "false" || label == "no") {
      row.correct = false;
    } else {
      fail(ErrorCode::invalid_argument, "line " + std::to_string(line_no) + ": bad label '" + cols[1] + "'");
    }
    out.push_back(row);
  }
  return out;
}

inline void to_json(nlohmann::json& j, const RocPoint& p) {
  j = {{"threshold", p.threshold}, {"tpr", p.tpr}, {"fpr", p.fpr}};
}

inline void to_json(nlohmann::json& j, const Calibration& c) {
  j = {{"points", c.points},
       {"auc", c.auc},
       {"chosen_threshold", c.chosen_threshold},
       {"youden_j", c.youden_j},
       {"criterion", c.criterion}};
}

}  // namespace retell::feedback
