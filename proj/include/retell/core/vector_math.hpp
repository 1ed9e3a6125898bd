#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "retell/core/error.hpp"

namespace retell {

// Raw cosine in [-1, 1]. Zero vectors have no direction; they score 0.
inline double cosine(std::span<const float> a, std::span<const float> b) {
  require(a.size() == b.size(), "cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace retell
