#pragma once

#include <vector>

namespace pensiongame {

/// n evenly spaced points from a to b inclusive; the last point is b exactly.
inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  if (n <= 0) return v;
  if (n == 1) return {a};
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
  return v;
}

}  // namespace pensiongame
