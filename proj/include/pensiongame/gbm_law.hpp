#pragma once

#include <optional>
#include <string_view>

#include "pensiongame/market.hpp"

namespace pensiongame {

/// Probability measure under which a surplus law is expressed.
enum class MeasureTag { Reference, WorstCaseUnion, WorstCaseFirm };

constexpr std::string_view to_string(MeasureTag tag) noexcept {
  switch (tag) {
    case MeasureTag::Reference: return "reference";
    case MeasureTag::WorstCaseUnion: return "worst_case_union";
    case MeasureTag::WorstCaseFirm: return "worst_case_firm";
  }
  return "reference";
}

inline std::optional<MeasureTag> parse_measure(std::string_view s) {
  if (s == "reference") return MeasureTag::Reference;
  if (s == "worst_case_union" || s == "union") return MeasureTag::WorstCaseUnion;
  if (s == "worst_case_firm" || s == "firm") return MeasureTag::WorstCaseFirm;
  return std::nullopt;
}

/// Exact law of a geometric Brownian surplus
///   X(t) = X(s) exp{ log_drift (t - s) + vol^T (W(t) - W(s)) }.
struct GbmLaw {
  double log_drift = 0.0;
  Vector vol;
  MeasureTag measure = MeasureTag::Reference;

  double vol_sq() const { return vol.squaredNorm(); }
  /// Drift c of dX = c X dt + X vol^T dW.
  double sde_drift() const { return log_drift + 0.5 * vol_sq(); }
};

}  // namespace pensiongame
