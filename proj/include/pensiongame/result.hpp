#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace pensiongame {

enum class ErrorCode {
  // market / preferences
  NonPositiveRate,
  DriftBelowRiskFree,
  SingularVolatility,
  DimensionMismatch,
  InvalidPreference,
  // game one / pareto
  InadmissibleA,
  InadmissibleB,
  InadmissibleA0,
  NonPositiveSurplus,
  // game two
  RequiresAlphaAboveR,
  MuEqualsOne,
  NegativeDiscriminant,
  EtaOutOfRange,
  InvalidBarriers,
  SurplusOutsideBarriers,
  // sensitivity
  InfeasiblePerturbation,
  UnsupportedParameter,
  // stochastics
  NonPositiveStart,
  InvalidGrid,
  InadmissibleSolution,
  InfeasibleSolution,
  TailBoundNotMet,
  DivergentIntegral,
  ExcessiveCensoring,
  DegenerateVolatility,
  PropertyViolation,
  // cli
  ConfigParse,
  IoFailure,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::DriftBelowRiskFree: return "DriftBelowRiskFree";
    case ErrorCode::SingularVolatility: return "SingularVolatility";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidPreference: return "InvalidPreference";
    case ErrorCode::InadmissibleA: return "InadmissibleA";
    case ErrorCode::InadmissibleB: return "InadmissibleB";
    case ErrorCode::InadmissibleA0: return "InadmissibleA0";
    case ErrorCode::NonPositiveSurplus: return "NonPositiveSurplus";
    case ErrorCode::RequiresAlphaAboveR: return "RequiresAlphaAboveR";
    case ErrorCode::MuEqualsOne: return "MuEqualsOne";
    case ErrorCode::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorCode::EtaOutOfRange: return "EtaOutOfRange";
    case ErrorCode::InvalidBarriers: return "InvalidBarriers";
    case ErrorCode::SurplusOutsideBarriers: return "SurplusOutsideBarriers";
    case ErrorCode::InfeasiblePerturbation: return "InfeasiblePerturbation";
    case ErrorCode::UnsupportedParameter: return "UnsupportedParameter";
    case ErrorCode::NonPositiveStart: return "NonPositiveStart";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InadmissibleSolution: return "InadmissibleSolution";
    case ErrorCode::InfeasibleSolution: return "InfeasibleSolution";
    case ErrorCode::TailBoundNotMet: return "TailBoundNotMet";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::ExcessiveCensoring: return "ExcessiveCensoring";
    case ErrorCode::DegenerateVolatility: return "DegenerateVolatility";
    case ErrorCode::PropertyViolation: return "PropertyViolation";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

struct Error {
  ErrorCode code;
  std::string message;
};

/// Thrown by Result<T>::value() when the result holds an Error.
class Failure : public std::runtime_error {
 public:
  explicit Failure(Error e)
      : std::runtime_error(std::string(to_string(e.code)) + ": " + e.message), error_(std::move(e)) {}
  const Error& error() const noexcept { return error_; }

 private:
  Error error_;
};

/// Value-or-error return type for operations whose failure is part of the
/// domain (inadmissible parameters, infeasible cells) rather than a bug.
template <class T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Error error) : data_(std::move(error)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return std::holds_alternative<T>(data_); }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& {
    if (!ok()) throw Failure(std::get<Error>(data_));
    return std::get<T>(data_);
  }
  T& value() & {
    if (!ok()) throw Failure(std::get<Error>(data_));
    return std::get<T>(data_);
  }
  T&& value() && {
    if (!ok()) throw Failure(std::get<Error>(data_));
    return std::get<T>(std::move(data_));
  }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

  const Error& error() const { return std::get<Error>(data_); }
  ErrorCode code() const { return error().code; }

 private:
  std::variant<T, Error> data_;
};

inline Error make_error(ErrorCode code, std::string message) { return Error{code, std::move(message)}; }

}  // namespace pensiongame
