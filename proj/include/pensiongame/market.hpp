#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "pensiongame/result.hpp"

namespace pensiongame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Constant-coefficient market: one risk-free asset and n risky assets.
/// Rates are annualized decimals.
struct MarketParams {
  double r = 0.0;  ///< risk-free rate
  Vector b;        ///< expected returns of the risky assets
  Matrix sigma;    ///< volatility matrix, n x n
};

/// Preference parameters of the union (alpha, gamma, lambda) and the firm
/// (beta, delta, mu).
struct Preferences {
  double alpha = 0.0;   ///< union time preference
  double beta = 0.0;    ///< firm time preference
  double gamma = 0.0;   ///< union relative risk aversion, != 1
  double delta = 0.0;   ///< firm relative risk aversion, != 1
  double lambda = 0.0;  ///< union ambiguity aversion
  double mu = 0.0;      ///< firm ambiguity aversion

  friend bool operator==(const Preferences&, const Preferences&) = default;
};

/// Market price of risk theta = sigma^{-1}(b - r 1) and its squared norm.
struct SharpeInfo {
  Vector theta;
  double theta_sq = 0.0;
};

namespace detail {

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace detail

/// Market parameters that passed validation, together with the cached
/// covariance Sigma = sigma sigma^T, its inverse, and the Sharpe vector.
/// Only obtainable through validate_market().
class ValidatedMarket {
 public:
  const MarketParams& params() const noexcept { return params_; }
  double r() const noexcept { return params_.r; }
  Eigen::Index n() const noexcept { return params_.b.size(); }
  const Matrix& sigma() const noexcept { return params_.sigma; }
  const Matrix& cov() const noexcept { return cov_; }
  const Matrix& cov_inv() const noexcept { return cov_inv_; }
  /// b - r 1
  const Vector& excess_return() const noexcept { return excess_; }
  /// Sigma^{-1}(b - r 1), the Merton direction.
  const Vector& merton_direction() const noexcept { return merton_; }
  const SharpeInfo& sharpe() const noexcept { return sharpe_; }

 private:
  friend Result<ValidatedMarket> validate_market(const MarketParams& m);
  ValidatedMarket() = default;

  MarketParams params_;
  Matrix cov_;
  Matrix cov_inv_;
  Vector excess_;
  Vector merton_;
  SharpeInfo sharpe_;
};

/// Relative eigenvalue threshold for the positive-definiteness test of Sigma.
inline constexpr double kSpdRelativeTolerance = 1e-12;

inline Result<ValidatedMarket> validate_market(const MarketParams& m) {
  const auto n = m.b.size();
  if (n < 1 || m.sigma.rows() != n || m.sigma.cols() != n) {
    return make_error(ErrorCode::DimensionMismatch,
                      "drift vector has length " + std::to_string(n) + " but sigma is " +
                          std::to_string(m.sigma.rows()) + "x" + std::to_string(m.sigma.cols()));
  }
  if (!std::isfinite(m.r) || !detail::all_finite(m.b) || !m.sigma.allFinite()) {
    return make_error(ErrorCode::DimensionMismatch, "market parameters must be finite");
  }
  if (m.r <= 0.0) {
    return make_error(ErrorCode::NonPositiveRate, "risk-free rate r must be > 0");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m.b[i] <= m.r) {
      return make_error(ErrorCode::DriftBelowRiskFree,
                        "drift b[" + std::to_string(i) + "] must exceed the risk-free rate");
    }
  }

  ValidatedMarket vm;
  vm.params_ = m;
  vm.cov_ = m.sigma * m.sigma.transpose();
  vm.cov_ = 0.5 * (vm.cov_ + vm.cov_.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(vm.cov_, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double max_ev = ev.maxCoeff();
  if (!(max_ev > 0.0) || ev.minCoeff() <= kSpdRelativeTolerance * max_ev) {
    return make_error(ErrorCode::SingularVolatility, "sigma sigma^T is not positive definite");
  }

  const Eigen::LLT<Matrix> llt(vm.cov_);
  vm.cov_inv_ = llt.solve(Matrix::Identity(n, n));
  vm.excess_ = m.b - Vector::Constant(n, m.r);
  vm.merton_ = llt.solve(vm.excess_);
  vm.sharpe_.theta = m.sigma.partialPivLu().solve(vm.excess_);
  vm.sharpe_.theta_sq = vm.sharpe_.theta.squaredNorm();
  return vm;
}

inline SharpeInfo sharpe(const ValidatedMarket& m) { return m.sharpe(); }

inline Result<Preferences> validate_preferences(const Preferences& p) {
  auto bad = [](const char* what) { return make_error(ErrorCode::InvalidPreference, what); };
  if (!(p.alpha > 0.0)) return bad("alpha must be > 0");
  if (!(p.beta > 0.0)) return bad("beta must be > 0");
  if (!(p.gamma > 0.0)) return bad("gamma must be > 0");
  if (p.gamma == 1.0) return bad("gamma must differ from 1 (gamma != 1)");
  if (!(p.delta > 0.0)) return bad("delta must be > 0");
  if (p.delta == 1.0) return bad("delta must differ from 1 (delta != 1)");
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) return bad("lambda must be >= 0");
  if (!(p.mu >= 0.0) || !std::isfinite(p.mu)) return bad("mu must be >= 0");
  return p;
}

/// Scalar (n = 1) market convenience constructor.
inline MarketParams scalar_market(double r, double b, double sigma) {
  MarketParams m;
  m.r = r;
  m.b = Vector::Constant(1, b);
  m.sigma = Matrix::Constant(1, 1, sigma);
  return m;
}

}  // namespace pensiongame
