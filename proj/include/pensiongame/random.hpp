#pragma once

// Random numbers for the simulators. Every Monte-Carlo path owns a substream
// keyed by (seed, path index): Philox4x32 maps the pair to the 256-bit state
// of a xoshiro256++ generator, so a path's draws do not depend on how paths
// are scheduled across threads.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>


namespace pensiongame::random {

/// Philox4x32 with 10 rounds (Salmon et al., Random123).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// xoshiro256++ (Blackman and Vigna).
class Xoshiro256pp {
 public:
  using State = std::array<std::uint64_t, 4>;

  explicit constexpr Xoshiro256pp(const State& s) noexcept : s_(s) {
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ull;
  }

  constexpr std::uint64_t operator()() noexcept {
    const std::uint64_t out = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

  constexpr const State& state() const noexcept { return s_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  State s_;
};

/// Initial xoshiro state of substream `stream` under `seed`: two Philox
/// blocks with counters (j, 0, stream_lo, stream_hi), j = 0, 1.
constexpr Xoshiro256pp::State substream_state(std::uint64_t seed, std::uint64_t stream) noexcept {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  Xoshiro256pp::State st{};
  for (std::uint32_t j = 0; j < 2; ++j) {
    const auto w = Philox4x32::generate(
        {j, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)}, key);
    st[2 * j] = (std::uint64_t{w[0]} << 32) | w[1];
    st[2 * j + 1] = (std::uint64_t{w[2]} << 32) | w[3];
  }
  return st;
}

/// Uniform on the open interval (0, 1) from the top 53 bits. The largest
/// input would round to 1 and is clamped below it.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return std::min((static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53, 0x1.fffffffffffffp-1);
}

namespace detail {

// Wichura's AS241 (PPND16) coefficients, numerator and denominator for the
// central region and the two tail regions, highest degree first.
inline constexpr double kCentralNum[8] = {2509.0809287301226727, 33430.575583588128105, 67265.770927008700853,
                                          45921.953931549871457, 13731.693765509461125, 1971.5909503065514427,
                                          133.14166789178437745, 3.387132872796366608};
inline constexpr double kCentralDen[8] = {5226.495278852545925, 28729.085735721942674, 39307.89580009271061,
                                          21213.794301586595867, 5394.1960214247511077, 687.1870074920579083,
                                          42.313330701600911252, 1.0};
inline constexpr double kNearNum[8] = {7.7454501427834140764e-4, 0.0227238449892691845833, 0.24178072517745061177,
                                       1.27045825245236838258, 3.64784832476320460504, 5.7694972214606914055,
                                       4.6303378461565452959, 1.42343711074968357734};
inline constexpr double kNearDen[8] = {1.05075007164441684324e-9, 5.475938084995344946e-4, 0.0151986665636164571966,
                                       0.14810397642748007459, 0.68976733498510000455, 1.6763848301838038494,
                                       2.05319162663775882187, 1.0};
inline constexpr double kFarNum[8] = {2.01033439929228813265e-7, 2.71155556874348757815e-5, 0.0012426609473880784386,
                                      0.026532189526576123093, 0.29656057182850489123, 1.7848265399172913358,
                                      5.4637849111641143699, 6.6579046435011037772};
inline constexpr double kFarDen[8] = {2.04426310338993978564e-15, 1.4215117583164458887e-7,
                                      1.8463183175100546818e-5, 7.868691311456132591e-4,
                                      0.0148753612908506148525, 0.13692988092273580531,
                                      0.59983220655588793769, 1.0};

inline double horner(const double (&c)[8], double x) {
  double acc = c[0] * x + c[1];
  for (int i = 2; i < 8; ++i) acc = acc * x + c[i];
  return acc;
}

}  // namespace detail

/// Inverse of the standard normal CDF, Wichura's AS241 (PPND16), relative
/// accuracy about 1e-16 over (0, 1).
inline double inverse_normal_cdf(double p) noexcept {
  using namespace detail;
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kCentralNum, r) / horner(kCentralDen, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  const double val = r <= 5.0 ? horner(kNearNum, r - 1.6) / horner(kNearDen, r - 1.6)
                              : horner(kFarNum, r - 5.0) / horner(kFarDen, r - 5.0);
  return q < 0.0 ? -val : val;
}

/// Block form of inverse_normal_cdf with identical results. The central
/// branch is a loop the compiler can vectorize; the tails, about 15% of
/// draws, are gathered and evaluated in a second pass.
inline void inverse_normal_cdf_block(std::span<const double> p, std::span<double> z) {
  constexpr std::size_t kChunk = 256;
  using namespace detail;
  std::array<double, kChunk> q;
  std::array<std::uint32_t, kChunk> idx;
  for (std::size_t base = 0; base < p.size(); base += kChunk) {
    const std::size_t n = std::min(kChunk, p.size() - base);
    const double* P = p.data() + base;
    double* Z = z.data() + base;
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = P[i] - 0.5;
      const double r = 0.180625 - q[i] * q[i];
      Z[i] = q[i] * horner(kCentralNum, r) / horner(kCentralDen, r);
    }
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      idx[m] = static_cast<std::uint32_t>(i);
      m += std::abs(q[i]) > 0.425;
    }
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t i = idx[j];
      const double r = std::sqrt(-std::log(q[i] < 0.0 ? P[i] : 1.0 - P[i]));
      const double val = r <= 5.0 ? horner(kNearNum, r - 1.6) / horner(kNearDen, r - 1.6)
                                  : horner(kFarNum, r - 5.0) / horner(kFarDen, r - 5.0);
      Z[i] = q[i] < 0.0 ? -val : val;
    }
  }
}

/// Sequential standard normal variates of one substream (seed, stream),
/// produced in blocks of kBlock.
class NormalStream {
 public:
  static constexpr std::size_t kBlock = 256;

  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(substream_state(seed, stream)) {}

  double next() {
    if (pos_ == kBlock) refill();
    return buf_[pos_++];
  }

  /// Fills dst with the next dst.size() variates; same sequence as next().
  void fill(std::span<double> dst) {
    std::size_t done = 0;
    while (done < dst.size()) {
      if (pos_ == kBlock) refill();
      const std::size_t take = std::min(kBlock - pos_, dst.size() - done);
      for (std::size_t i = 0; i < take; ++i) dst[done + i] = buf_[pos_ + i];
      pos_ += take;
      done += take;
    }
  }

 private:
  void refill() {
    for (auto& u : uni_) u = to_open_unit(gen_());
    inverse_normal_cdf_block(uni_, buf_);
    pos_ = 0;
  }

  Xoshiro256pp gen_;
  std::array<double, kBlock> uni_{};
  std::array<double, kBlock> buf_{};
  std::size_t pos_ = kBlock;
};

}  // namespace pensiongame::random
