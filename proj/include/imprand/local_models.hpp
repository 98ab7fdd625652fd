#pragma once

// One-step expectation calculus on the binary outcome space {0,1}.

#include <algorithm>
#include <cmath>
#include <string>

#include "imprand/errors.hpp"
#include "imprand/number.hpp"
#include "imprand/situation.hpp"

namespace imprand {

/// A gamble on the next outcome: payoff if the outcome is one, and if it is zero.
template <Scalar S>
struct basic_gamble {
  S at_one{};
  S at_zero{};

  S operator()(Bit x) const { return x ? at_one : at_zero; }
  S max() const { return at_one < at_zero ? at_zero : at_one; }
  S min() const { return at_one < at_zero ? at_one : at_zero; }
  // Variation seminorm max f - min f.
  S variation() const { return max() - min(); }

  basic_gamble operator-() const { return {-at_one, -at_zero}; }
  friend basic_gamble operator+(const basic_gamble& f, const basic_gamble& g) {
    return {f.at_one + g.at_one, f.at_zero + g.at_zero};
  }
  friend basic_gamble operator-(const basic_gamble& f, const basic_gamble& g) {
    return {f.at_one - g.at_one, f.at_zero - g.at_zero};
  }
  friend basic_gamble operator+(const basic_gamble& f, const S& mu) { return {f.at_one + mu, f.at_zero + mu}; }
  friend basic_gamble operator-(const basic_gamble& f, const S& mu) { return {f.at_one - mu, f.at_zero - mu}; }
  friend basic_gamble operator*(const S& lambda, const basic_gamble& f) {
    return {lambda * f.at_one, lambda * f.at_zero};
  }
  friend bool operator==(const basic_gamble&, const basic_gamble&) = default;
};

using Gamble = basic_gamble<double>;
using ExactGamble = basic_gamble<Rational>;

/// Closed subinterval [lower, upper] of the unit interval.
template <Scalar S>
class basic_interval {
 public:
  basic_interval(S lower, S upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if constexpr (!is_exact_v<S>) {
      if (std::isnan(lower_) || std::isnan(upper_)) throw domain_error("interval forecast endpoint is NaN");
    }
    if (!(S(0) <= lower_ && lower_ <= upper_ && upper_ <= S(1)))
      throw domain_error("interval forecast [" + format_scalar(lower_) + "," + format_scalar(upper_) +
                         "] violates 0 <= lower <= upper <= 1");
  }

  static basic_interval precise(const S& p) { return basic_interval(p, p); }
  static basic_interval vacuous() { return basic_interval(S(0), S(1)); }

  const S& lower() const noexcept { return lower_; }
  const S& upper() const noexcept { return upper_; }
  bool is_precise() const { return lower_ == upper_; }
  S width() const { return upper_ - lower_; }
  bool contains(const S& p) const { return lower_ <= p && p <= upper_; }
  bool subset_of(const basic_interval& other) const { return other.lower_ <= lower_ && upper_ <= other.upper_; }

  std::string str() const { return "[" + format_scalar(lower_) + "," + format_scalar(upper_) + "]"; }

  friend bool operator==(const basic_interval&, const basic_interval&) = default;

 private:
  S lower_;
  S upper_;
};

using Interval = basic_interval<double>;
using ExactInterval = basic_interval<Rational>;

inline Interval to_binary64(const ExactInterval& i) { return Interval(to_double(i.lower()), to_double(i.upper())); }
inline const Interval& to_binary64(const Interval& i) { return i; }

/// Precise expectation p f(1) + (1-p) f(0).
template <Scalar S>
S ex_precise(const S& p, const basic_gamble<S>& f) {
  if constexpr (!is_exact_v<S>) {
    if (std::isnan(p)) throw domain_error("probability is NaN");
  }
  if (p < S(0) || p > S(1)) throw domain_error("probability " + format_scalar(p) + " outside [0,1]");
  return p * f.at_one + (S(1) - p) * f.at_zero;
}

/// Lower expectation: minimum of the precise expectation over the interval.
/// Attained at the lower endpoint when f(1) >= f(0), else at the upper one.
template <Scalar S>
S lower_ex(const basic_interval<S>& I, const basic_gamble<S>& f) {
  return f.at_one >= f.at_zero ? ex_precise(I.lower(), f) : ex_precise(I.upper(), f);
}

/// Upper expectation: maximum over the interval; equals -lower_ex(I, -f).
template <Scalar S>
S upper_ex(const basic_interval<S>& I, const basic_gamble<S>& f) {
  return f.at_one >= f.at_zero ? ex_precise(I.upper(), f) : ex_precise(I.lower(), f);
}

}  // namespace imprand
