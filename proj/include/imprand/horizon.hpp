#pragma once

// Global lower and upper expectations of gambles that depend on the first n
// outcomes only, by backward induction through the local models.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "imprand/errors.hpp"
#include "imprand/forecasting_system.hpp"
#include "imprand/local_models.hpp"
#include "imprand/situation.hpp"

namespace imprand {

inline constexpr std::size_t default_horizon_limit = 20;

/// Dense payoff table over {0,1}^n. Index i encodes the string whose first
/// outcome is the most significant bit of i.
template <Scalar S>
class HorizonGamble {
 public:
  HorizonGamble(std::size_t horizon, std::vector<S> payoffs, std::size_t limit = default_horizon_limit)
      : horizon_(horizon), payoffs_(std::move(payoffs)) {
    check_horizon(horizon, limit);
    if (payoffs_.size() != (std::size_t{1} << horizon))
      throw parameter_error("payoff table for horizon " + std::to_string(horizon) + " needs " +
                            std::to_string(std::size_t{1} << horizon) + " entries, got " +
                            std::to_string(payoffs_.size()));
  }

  static HorizonGamble from(std::size_t horizon, const std::function<S(BitsView)>& g,
                            std::size_t limit = default_horizon_limit) {
    check_horizon(horizon, limit);
    std::vector<S> table;
    table.reserve(std::size_t{1} << horizon);
    std::vector<Bit> buf(horizon);
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << horizon); ++i) {
      decode(i, buf);
      table.push_back(g(buf));
    }
    return HorizonGamble(horizon, std::move(table), limit);
  }

  static HorizonGamble constant(std::size_t horizon, const S& c) {
    return HorizonGamble(horizon, std::vector<S>(std::size_t{1} << horizon, c));
  }

  /// Number of ones among the first n outcomes.
  static HorizonGamble ones_count(std::size_t horizon) {
    return from(horizon, [](BitsView s) { return S(static_cast<long long>(count_ones(s))); });
  }

  /// Indicator of the union of the cylinders [t], each |t| <= n.
  static HorizonGamble indicator(std::size_t horizon, const std::vector<BitString>& cylinders) {
    for (const auto& t : cylinders)
      if (t.size() > horizon)
        throw parameter_error("cylinder " + t.str() + " is deeper than horizon " + std::to_string(horizon));
    return from(horizon, [&](BitsView s) {
      for (const auto& t : cylinders)
        if (is_prefix_of(t, s)) return S(1);
      return S(0);
    });
  }

  std::size_t horizon() const noexcept { return horizon_; }
  const std::vector<S>& payoffs() const noexcept { return payoffs_; }
  const S& operator[](std::size_t i) const { return payoffs_.at(i); }
  const S& at(BitsView s) const { return payoffs_.at(encode(s)); }

  HorizonGamble operator-() const { return map([](const S& v) { return S(-v); }); }
  friend HorizonGamble operator+(const HorizonGamble& f, const HorizonGamble& g) { return zip(f, g, std::plus<S>{}); }
  friend HorizonGamble operator+(const HorizonGamble& f, const S& mu) {
    return f.map([&](const S& v) { return S(v + mu); });
  }
  friend HorizonGamble operator*(const S& lambda, const HorizonGamble& f) {
    return f.map([&](const S& v) { return S(lambda * v); });
  }

  static void decode(std::uint64_t index, std::vector<Bit>& out) {
    const std::size_t n = out.size();
    for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<Bit>((index >> (n - 1 - k)) & 1u);
  }
  static std::uint64_t encode(BitsView s) {
    std::uint64_t i = 0;
    for (Bit b : s) i = (i << 1) | b;
    return i;
  }

 private:
  static void check_horizon(std::size_t horizon, std::size_t limit) {
    if (horizon > limit)
      throw resource_error("horizon " + std::to_string(horizon) + " exceeds the exhaustion limit " +
                           std::to_string(limit));
  }

  template <class F>
  HorizonGamble map(F f) const {
    std::vector<S> out;
    out.reserve(payoffs_.size());
    for (const auto& v : payoffs_) out.push_back(f(v));
    return HorizonGamble(horizon_, std::move(out), horizon_);
  }
  template <class F>
  static HorizonGamble zip(const HorizonGamble& a, const HorizonGamble& b, F f) {
    if (a.horizon_ != b.horizon_) throw parameter_error("gambles have different horizons");
    std::vector<S> out;
    out.reserve(a.payoffs_.size());
    for (std::size_t i = 0; i < a.payoffs_.size(); ++i) out.push_back(f(a.payoffs_[i], b.payoffs_[i]));
    return HorizonGamble(a.horizon_, std::move(out), a.horizon_);
  }

  std::size_t horizon_;
  std::vector<S> payoffs_;
};

namespace detail {

// Collapses the table one level at a time, left to right, applying the local
// operator at every situation of the level above.
template <Scalar S, class Local>
S backward_induction(const basic_forecasting_system<S>& phi, const HorizonGamble<S>& g, Local local) {
  std::vector<S> values = g.payoffs();
  std::vector<Bit> buf;
  for (std::size_t depth = g.horizon(); depth-- > 0;) {
    buf.assign(depth, 0);
    const std::size_t count = std::size_t{1} << depth;
    for (std::size_t i = 0; i < count; ++i) {
      HorizonGamble<S>::decode(i, buf);
      basic_gamble<S> step{values[2 * i + 1], values[2 * i]};
      values[i] = local(phi(buf), step);
    }
    values.resize(count);
  }
  return values.front();
}

}  // namespace detail

template <Scalar S>
S upper_expectation_fh(const basic_forecasting_system<S>& phi, const HorizonGamble<S>& g) {
  return detail::backward_induction(phi, g, [](const basic_interval<S>& I, const basic_gamble<S>& f) {
    return upper_ex(I, f);
  });
}

template <Scalar S>
S lower_expectation_fh(const basic_forecasting_system<S>& phi, const HorizonGamble<S>& g) {
  return -upper_expectation_fh(phi, -g);
}

template <Scalar S>
S upper_probability_fh(const basic_forecasting_system<S>& phi, std::size_t horizon,
                       const std::vector<BitString>& cylinders) {
  return upper_expectation_fh(phi, HorizonGamble<S>::indicator(horizon, cylinders));
}

template <Scalar S>
S lower_probability_fh(const basic_forecasting_system<S>& phi, std::size_t horizon,
                       const std::vector<BitString>& cylinders) {
  return lower_expectation_fh(phi, HorizonGamble<S>::indicator(horizon, cylinders));
}

}  // namespace imprand
