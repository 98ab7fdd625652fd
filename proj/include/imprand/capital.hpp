#pragma once

// Sceptic's capital accounting: real processes, process differences,
// multiplier-generated test processes and supermartingale verification.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "imprand/errors.hpp"
#include "imprand/forecasting_system.hpp"
#include "imprand/local_models.hpp"
#include "imprand/situation.hpp"

namespace imprand {

/// Absolute tolerance on local (upper) expectations in binary64 mode.
inline constexpr double binary64_tolerance = 1e-12;

template <Scalar S>
constexpr S comparison_tolerance() {
  if constexpr (is_exact_v<S>) {
    return S(0);
  } else {
    return binary64_tolerance;
  }
}

/// A real process, given intensionally.
template <Scalar S>
using basic_real_process = std::function<S(BitsView)>;
using RealProcess = basic_real_process<double>;

/// x -> F(sx) - F(s).
template <Scalar S>
basic_gamble<S> process_difference(const basic_real_process<S>& F, BitsView s) {
  std::vector<Bit> child(s.begin(), s.end());
  S here = F(s);
  child.push_back(1);
  S one = F(child);
  child.back() = 0;
  S zero = F(child);
  return {one - here, zero - here};
}

/// Per-situation nonnegative payoff pair; its running product along a path
/// is the capital of a test process.
struct MultiplierProcess {
  std::function<Gamble(BitsView)> eval;
  std::string provenance;

  Gamble operator()(BitsView s) const { return eval(s); }
};

inline MultiplierProcess constant_multiplier(Gamble g, std::string provenance = "constant") {
  return {[g](BitsView) { return g; }, std::move(provenance)};
}

/// Log of the capital D^M along a path prefix, entry k being ln D^M(w^k).
/// Capital 0 is encoded as -inf and is absorbing.
struct CapitalTrajectory {
  std::vector<double> log_capital{0.0};

  std::size_t steps() const noexcept { return log_capital.size() - 1; }
  double log_at(std::size_t k) const { return log_capital.at(k); }
  double capital_at(std::size_t k) const { return std::exp(log_capital.at(k)); }
  double final_log() const { return log_capital.back(); }
  double max_log() const { return *std::max_element(log_capital.begin(), log_capital.end()); }
};

namespace detail {

[[noreturn]] inline void bad_payoff(double v, BitsView s, const std::string& who) {
  throw contract_violation(who + ": multiplier payoff " + format_double(v) + " at situation " + situation_name(s) +
                           " is not a nonnegative real");
}

inline void check_payoff(double v, BitsView s, const std::string& who) {
  if (!(v >= 0.0 && v <= std::numeric_limits<double>::max())) [[unlikely]]
    bad_payoff(v, s, who);
}

}  // namespace detail

/// Runs the capital recursion D(sx) = D(s) M(s)(x) along the prefix.
inline CapitalTrajectory run_multiplier(const MultiplierProcess& M, BitsView path) {
  CapitalTrajectory t;
  t.log_capital.reserve(path.size() + 1);
  double log_d = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    auto s = path.first(k);
    Gamble g = M(s);
    detail::check_payoff(g.at_one, s, M.provenance);
    detail::check_payoff(g.at_zero, s, M.provenance);
    if (log_d != -std::numeric_limits<double>::infinity()) log_d += std::log(g(path[k]));
    t.log_capital.push_back(log_d);
  }
  return t;
}

/// D^M(s), evaluated from scratch (linear domain).
inline double multiplier_process_value(const MultiplierProcess& M, BitsView s) {
  double d = 1.0;
  for (std::size_t k = 0; k < s.size(); ++k) d *= M(s.first(k))(s[k]);
  return d;
}

inline RealProcess as_real_process(MultiplierProcess M) {
  return [M = std::move(M)](BitsView s) { return multiplier_process_value(M, s); };
}

/// Upper expectation of M(s) under I is at most 1.
template <Scalar S>
bool is_supermartingale_multiplier_at(const basic_gamble<S>& m_at_s, const basic_interval<S>& I) {
  return upper_ex(I, m_at_s) <= S(1) + comparison_tolerance<S>();
}

inline bool is_supermartingale_multiplier_at(const MultiplierProcess& M, const Interval& I, BitsView s) {
  return is_supermartingale_multiplier_at(M(s), I);
}

struct Violation {
  std::size_t depth = 0;
  std::string situation;
  double excess = 0.0;  // upper expectation of the (scaled) process difference
};

struct VerificationReport {
  std::size_t checked = 0;
  std::vector<Violation> violations;

  bool passed() const noexcept { return violations.empty(); }
};

/// Checks that the upper expectation of every process difference along the
/// prefix is non-positive. Violations are returned, not thrown.
template <Scalar S>
VerificationReport verify_supermartingale_along(const basic_real_process<S>& T,
                                                const basic_forecasting_system<S>& phi, BitsView path) {
  VerificationReport report;
  for (std::size_t k = 0; k < path.size(); ++k) {
    auto s = path.first(k);
    S ub = upper_ex(phi(s), process_difference(T, s));
    ++report.checked;
    if (ub > comparison_tolerance<S>()) report.violations.push_back({k, situation_name(s), to_double(ub)});
  }
  return report;
}

}  // namespace imprand
