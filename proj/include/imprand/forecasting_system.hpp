#pragma once

// Forecasting systems: an interval forecast for every situation of the
// binary event tree, plus the named systems used throughout the library.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imprand/errors.hpp"
#include "imprand/local_models.hpp"
#include "imprand/number.hpp"
#include "imprand/situation.hpp"

namespace imprand {

enum class SystemKind { stationary, vacuous, alternating, near_half, explain_away, table, composite, custom };

inline std::string to_string(SystemKind k) {
  switch (k) {
    case SystemKind::stationary: return "stationary";
    case SystemKind::vacuous: return "vacuous";
    case SystemKind::alternating: return "alternating";
    case SystemKind::near_half: return "near-half";
    case SystemKind::explain_away: return "explain-away";
    case SystemKind::table: return "table";
    case SystemKind::composite: return "composite";
    case SystemKind::custom: return "custom";
  }
  return "unknown";
}

/// Maps every situation to an interval forecast. Evaluation is pure: the
/// result depends on the situation only. The descriptor is a canonical text
/// form used to match strategies with the system they were built for.
template <Scalar S>
class basic_forecasting_system {
 public:
  using scalar_type = S;
  using interval_type = basic_interval<S>;
  using evaluator = std::function<interval_type(BitsView)>;

  basic_forecasting_system(SystemKind kind, std::string descriptor, evaluator eval,
                           std::optional<S> max_imprecision = std::nullopt)
      : kind_(kind),
        descriptor_(std::move(descriptor)),
        eval_(std::make_shared<const evaluator>(std::move(eval))),
        max_imprecision_(std::move(max_imprecision)) {}

  interval_type operator()(BitsView s) const { return (*eval_)(s); }

  SystemKind kind() const noexcept { return kind_; }
  const std::string& descriptor() const noexcept { return descriptor_; }

  // sup over all situations of upper - lower, when it is known in closed form.
  const std::optional<S>& max_imprecision() const noexcept { return max_imprecision_; }

  // The constant forecast of a stationary (or vacuous) system.
  std::optional<interval_type> stationary_interval() const {
    if (kind_ == SystemKind::stationary || kind_ == SystemKind::vacuous) return (*this)(BitsView{});
    return std::nullopt;
  }

 private:
  SystemKind kind_;
  std::string descriptor_;
  std::shared_ptr<const evaluator> eval_;
  std::optional<S> max_imprecision_;
};

using ForecastingSystem = basic_forecasting_system<double>;
using ExactForecastingSystem = basic_forecasting_system<Rational>;

/// Converts an exact system to binary64, keeping its descriptor.
inline ForecastingSystem to_binary64(const ExactForecastingSystem& sys) {
  std::optional<double> imprecision;
  if (sys.max_imprecision()) imprecision = to_double(*sys.max_imprecision());
  return ForecastingSystem(
      sys.kind(), sys.descriptor(), [sys](BitsView s) { return to_binary64(sys(s)); }, imprecision);
}
inline const ForecastingSystem& to_binary64(const ForecastingSystem& sys) { return sys; }

// ---------------------------------------------------------------------------
// Sequences used by the named systems

/// sqrt(8 / (n + 33)); strictly decreasing to 0 and below 1/2 for every n.
inline double near_half_delta(std::uint64_t n) { return std::sqrt(8.0 / (static_cast<double>(n) + 33.0)); }

/// 1/2 + (-1)^n sqrt(8 / (n + 33)).
inline double near_half_forecast(std::uint64_t n) {
  double d = near_half_delta(n);
  return n % 2 == 0 ? 0.5 + d : 0.5 - d;
}

/// Number of trailing zeros in the binary expansion of n + 1. Every value m
/// is hit by the infinitely many n = 2^m (2l + 1) - 1.
inline unsigned lambda_trailing_zeros(std::uint64_t n) {
  if (n == UINT64_MAX) throw domain_error("lambda argument overflows");
  return static_cast<unsigned>(std::countr_zero(n + 1));
}

// ---------------------------------------------------------------------------
// Builders

namespace systems {

template <Scalar S>
basic_forecasting_system<S> stationary(const basic_interval<S>& I) {
  return basic_forecasting_system<S>(
      SystemKind::stationary, "stationary(" + I.str() + ")", [I](BitsView) { return I; }, I.width());
}

template <Scalar S = double>
basic_forecasting_system<S> vacuous() {
  auto I = basic_interval<S>::vacuous();
  return basic_forecasting_system<S>(SystemKind::vacuous, "vacuous()", [I](BitsView) { return I; }, S(1));
}

/// p at odd depth, q at even depth (the initial situation has depth 0).
template <Scalar S>
basic_forecasting_system<S> alternating(const S& p, const S& q) {
  if (!(S(0) <= p && p < q && q <= S(1)))
    throw parameter_error("alternating system needs 0 <= p < q <= 1, got p=" + format_scalar(p) +
                          " q=" + format_scalar(q));
  auto odd = basic_interval<S>::precise(p);
  auto even = basic_interval<S>::precise(q);
  return basic_forecasting_system<S>(
      SystemKind::alternating, "alternating(" + format_scalar(p) + "," + format_scalar(q) + ")",
      [odd, even](BitsView s) { return s.size() % 2 == 1 ? odd : even; }, S(0));
}

/// Precise forecast near_half_forecast(|s|). Irrational values, so binary64 only.
inline ForecastingSystem near_half() {
  return ForecastingSystem(
      SystemKind::near_half, "near-half()",
      [](BitsView s) { return Interval::precise(near_half_forecast(s.size())); }, 0.0);
}

/// Explicit situation -> interval map (keys are '0'/'1' strings, "" for the
/// initial situation). Unlisted situations get the fallback, vacuous by default.
template <Scalar S>
basic_forecasting_system<S> table(std::map<std::string, basic_interval<S>> entries,
                                  std::optional<basic_interval<S>> fallback = std::nullopt) {
  auto fb = fallback.value_or(basic_interval<S>::vacuous());
  S widest = fb.width();
  std::string desc = "table({";
  bool first = true;
  for (const auto& [key, I] : entries) {
    for (char c : key)
      if (c != '0' && c != '1') throw parameter_error("table key '" + key + "' is not a bit string");
    if (widest < I.width()) widest = I.width();
    desc += (first ? "" : ";") + (key.empty() ? std::string("<init>") : key) + ":" + I.str();
    first = false;
  }
  desc += "}," + fb.str() + ")";
  auto shared = std::make_shared<const std::map<std::string, basic_interval<S>>>(std::move(entries));
  return basic_forecasting_system<S>(
      SystemKind::table, desc,
      [shared, fb](BitsView s) {
        auto it = shared->find(BitString::to_string(s));
        return it == shared->end() ? fb : it->second;
      },
      widest);
}

/// head below switch_depth, tail from switch_depth on.
template <Scalar S>
basic_forecasting_system<S> composite(basic_forecasting_system<S> head, basic_forecasting_system<S> tail,
                                      std::size_t switch_depth) {
  std::optional<S> imprecision;
  if (head.max_imprecision() && tail.max_imprecision())
    imprecision = *head.max_imprecision() < *tail.max_imprecision() ? *tail.max_imprecision() : *head.max_imprecision();
  std::string desc =
      "composite(" + head.descriptor() + "," + tail.descriptor() + "," + std::to_string(switch_depth) + ")";
  return basic_forecasting_system<S>(
      SystemKind::composite, desc,
      [head = std::move(head), tail = std::move(tail), switch_depth](BitsView s) {
        return s.size() < switch_depth ? head(s) : tail(s);
      },
      imprecision);
}

template <Scalar S>
basic_forecasting_system<S> custom(std::string name, typename basic_forecasting_system<S>::evaluator eval,
                                   std::optional<S> max_imprecision = std::nullopt) {
  return basic_forecasting_system<S>(SystemKind::custom, "custom(" + name + ")", std::move(eval),
                                     std::move(max_imprecision));
}

}  // namespace systems

// ---------------------------------------------------------------------------
// Precise system whose forecasts stay inside I but infinitely often sit far
// from each of a finite list of rival systems with smaller imprecision.

template <Scalar S>
struct ExplainAwayRival {
  basic_forecasting_system<S> system;
  Rational epsilon;    // slack, a power of 1/2
  Rational lower;      // dyadic in (I.lower, I.lower + epsilon)
  Rational upper;      // dyadic in (I.upper - epsilon, I.upper)
  Rational threshold;  // upper - 2 epsilon: rival upper at or below it means "go high"
};

template <Scalar S>
struct ExplainAway {
  basic_interval<S> interval;
  std::vector<ExplainAwayRival<S>> rivals;
  basic_forecasting_system<S> system;

  // True when the rival's upper forecast at s is at most upper_m - 2 eps_m.
  bool goes_high(std::size_t m, BitsView s) const {
    const auto& r = rivals.at(m);
    return to_rational(rivals[m].system(s).upper()) <= r.threshold;
  }
};

namespace detail {

// Exact check of 0 <= lo < lo_m < lo_m + e < up_m - e < up_m < up <= 1.
inline bool explain_away_chain_holds(const Rational& lo, const Rational& up, const Rational& e, const Rational& lo_m,
                                     const Rational& up_m) {
  return Rational(0) <= lo && lo < lo_m && lo_m < lo + e && lo_m + e < up_m - e && up - e < up_m && up_m < up &&
         up <= Rational(1);
}

}  // namespace detail

/// Builds the explain-away construction for interval I and the given rivals.
/// For rival m: eps_m is the largest power of 1/2 (below 1) with
/// sup imprecision + 6 eps_m < width(I); lower_m and upper_m are dyadics near
/// I.lower + eps_m/2 and I.upper - eps_m/2. Rival m is consulted at depths
/// with lambda(depth) = m; other depths get I.upper.
template <Scalar S>
ExplainAway<S> explain_away(const basic_interval<S>& I, std::vector<basic_forecasting_system<S>> rivals) {
  const Rational lo = to_rational(I.lower());
  const Rational up = to_rational(I.upper());
  const Rational width = up - lo;
  std::vector<ExplainAwayRival<S>> params;
  params.reserve(rivals.size());
  for (std::size_t m = 0; m < rivals.size(); ++m) {
    auto& rival = rivals[m];
    if (!rival.max_imprecision())
      throw parameter_error("rival " + std::to_string(m) + " (" + rival.descriptor() +
                            ") has no certified highest imprecision");
    Rational sup = to_rational(*rival.max_imprecision());
    if (sup >= width)
      throw parameter_error("rival " + std::to_string(m) + " (" + rival.descriptor() +
                            "): highest imprecision is not smaller than that of " + I.str());
    Rational eps(1, 2);
    unsigned k = 1;
    while (!(sup + 6 * eps < width)) {
      eps /= 2;
      if (++k > 4000) throw parameter_error("no usable epsilon for rival " + std::to_string(m));
    }
    // Round to a grid of eps/16 so the endpoints are dyadic.
    using boost::multiprecision::cpp_int;
    Rational grid = eps / 16;
    auto ceil_to_grid = [&](const Rational& x) {
      Rational t = x / grid;
      cpp_int q = numerator(t) / denominator(t);
      if (Rational(q) < t) q += 1;
      return Rational(q) * grid;
    };
    auto floor_to_grid = [&](const Rational& x) {
      Rational t = x / grid;
      cpp_int q = numerator(t) / denominator(t);
      if (Rational(q) > t) q -= 1;
      return Rational(q) * grid;
    };
    Rational lo_m = ceil_to_grid(lo + eps / 2);
    Rational up_m = floor_to_grid(up - eps / 2);
    if (!detail::explain_away_chain_holds(lo, up, eps, lo_m, up_m))
      throw parameter_error("explain-away inequality chain fails for rival " + std::to_string(m));
    params.push_back({std::move(rival), eps, lo_m, up_m, up_m - 2 * eps});
  }

  struct Cached {
    S high, low;
  };
  std::vector<Cached> cached;
  for (const auto& r : params) cached.push_back({scalar_from<S>(r.upper), scalar_from<S>(r.lower)});

  std::string desc = "explain-away(" + I.str() + ";rivals=";
  for (std::size_t m = 0; m < params.size(); ++m) desc += (m ? "|" : "") + params[m].system.descriptor();
  desc += ")";

  auto shared = std::make_shared<const std::vector<ExplainAwayRival<S>>>(params);
  S top = I.upper();
  auto system = basic_forecasting_system<S>(
      SystemKind::explain_away, desc,
      [shared, cached, top](BitsView s) {
        unsigned m = lambda_trailing_zeros(s.size());
        if (m >= shared->size()) return basic_interval<S>::precise(top);
        const auto& r = (*shared)[m];
        bool high = to_rational(r.system(s).upper()) <= r.threshold;
        return basic_interval<S>::precise(high ? cached[m].high : cached[m].low);
      },
      S(0));
  return ExplainAway<S>{I, std::move(params), std::move(system)};
}

// ---------------------------------------------------------------------------

inline constexpr std::size_t default_exhaustion_limit = 20;

/// phi(s) is a subset of psi(s) for every situation with |s| <= depth.
template <Scalar S>
bool is_at_least_as_conservative(const basic_forecasting_system<S>& phi, const basic_forecasting_system<S>& psi,
                                 std::size_t depth, std::size_t limit = default_exhaustion_limit) {
  if (depth > limit)
    throw resource_error("conservativeness check to depth " + std::to_string(depth) + " exceeds limit " +
                         std::to_string(limit));
  std::vector<Bit> buf;
  for (std::size_t d = 0; d <= depth; ++d) {
    buf.assign(d, 0);
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << d); ++idx) {
      for (std::size_t i = 0; i < d; ++i) buf[i] = static_cast<Bit>((idx >> (d - 1 - i)) & 1u);
      if (!phi(buf).subset_of(psi(buf))) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Declarative description of a system, as produced by the manifest parser.

struct SystemSpec {
  SystemKind kind = SystemKind::vacuous;
  std::optional<ExactInterval> interval;  // stationary, explain-away
  std::optional<Rational> p, q;           // alternating
  std::vector<ExactInterval> rivals;      // explain-away (stationary rivals)
  std::map<std::string, ExactInterval> entries;  // table
  std::optional<ExactInterval> fallback;          // table
  std::optional<ExactInterval> head, tail;        // composite
  std::size_t switch_depth = 0;                   // composite
  bool exact = true;  // every number was written as a rational literal
};

namespace detail {

template <Scalar S>
basic_interval<S> convert_interval(const ExactInterval& I) {
  return basic_interval<S>(scalar_from<S>(I.lower()), scalar_from<S>(I.upper()));
}

inline const ExactInterval& require(const std::optional<ExactInterval>& v, const char* what) {
  if (!v) throw parameter_error(std::string("system descriptor is missing '") + what + "'");
  return *v;
}

}  // namespace detail

template <Scalar S>
basic_forecasting_system<S> build_system(const SystemSpec& spec) {
  switch (spec.kind) {
    case SystemKind::stationary:
      return systems::stationary(detail::convert_interval<S>(detail::require(spec.interval, "interval")));
    case SystemKind::vacuous:
      return systems::vacuous<S>();
    case SystemKind::alternating:
      if (!spec.p || !spec.q) throw parameter_error("alternating system needs 'p' and 'q'");
      return systems::alternating<S>(scalar_from<S>(*spec.p), scalar_from<S>(*spec.q));
    case SystemKind::near_half:
      if constexpr (is_exact_v<S>) {
        throw parameter_error("near-half forecasts are irrational; no exact form exists");
      } else {
        return systems::near_half();
      }
    case SystemKind::explain_away: {
      std::vector<basic_forecasting_system<S>> rivals;
      for (const auto& r : spec.rivals) rivals.push_back(systems::stationary(detail::convert_interval<S>(r)));
      if (rivals.empty()) throw parameter_error("explain-away system needs a non-empty rival list");
      return explain_away(detail::convert_interval<S>(detail::require(spec.interval, "interval")), std::move(rivals))
          .system;
    }
    case SystemKind::table: {
      std::map<std::string, basic_interval<S>> entries;
      for (const auto& [k, v] : spec.entries) entries.emplace(k, detail::convert_interval<S>(v));
      std::optional<basic_interval<S>> fb;
      if (spec.fallback) fb = detail::convert_interval<S>(*spec.fallback);
      return systems::table<S>(std::move(entries), fb);
    }
    case SystemKind::composite:
      return systems::composite(systems::stationary(detail::convert_interval<S>(detail::require(spec.head, "head"))),
                                systems::stationary(detail::convert_interval<S>(detail::require(spec.tail, "tail"))),
                                spec.switch_depth);
    case SystemKind::custom:
      break;
  }
  throw parameter_error("custom systems cannot be built from a descriptor");
}

}  // namespace imprand
