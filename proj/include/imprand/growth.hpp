#pragma once

// Closed-form growth functions and crossing reports for capital trajectories.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "imprand/capital.hpp"
#include "imprand/errors.hpp"
#include "imprand/number.hpp"
#include "imprand/selection.hpp"

namespace imprand {

enum class GrowthFamily { affine, power, log_scaled, exp_scaled, selection_driven };

inline std::string to_string(GrowthFamily f) {
  switch (f) {
    case GrowthFamily::affine: return "affine";
    case GrowthFamily::power: return "power";
    case GrowthFamily::log_scaled: return "log-scaled";
    case GrowthFamily::exp_scaled: return "exp-scaled";
    case GrowthFamily::selection_driven: return "selection-driven";
  }
  return "?";
}

/// Non-decreasing, unbounded time bound tau, evaluated in the log domain.
///
///   affine            tau(n) = a n + b              a > 0, b >= 0
///   power             tau(n) = a (n + 1)^b          a > 0, b > 0
///   log-scaled        tau(n) = b + a ln(n + 1)      a > 0, b >= 0
///   exp-scaled        tau(n) = exp(a n + b)         a > 0
///   selection-driven  tau(n) = exp(a #{k < n : S(w^k) = 1} + b)
///
/// The selection-driven family depends on the audited path; it is unbounded
/// on paths where the selection fires infinitely often.
class GrowthFunction {
 public:
  static GrowthFunction affine(double a, double b) {
    require(a > 0 && b >= 0, "affine growth needs a > 0 and b >= 0");
    return GrowthFunction(GrowthFamily::affine, a, b, std::nullopt);
  }
  static GrowthFunction power(double a, double b) {
    require(a > 0 && b > 0, "power growth needs a > 0 and b > 0");
    return GrowthFunction(GrowthFamily::power, a, b, std::nullopt);
  }
  static GrowthFunction log_scaled(double a, double b = 0.0) {
    require(a > 0 && b >= 0, "log-scaled growth needs a > 0 and b >= 0");
    return GrowthFunction(GrowthFamily::log_scaled, a, b, std::nullopt);
  }
  static GrowthFunction exp_scaled(double a, double b = 0.0) {
    require(a > 0 && std::isfinite(b), "exp-scaled growth needs a > 0");
    return GrowthFunction(GrowthFamily::exp_scaled, a, b, std::nullopt);
  }
  static GrowthFunction selection_driven(double a, SelectionProcess sel, double b = 0.0) {
    require(a > 0 && std::isfinite(b), "selection-driven growth needs a > 0");
    return GrowthFunction(GrowthFamily::selection_driven, a, b, std::move(sel));
  }

  GrowthFamily family() const noexcept { return family_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  const std::optional<SelectionProcess>& selection() const noexcept { return selection_; }

  std::string name() const {
    std::string out = to_string(family_) + "(" + format_double(a_) + "," + format_double(b_);
    if (selection_) out += "," + selection_->name();
    return out + ")";
  }

  /// ln tau(n) for a path-independent family.
  double log_value(std::size_t n) const {
    double x = static_cast<double>(n);
    switch (family_) {
      case GrowthFamily::affine: return std::log(a_ * x + b_);
      case GrowthFamily::power: return std::log(a_) + b_ * std::log1p(x);
      case GrowthFamily::log_scaled: return std::log(b_ + a_ * std::log1p(x));
      case GrowthFamily::exp_scaled: return a_ * x + b_;
      case GrowthFamily::selection_driven: break;
    }
    throw parameter_error("selection-driven growth needs the audited path");
  }

  /// ln tau(n) for n = 0..|path|.
  std::vector<double> log_values(BitsView path) const {
    std::vector<double> out(path.size() + 1);
    if (family_ != GrowthFamily::selection_driven) {
      for (std::size_t n = 0; n <= path.size(); ++n) out[n] = log_value(n);
      return out;
    }
    std::size_t count = 0;
    out[0] = b_;
    for (std::size_t k = 0; k < path.size(); ++k) {
      if ((*selection_)(path.first(k))) ++count;
      out[k + 1] = a_ * static_cast<double>(count) + b_;
    }
    return out;
  }

 private:
  GrowthFunction(GrowthFamily f, double a, double b, std::optional<SelectionProcess> sel)
      : family_(f), a_(a), b_(b), selection_(std::move(sel)) {}

  static void require(bool ok, const char* what) {
    if (!ok) throw parameter_error(what);
  }

  GrowthFamily family_;
  double a_, b_;
  std::optional<SelectionProcess> selection_;
};

struct CrossingOptions {
  double tail_window = 0.5;  // fraction of the trajectory used as the limsup proxy
  double ratio_floor = 0.5;  // variant (iii): tail max of capital / tau must reach this
};

struct CrossingReport {
  std::string growth;
  std::vector<std::size_t> crossings;  // every n with capital(n) >= tau(n)
  std::optional<std::size_t> first, last;
  std::size_t tail_start = 0;
  bool every_tail_step = false;  // capital >= tau at every n of the tail window
  // Finite-horizon proxies of the three equivalent characterisations,
  // each evaluated over the tail window.
  bool strict_integer_excess = false;  // capital(n) > ceil(tau(n)) somewhere
  bool real_excess = false;            // capital(n) >= tau(n) somewhere
  bool ratio_bounded_away = false;     // capital(n) / tau(n) >= ratio_floor somewhere
  double max_tail_log_ratio = -std::numeric_limits<double>::infinity();

  std::size_t count() const noexcept { return crossings.size(); }
};

inline CrossingReport exceeds_growth(const CapitalTrajectory& traj, const std::vector<double>& log_tau,
                                     std::string growth_name, CrossingOptions opt = {}) {
  if (log_tau.size() < traj.log_capital.size())
    throw parameter_error("growth values do not cover the trajectory");
  if (!(opt.tail_window > 0.0 && opt.tail_window <= 1.0)) throw parameter_error("tail_window must lie in (0,1]");
  CrossingReport r;
  r.growth = std::move(growth_name);
  const std::size_t len = traj.log_capital.size();
  const auto tail_len = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(opt.tail_window * double(len))));
  r.tail_start = len - std::min(len, tail_len);
  r.every_tail_step = true;
  const double log_floor = std::log(opt.ratio_floor);
  for (std::size_t n = 0; n < len; ++n) {
    double lc = traj.log_capital[n];
    double lt = log_tau[n];
    bool crossed = lc >= lt;
    if (crossed) {
      r.crossings.push_back(n);
      if (!r.first) r.first = n;
      r.last = n;
    }
    if (n < r.tail_start) continue;
    if (!crossed) r.every_tail_step = false;
    if (crossed) r.real_excess = true;
    double ratio = lc - lt;
    if (!std::isnan(ratio)) r.max_tail_log_ratio = std::max(r.max_tail_log_ratio, ratio);
    if (ratio >= log_floor) r.ratio_bounded_away = true;
    if (std::isfinite(lt) && lt < 700.0) {
      if (lc > std::log(std::ceil(std::exp(lt)))) r.strict_integer_excess = true;
    } else if (lc > lt) {
      r.strict_integer_excess = true;
    }
  }
  return r;
}

inline CrossingReport exceeds_growth(const CapitalTrajectory& traj, const GrowthFunction& tau, BitsView path,
                                     CrossingOptions opt = {}) {
  if (path.size() + 1 < traj.log_capital.size()) throw parameter_error("path shorter than the trajectory");
  return exceeds_growth(traj, tau.log_values(path.first(traj.steps())), tau.name(), opt);
}

}  // namespace imprand
