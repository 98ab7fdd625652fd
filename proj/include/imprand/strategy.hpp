#pragma once

// Named test-supermartingale constructions and a walker-based runner that
// accumulates capital along a path while checking the supermartingale
// condition against the declared target system.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imprand/capital.hpp"
#include "imprand/errors.hpp"
#include "imprand/forecasting_system.hpp"
#include "imprand/growth.hpp"
#include "imprand/local_models.hpp"
#include "imprand/selection.hpp"

namespace imprand {

// ---------------------------------------------------------------------------
// Hellinger gambles

/// f_{a,b}(1) = sqrt(b/a)/c, f_{a,b}(0) = sqrt((1-b)/(1-a))/c with
/// c = sqrt(ab) + sqrt((1-a)(1-b)). E_a(f_{a,b}) = 1.
inline Gamble hellinger_gamble(double alpha, double beta) {
  auto open_unit = [](double p) { return p > 0.0 && p < 1.0; };
  if (!open_unit(alpha) || !open_unit(beta))
    throw domain_error("hellinger gamble needs alpha, beta in (0,1), got " + format_double(alpha) + ", " +
                       format_double(beta));
  const double c = std::sqrt(alpha * beta) + std::sqrt((1.0 - alpha) * (1.0 - beta));
  return {std::sqrt(beta / alpha) / c, std::sqrt((1.0 - beta) / (1.0 - alpha)) / c};
}

/// Lower bound (1 - (a-b)^2/4)^{-1} on f_{a,b}(x) f_{b,a}(x).
inline double hellinger_product_bound(double alpha, double beta) {
  const double d = alpha - beta;
  return 1.0 / (1.0 - d * d / 4.0);
}

// ---------------------------------------------------------------------------
// Walkers: incremental evaluation of a real process along one path.

class CapitalWalker {
 public:
  virtual ~CapitalWalker() = default;

  /// Ratios T(sx)/T(s) for x = 1, 0 at the current situation s. Returns
  /// (1,1) once the capital is zero.
  virtual Gamble peek(BitsView s) = 0;
  /// Moves to s x; must follow peek(s).
  virtual void advance(Bit x) = 0;
  /// ln T at the current situation.
  virtual double log_value() const = 0;
};

using WalkerFactory = std::function<std::unique_ptr<CapitalWalker>()>;

class MultiplierWalker final : public CapitalWalker {
 public:
  explicit MultiplierWalker(MultiplierProcess M) : M_(std::move(M)) {}

  Gamble peek(BitsView s) override {
    if (dead()) return last_ = {1.0, 1.0};
    last_ = M_(s);
    detail::check_payoff(last_.at_one, s, M_.provenance);
    detail::check_payoff(last_.at_zero, s, M_.provenance);
    return last_;
  }
  void advance(Bit x) override {
    if (dead()) return;
    // The running product is folded into log_ only when it leaves a safe range.
    scale_ *= last_(x);
    if (scale_ == 0.0) {
      log_ = -std::numeric_limits<double>::infinity();
    } else if (scale_ > 0x1.0p+400 || scale_ < 0x1.0p-400) {
      log_ += std::log(scale_);
      scale_ = 1.0;
    }
  }
  double log_value() const override { return dead() ? log_ : log_ + std::log(scale_); }

 private:
  bool dead() const { return log_ == -std::numeric_limits<double>::infinity(); }

  MultiplierProcess M_;
  Gamble last_{1.0, 1.0};
  double log_ = 0.0;
  double scale_ = 1.0;
};

// Weighted sum of members. Each member's weighted capital is kept relative to
// a common scale that is folded into log_ when it drifts too far.
class MixtureWalker final : public CapitalWalker {
 public:
  MixtureWalker(std::vector<std::unique_ptr<CapitalWalker>> members, const std::vector<double>& weights)
      : members_(std::move(members)), parts_(weights), ratios_(members_.size(), Gamble{1.0, 1.0}) {
    double cash = 1.0;
    for (double w : weights) cash -= w;
    cash_ = std::max(0.0, cash);
    total_ = cash_;
    for (double w : weights) total_ += w;
  }

  Gamble peek(BitsView s) override {
    Gamble next{cash_, cash_};
    for (std::size_t k = 0; k < members_.size(); ++k) {
      if (parts_[k] == 0.0) continue;
      ratios_[k] = members_[k]->peek(s);
      next.at_one += parts_[k] * ratios_[k].at_one;
      next.at_zero += parts_[k] * ratios_[k].at_zero;
    }
    next_ = next;
    return {next.at_one / total_, next.at_zero / total_};
  }
  void advance(Bit x) override {
    if (log_ == -std::numeric_limits<double>::infinity()) return;
    const double next = next_(x);
    if (next <= 0.0) {
      log_ = -std::numeric_limits<double>::infinity();
      return;
    }
    for (std::size_t k = 0; k < members_.size(); ++k) {
      if (parts_[k] == 0.0) continue;
      parts_[k] *= ratios_[k](x);
      members_[k]->advance(x);
    }
    total_ = next;
    if (total_ > 0x1.0p+400 || total_ < 0x1.0p-400) {
      const double inv = 1.0 / total_;
      for (double& p : parts_) p *= inv;
      cash_ *= inv;
      log_ += std::log(total_);
      total_ = 1.0;
    }
  }
  double log_value() const override { return log_ == -std::numeric_limits<double>::infinity() ? log_ : log_ + std::log(total_); }

 private:
  std::vector<std::unique_ptr<CapitalWalker>> members_;
  std::vector<double> parts_;
  std::vector<Gamble> ratios_;
  double cash_ = 0.0;
  double total_ = 1.0;
  Gamble next_{1.0, 1.0};
  double log_ = 0.0;
};

class CapWalker final : public CapitalWalker {
 public:
  CapWalker(std::unique_ptr<CapitalWalker> inner, double alpha) : inner_(std::move(inner)), log_alpha_(std::log(alpha)) {}

  Gamble peek(BitsView s) override {
    if (absorbed_) return {1.0, 1.0};
    Gamble r = inner_->peek(s);
    const double v = inner_->log_value();
    auto capped = [&](double ratio) {
      return v + std::log(ratio) >= log_alpha_ ? std::exp(log_alpha_ - v) : ratio;
    };
    return {capped(r.at_one), capped(r.at_zero)};
  }
  void advance(Bit x) override {
    if (absorbed_) return;
    inner_->advance(x);
    if (inner_->log_value() >= log_alpha_) absorbed_ = true;
  }
  double log_value() const override { return absorbed_ ? log_alpha_ : inner_->log_value(); }

 private:
  std::unique_ptr<CapitalWalker> inner_;
  double log_alpha_;
  bool absorbed_ = false;
};

// T'(s) = (T(s) + 1/(|s|+1)) / 2.
class StrictWalker final : public CapitalWalker {
 public:
  explicit StrictWalker(std::unique_ptr<CapitalWalker> inner) : inner_(std::move(inner)) {}

  Gamble peek(BitsView s) override {
    Gamble r = inner_->peek(s);
    const double lt = inner_->log_value();
    const double c1 = 1.0 / static_cast<double>(depth_ + 1);
    const double c2 = 1.0 / static_cast<double>(depth_ + 2);
    auto ratio = [&](double rx) {
      if (lt > 0.0) {
        const double u = std::exp(-lt);
        return (rx + u * c2) / (1.0 + u * c1);
      }
      const double t = std::exp(lt);
      return (t * rx + c2) / (t + c1);
    };
    return {ratio(r.at_one), ratio(r.at_zero)};
  }
  void advance(Bit x) override {
    inner_->advance(x);
    ++depth_;
  }
  double log_value() const override {
    const double lt = inner_->log_value();
    const double lc = -std::log(static_cast<double>(depth_ + 1));
    const double hi = std::max(lt, lc), lo = std::min(lt, lc);
    return hi + std::log1p(std::exp(lo - hi)) - std::log(2.0);
  }

 private:
  std::unique_ptr<CapitalWalker> inner_;
  std::size_t depth_ = 0;
};

// ---------------------------------------------------------------------------
// Strategies

using StrategyParams = std::vector<std::pair<std::string, std::string>>;

/// A test process for Sceptic together with the system it is claimed to be a
/// supermartingale for.
struct Strategy {
  std::string name;
  StrategyParams params;
  ForecastingSystem target;
  WalkerFactory make_walker;
  std::optional<MultiplierProcess> multiplier;  // when multiplier-generated
  std::optional<GrowthFunction> paired_growth;  // Schnorr-mode companion

  std::string label() const {
    std::string out = name;
    if (params.empty()) return out;
    out += "(";
    for (std::size_t i = 0; i < params.size(); ++i) out += (i ? "," : "") + params[i].first + "=" + params[i].second;
    return out + ")";
  }
};

inline Strategy multiplier_strategy(std::string name, StrategyParams params, ForecastingSystem target,
                                    MultiplierProcess M) {
  Strategy s{std::move(name), std::move(params), std::move(target), {}, M, std::nullopt};
  s.make_walker = [M]() -> std::unique_ptr<CapitalWalker> { return std::make_unique<MultiplierWalker>(M); };
  return s;
}

/// Fixed bet g at every situation, e.g. (2,0) for doubling on ones.
inline Strategy constant_strategy(std::string name, const ForecastingSystem& target, Gamble g) {
  std::string provenance = name;
  StrategyParams params{{"multiplier", "(" + format_double(g.at_one) + "," + format_double(g.at_zero) + ")"}};
  return multiplier_strategy(std::move(name), std::move(params), target, constant_multiplier(g, provenance));
}

inline Strategy doubling_on_ones(const ForecastingSystem& target) {
  return constant_strategy("doubling-on-ones", target, {2.0, 0.0});
}

struct StrategyRun {
  CapitalTrajectory trajectory;
  VerificationReport verification;
  bool stopped_early = false;
};

struct RunOptions {
  bool verify = true;
  // Stop once ln capital reaches this value (bounded-mode early exit).
  double stop_at_log = std::numeric_limits<double>::infinity();
};

/// Runs the strategy along the path. With verification on, each step checks
/// that the upper expectation (under the target forecast) of the ratio
/// T(s.)/T(s) is at most 1, up to the binary64 tolerance.
inline StrategyRun run_strategy(const Strategy& strategy, BitsView path, RunOptions opt = {}) {
  StrategyRun run;
  auto walker = strategy.make_walker();
  run.trajectory.log_capital.reserve(path.size() + 1);
  for (std::size_t k = 0; k < path.size(); ++k) {
    auto s = path.first(k);
    Gamble r = walker->peek(s);
    if (opt.verify) {
      ++run.verification.checked;
      double ub = upper_ex(strategy.target(s), r);
      if (ub > 1.0 + binary64_tolerance && walker->log_value() > -std::numeric_limits<double>::infinity())
        run.verification.violations.push_back({k, situation_name(s), ub - 1.0});
    }
    walker->advance(path[k]);
    run.trajectory.log_capital.push_back(walker->log_value());
    if (walker->log_value() >= opt.stop_at_log) {
      run.stopped_early = k + 1 < path.size();
      break;
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Calibration supermartingale: M(s) = 1 - xi S(s) (h - lower_ex(phi(s), h)),
// xi = eps / (2 B^2).

template <Scalar S>
basic_gamble<S> calibration_factor(const basic_interval<S>& I, const basic_gamble<S>& h, bool selected, const S& xi) {
  if (!selected) return {S(1), S(1)};
  const S lower = lower_ex(I, h);
  return {S(1) - xi * (h.at_one - lower), S(1) - xi * (h.at_zero - lower)};
}

/// ln of the certified lower bound exp(eps^2/(4 B^2) count).
inline double calibration_bound_log(double eps, double B, std::size_t selected_count) {
  return eps * eps / (4.0 * B * B) * static_cast<double>(selected_count);
}

inline Strategy calibration_supermartingale(const ForecastingSystem& phi, const Gamble& h, const SelectionProcess& sel,
                                            double eps, double B) {
  if (!(eps > 0.0 && eps < B)) throw parameter_error("calibration needs 0 < eps < B");
  if (B < h.variation()) throw parameter_error("calibration needs B at least the variation of h");
  const double xi = eps / (2.0 * B * B);
  std::string hname = "(" + format_double(h.at_one) + "," + format_double(h.at_zero) + ")";
  MultiplierProcess M;
  M.provenance = "calibration";
  if (auto I = phi.stationary_interval()) {
    const Gamble on = calibration_factor(*I, h, true, xi);
    M.eval = [sel, on](BitsView s) { return sel(s) ? on : Gamble{1.0, 1.0}; };
  } else {
    M.eval = [phi, h, sel, xi](BitsView s) { return sel(s) ? calibration_factor(phi(s), h, true, xi) : Gamble{1.0, 1.0}; };
  }
  StrategyParams params{{"h", hname}, {"selection", sel.name()}, {"epsilon", format_double(eps)}, {"B", format_double(B)}};
  Strategy st = multiplier_strategy("calibration", std::move(params), phi, std::move(M));
  st.paired_growth = GrowthFunction::selection_driven(eps * eps / (4.0 * B * B), sel);
  return st;
}

// ---------------------------------------------------------------------------
// Divergence pairs: at scheduled s with precise reference forecast rho
// outside target(s), beta is the nearest target endpoint; the target side
// bets f_{beta,rho}, the reference side f_{rho,beta}.

struct StrategyPair {
  Strategy first;   // supermartingale for the first system
  Strategy second;  // supermartingale for the second system
};

namespace detail {

struct DivergenceStep {
  bool active = false;
  double beta = 0.0, rho = 0.0;
};

inline DivergenceStep divergence_step(const Interval& I, const Interval& ref, bool scheduled, bool skip_inactive,
                                      BitsView s) {
  if (!scheduled) return {};
  if (!ref.is_precise()) {
    if (skip_inactive) return {};
    throw parameter_error("divergence reference forecast " + ref.str() + " at situation " + situation_name(s) +
                          " is not precise");
  }
  const double rho = ref.lower();
  double beta;
  if (rho < I.lower()) {
    beta = I.lower();
  } else if (rho > I.upper()) {
    beta = I.upper();
  } else {
    if (skip_inactive) return {};
    throw parameter_error("divergence ordering fails at situation " + situation_name(s) + ": reference " +
                          format_double(rho) + " lies inside " + I.str());
  }
  if (!(rho > 0.0 && rho < 1.0 && beta > 0.0 && beta < 1.0)) {
    if (skip_inactive) return {};
    throw parameter_error("divergence endpoints at situation " + situation_name(s) + " are not inside (0,1)");
  }
  return {true, beta, rho};
}

}  // namespace detail

/// first: supermartingale for target; second: for reference. With
/// skip_inactive, scheduled situations that violate the ordering are left
/// out instead of raising.
inline StrategyPair divergence_pair(const ForecastingSystem& target, const ForecastingSystem& reference,
                                    const SelectionProcess& schedule, bool skip_inactive = false) {
  auto step = [target, reference, schedule, skip_inactive](BitsView s) {
    const bool on = schedule(s);
    if (!on) return detail::DivergenceStep{};
    return detail::divergence_step(target(s), reference(s), on, skip_inactive, s);
  };
  MultiplierProcess mt{[step](BitsView s) {
                         auto d = step(s);
                         return d.active ? hellinger_gamble(d.beta, d.rho) : Gamble{1.0, 1.0};
                       },
                       "divergence-target"};
  MultiplierProcess mr{[step](BitsView s) {
                         auto d = step(s);
                         return d.active ? hellinger_gamble(d.rho, d.beta) : Gamble{1.0, 1.0};
                       },
                       "divergence-reference"};
  auto I = target.stationary_interval();
  auto R = reference.stationary_interval();
  if (I && R) {
    // Both forecasts are constant: settle the step once, unless it would
    // raise, in which case the per-situation version reports where.
    std::optional<detail::DivergenceStep> fixed;
    try {
      fixed = detail::divergence_step(*I, *R, true, skip_inactive, BitsView{});
    } catch (const parameter_error&) {
    }
    if (fixed) {
      const Gamble t = fixed->active ? hellinger_gamble(fixed->beta, fixed->rho) : Gamble{1.0, 1.0};
      const Gamble r = fixed->active ? hellinger_gamble(fixed->rho, fixed->beta) : Gamble{1.0, 1.0};
      const Gamble off{1.0, 1.0};
      mt.eval = [schedule, t, off](BitsView s) { return schedule(s) ? t : off; };
      mr.eval = [schedule, r, off](BitsView s) { return schedule(s) ? r : off; };
    }
  }
  StrategyParams params{{"reference", reference.descriptor()}, {"schedule", schedule.name()}};
  StrategyParams rparams{{"against", target.descriptor()}, {"schedule", schedule.name()}};
  Strategy a = multiplier_strategy("divergence", params, target, std::move(mt));
  Strategy b = multiplier_strategy("divergence-reference", rparams, reference, std::move(mr));

  if (I && R && R->is_precise()) {
    // Constant gap: pair each side with half of the guaranteed log growth of
    // the product, counted over active steps.
    const double rho = R->lower();
    const double beta = rho < I->lower() ? I->lower() : I->upper();
    if (!I->contains(rho) && beta > 0.0 && beta < 1.0 && rho > 0.0 && rho < 1.0) {
      const double kappa = 0.5 * std::log(hellinger_product_bound(beta, rho));
      SelectionProcess active(SelectionKind::custom, schedule.name(), [schedule](BitsView s) { return schedule(s); });
      a.paired_growth = GrowthFunction::selection_driven(kappa, active);
      b.paired_growth = GrowthFunction::selection_driven(kappa, active);
    }
  }
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Rival exploitation for the explain-away construction.

/// delta = (1 - eps^2/4)^{-1}.
inline Rational rival_delta(const Rational& eps) { return Rational(1) / (Rational(1) - eps * eps / 4); }

/// first: M_m, a supermartingale multiplier for rival m; second: M_{m,lo,up}
/// for the constructed system. Both are (1,1) at depths with lambda != m.
inline StrategyPair rival_exploit_multipliers(std::size_t m, const ExplainAway<double>& ea) {
  if (m >= ea.rivals.size())
    throw parameter_error("rival index " + std::to_string(m) + " is not in the rival list (size " +
                          std::to_string(ea.rivals.size()) + ")");
  const auto& r = ea.rivals[m];
  const double eps = to_double(r.epsilon);
  const double up = to_double(r.upper), lo = to_double(r.lower);
  const Gamble rival_high = hellinger_gamble(up - eps, up), rival_low = hellinger_gamble(lo + eps, lo);
  const Gamble sys_high = hellinger_gamble(up, up - eps), sys_low = hellinger_gamble(lo, lo + eps);
  auto shared = std::make_shared<const ExplainAway<double>>(ea);
  auto choose = [shared, m](BitsView s, const Gamble& high, const Gamble& low) {
    if (lambda_trailing_zeros(s.size()) != m) return Gamble{1.0, 1.0};
    return shared->goes_high(m, s) ? high : low;
  };
  MultiplierProcess rival_M{[choose, rival_high, rival_low](BitsView s) { return choose(s, rival_high, rival_low); },
                            "rival-exploit"};
  MultiplierProcess sys_M{[choose, sys_high, sys_low](BitsView s) { return choose(s, sys_high, sys_low); },
                          "rival-exploit-companion"};
  StrategyParams params{{"rival", std::to_string(m)}, {"epsilon", format_scalar(r.epsilon)}};
  return {multiplier_strategy("rival-exploit", params, r.system, std::move(rival_M)),
          multiplier_strategy("rival-exploit-companion", params, ea.system, std::move(sys_M))};
}

// ---------------------------------------------------------------------------
// Transformations

/// Weighted sum of member capitals. Weights must be positive with sum at most
/// 1; any remainder is held as cash so the initial capital stays 1. Default
/// weights are 2^{-k} normalised.
inline Strategy mixture(std::vector<Strategy> members, std::optional<std::vector<double>> weights = std::nullopt) {
  if (members.empty()) throw parameter_error("mixture needs at least one strategy");
  for (const auto& m : members)
    if (m.target.descriptor() != members.front().target.descriptor())
      throw parameter_error("mixture members target different systems: " + members.front().target.descriptor() +
                            " vs " + m.target.descriptor());
  std::vector<double> w;
  if (weights) {
    w = *weights;
    if (w.size() != members.size()) throw parameter_error("mixture weights and members differ in number");
    double total = 0.0;
    for (double x : w) {
      if (!(x > 0.0)) throw parameter_error("mixture weights must be positive");
      total += x;
    }
    if (total > 1.0 + binary64_tolerance) throw parameter_error("mixture weights sum to more than 1");
  } else {
    double total = 0.0, v = 1.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      v /= 2.0;
      w.push_back(v);
      total += v;
    }
    for (double& x : w) x /= total;
  }
  auto shared = std::make_shared<const std::vector<Strategy>>(std::move(members));
  Strategy s{"mixture", {{"members", std::to_string(shared->size())}}, shared->front().target, {}, {}, {}};
  s.make_walker = [shared, w]() -> std::unique_ptr<CapitalWalker> {
    std::vector<std::unique_ptr<CapitalWalker>> walkers;
    walkers.reserve(shared->size());
    for (const auto& m : *shared) walkers.push_back(m.make_walker());
    return std::make_unique<MixtureWalker>(std::move(walkers), w);
  };
  return s;
}

/// Capital frozen at alpha from the first prefix where it reaches alpha.
inline Strategy cap_at(Strategy T, double alpha) {
  if (!(alpha > 1.0)) throw parameter_error("cap level must exceed 1");
  Strategy s{"cap", {{"alpha", format_double(alpha)}, {"of", T.label()}}, T.target, {}, {}, {}};
  auto inner = std::move(T.make_walker);
  s.make_walker = [inner, alpha]() -> std::unique_ptr<CapitalWalker> {
    return std::make_unique<CapWalker>(inner(), alpha);
  };
  return s;
}

/// T'(s) = (T(s) + 1/(|s|+1)) / 2, a strict supermartingale unbounded exactly
/// where T is.
inline Strategy strictify(Strategy T) {
  Strategy s{"strict", {{"of", T.label()}}, T.target, {}, {}, {}};
  auto inner = std::move(T.make_walker);
  s.make_walker = [inner]() -> std::unique_ptr<CapitalWalker> { return std::make_unique<StrictWalker>(inner()); };
  return s;
}

}  // namespace imprand
