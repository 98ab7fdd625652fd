#pragma once

// Selection rules, selected relative frequencies and averages, and the
// finite-horizon stochasticity verdicts built on them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imprand/forecasting_system.hpp"
#include "imprand/local_models.hpp"
#include "imprand/situation.hpp"

namespace imprand {

enum class SelectionKind { constant, parity_even, parity_odd, bit_echo_one, bit_echo_zero, table, custom };

/// Situation -> {0,1}: whether the outcome following s is selected.
class SelectionProcess {
 public:
  SelectionProcess(SelectionKind kind, std::string name, std::function<bool(BitsView)> eval)
      : kind_(kind), name_(std::move(name)), eval_(std::make_shared<const std::function<bool(BitsView)>>(std::move(eval))) {}

  bool operator()(BitsView s) const { return (*eval_)(s); }
  SelectionKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  static SelectionProcess constant(bool on) {
    return {SelectionKind::constant, on ? "all" : "none", [on](BitsView) { return on; }};
  }
  // Situations of even depth, so the outcomes at odd positions 1, 3, 5, ...
  static SelectionProcess parity_even() {
    return {SelectionKind::parity_even, "parity-even", [](BitsView s) { return s.size() % 2 == 0; }};
  }
  static SelectionProcess parity_odd() {
    return {SelectionKind::parity_odd, "parity-odd", [](BitsView s) { return s.size() % 2 == 1; }};
  }
  // Select the next outcome iff the last published outcome equals `bit`.
  static SelectionProcess bit_echo(Bit bit) {
    return {bit ? SelectionKind::bit_echo_one : SelectionKind::bit_echo_zero, bit ? "bit-echo-1" : "bit-echo-0",
            [bit](BitsView s) { return !s.empty() && s.back() == bit; }};
  }
  // Listed situations are selected, all others are not.
  static SelectionProcess table(std::vector<std::string> selected) {
    auto set = std::make_shared<std::vector<std::string>>(std::move(selected));
    std::sort(set->begin(), set->end());
    return {SelectionKind::table, "table",
            [set](BitsView s) { return std::binary_search(set->begin(), set->end(), BitString::to_string(s)); }};
  }

  static SelectionProcess by_name(const std::string& name) {
    if (name == "all") return constant(true);
    if (name == "none") return constant(false);
    if (name == "parity-even") return parity_even();
    if (name == "parity-odd") return parity_odd();
    if (name == "bit-echo-1") return bit_echo(1);
    if (name == "bit-echo-0") return bit_echo(0);
    throw parameter_error("unknown selection '" + name + "'");
  }

 private:
  SelectionKind kind_;
  std::string name_;
  std::shared_ptr<const std::function<bool(BitsView)>> eval_;
};

/// Time index n >= 1 -> {0,1}, independent of the outcomes.
class SelectionFunction {
 public:
  SelectionFunction(std::string name, std::function<bool(std::size_t)> eval)
      : name_(std::move(name)), eval_(std::make_shared<const std::function<bool(std::size_t)>>(std::move(eval))) {}

  bool operator()(std::size_t n) const { return (*eval_)(n); }
  const std::string& name() const noexcept { return name_; }

  static SelectionFunction constant(bool on) {
    return {on ? "all" : "none", [on](std::size_t) { return on; }};
  }
  static SelectionFunction odd_indices() {
    return {"odd-indices", [](std::size_t n) { return n % 2 == 1; }};
  }
  static SelectionFunction even_indices() {
    return {"even-indices", [](std::size_t n) { return n % 2 == 0; }};
  }
  // sigma(n) = pattern[(n - 1) mod |pattern|]; for a periodic path with this
  // pattern, selects exactly the indices where the path shows a one.
  static SelectionFunction periodic(BitString pattern) {
    if (pattern.empty()) throw parameter_error("periodic selection needs a non-empty pattern");
    std::string name = "periodic(" + pattern.str() + ")";
    return {name, [pattern = std::move(pattern)](std::size_t n) { return pattern[(n - 1) % pattern.size()] == 1; }};
  }

 private:
  std::string name_;
  std::shared_ptr<const std::function<bool(std::size_t)>> eval_;
};

struct SelectedFrequency {
  std::size_t count = 0;
  std::size_t ones = 0;
  std::optional<double> freq;  // undefined when nothing was selected
};

inline SelectedFrequency selected_frequency(const SelectionProcess& sel, BitsView path) {
  SelectedFrequency r;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (sel(path.first(k))) {
      ++r.count;
      r.ones += path[k];
    }
  }
  if (r.count > 0) r.freq = static_cast<double>(r.ones) / static_cast<double>(r.count);
  return r;
}

inline SelectedFrequency selected_frequency(const SelectionFunction& sel, BitsView path) {
  SelectedFrequency r;
  for (std::size_t n = 1; n <= path.size(); ++n) {
    if (sel(n)) {
      ++r.count;
      r.ones += path[n - 1];
    }
  }
  if (r.count > 0) r.freq = static_cast<double>(r.ones) / static_cast<double>(r.count);
  return r;
}

/// Average over selected steps k of h(w_{k+1}) - lower_ex(phi(w^k), h); zero
/// when nothing is selected.
template <Scalar S>
S selected_average(const basic_forecasting_system<S>& phi, const basic_gamble<S>& h, const SelectionProcess& sel,
                   BitsView path) {
  S sum(0);
  std::size_t count = 0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    auto s = path.first(k);
    if (!sel(s)) continue;
    sum += h(path[k]) - lower_ex(phi(s), h);
    ++count;
  }
  if (count == 0) return S(0);
  return sum / S(static_cast<long long>(count));
}

enum class ChurchStatus { consistent, violation, skipped };

inline std::string to_string(ChurchStatus s) {
  switch (s) {
    case ChurchStatus::consistent: return "CONSISTENT";
    case ChurchStatus::violation: return "VIOLATION";
    case ChurchStatus::skipped: return "SKIPPED";
  }
  return "?";
}

struct ChurchVerdict {
  std::string selection;
  ChurchStatus status = ChurchStatus::skipped;
  std::size_t count = 0;       // selected points overall
  std::size_t tail_count = 0;  // selected points in the tail window
  double tail_min = 0.0;       // min / max of the running selected frequency over the tail
  double tail_max = 0.0;
  double slack_lower = 0.0;
  double slack_upper = 0.0;
};

struct ChurchOptions {
  double tail_window = 0.5;
  std::size_t min_tail_points = 20;
  double slack_sigmas = 3.0;
};

namespace detail {

// Running frequencies after each selected point.
template <class Selected>
std::vector<double> running_selected_frequencies(std::size_t n, Selected selected_at, BitsView path) {
  std::vector<double> running;
  std::size_t count = 0, ones = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!selected_at(k)) continue;
    ++count;
    ones += path[k];
    running.push_back(static_cast<double>(ones) / static_cast<double>(count));
  }
  return running;
}

inline ChurchVerdict judge(std::string name, const std::vector<double>& running, const Interval& I,
                           const ChurchOptions& opt) {
  ChurchVerdict v;
  v.selection = std::move(name);
  v.count = running.size();
  if (running.empty()) return v;
  std::size_t tail = static_cast<std::size_t>(std::ceil(opt.tail_window * static_cast<double>(running.size())));
  tail = std::min(tail, running.size());
  v.tail_count = tail;
  auto first = running.end() - static_cast<std::ptrdiff_t>(tail);
  v.tail_min = *std::min_element(first, running.end());
  v.tail_max = *std::max_element(first, running.end());
  double n = static_cast<double>(running.size());
  v.slack_lower = opt.slack_sigmas * std::sqrt(I.lower() * (1.0 - I.lower()) / n);
  v.slack_upper = opt.slack_sigmas * std::sqrt(I.upper() * (1.0 - I.upper()) / n);
  if (tail < opt.min_tail_points) return v;
  bool ok = v.tail_min >= I.lower() - v.slack_lower && v.tail_max <= I.upper() + v.slack_upper;
  v.status = ok ? ChurchStatus::consistent : ChurchStatus::violation;
  return v;
}

}  // namespace detail

/// Finite-horizon check that the selected relative frequencies stay inside I.
/// The liminf / limsup are proxied by the min / max of the running selected
/// frequency over the final tail_window fraction of selected points.
inline std::vector<ChurchVerdict> church_verdict(const Interval& I, BitsView path,
                                                 const std::vector<SelectionProcess>& selections,
                                                 ChurchOptions opt = {}) {
  if (!(opt.tail_window > 0.0 && opt.tail_window <= 1.0)) throw parameter_error("tail_window must lie in (0,1]");
  std::vector<ChurchVerdict> out;
  for (const auto& sel : selections) {
    auto running = detail::running_selected_frequencies(
        path.size(), [&](std::size_t k) { return sel(path.first(k)); }, path);
    out.push_back(detail::judge(sel.name(), running, I, opt));
  }
  return out;
}

inline std::vector<ChurchVerdict> church_verdict(const Interval& I, BitsView path,
                                                 const std::vector<SelectionFunction>& selections,
                                                 ChurchOptions opt = {}) {
  if (!(opt.tail_window > 0.0 && opt.tail_window <= 1.0)) throw parameter_error("tail_window must lie in (0,1]");
  std::vector<ChurchVerdict> out;
  for (const auto& sel : selections) {
    auto running =
        detail::running_selected_frequencies(path.size(), [&](std::size_t k) { return sel(k + 1); }, path);
    out.push_back(detail::judge(sel.name(), running, I, opt));
  }
  return out;
}

}  // namespace imprand
