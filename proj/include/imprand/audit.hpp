#pragma once

// Randomness audits of a path against a forecasting system, and the
// empirical filter of stationary interval forecasts.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "imprand/capital.hpp"
#include "imprand/errors.hpp"
#include "imprand/forecasting_system.hpp"
#include "imprand/growth.hpp"
#include "imprand/selection.hpp"
#include "imprand/strategy.hpp"

namespace imprand {

enum class AuditMode { bounded, schnorr };

inline std::string to_string(AuditMode m) { return m == AuditMode::bounded ? "bounded" : "schnorr"; }

inline AuditMode audit_mode_from(std::string_view s) {
  if (s == "bounded") return AuditMode::bounded;
  if (s == "schnorr") return AuditMode::schnorr;
  throw parameter_error("unknown audit mode '" + std::string(s) + "'");
}

enum class Verdict { refuted, not_refuted };

inline std::string to_string(Verdict v) { return v == Verdict::refuted ? "REFUTED" : "NOT-REFUTED"; }

inline constexpr const char* default_battery_version = "default-v1";

struct BatteryOptions {
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  std::vector<std::string> selections{"all", "parity-even", "parity-odd", "bit-echo-0", "bit-echo-1"};
  std::vector<double> references{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<std::string> schedules{"all", "parity-even", "parity-odd"};
  bool calibration = true;
  bool divergence = true;
};

/// Calibration strategies for h = (1,0) and (-1,0) over the selection and
/// epsilon grids (B = 1), followed by target-side divergence strategies
/// against precise stationary references. Divergence steps where the
/// reference lies inside phi(s) are skipped.
inline std::vector<Strategy> default_battery(const ForecastingSystem& phi, const BatteryOptions& opt = {}) {
  std::vector<Strategy> out;
  if (opt.calibration) {
    for (const Gamble& h : {Gamble{1.0, 0.0}, Gamble{-1.0, 0.0}})
      for (const auto& sel : opt.selections)
        for (double eps : opt.epsilons)
          out.push_back(calibration_supermartingale(phi, h, SelectionProcess::by_name(sel), eps, 1.0));
  }
  if (opt.divergence) {
    for (double rho : opt.references)
      for (const auto& sched : opt.schedules)
        out.push_back(
            divergence_pair(phi, systems::stationary(Interval::precise(rho)), SelectionProcess::by_name(sched), true)
                .first);
  }
  return out;
}

inline std::vector<SelectionProcess> default_church_selections() {
  std::vector<SelectionProcess> out;
  for (const char* name : {"all", "parity-even", "parity-odd", "bit-echo-0", "bit-echo-1"})
    out.push_back(SelectionProcess::by_name(name));
  return out;
}

struct AuditOptions {
  AuditMode mode = AuditMode::bounded;
  double threshold = 100.0;
  CrossingOptions crossing{};
  ChurchOptions church{};
  bool verify = true;
  // Stop a run once it refutes, and skip the remaining strategies.
  bool stop_at_first_refutation = false;
  bool keep_trajectories = true;
  bool church_verdicts = true;
  std::string battery_version = default_battery_version;
};

struct StrategyResult {
  std::string label;
  std::string name;
  StrategyParams params;
  std::size_t steps = 0;
  double final_log_capital = 0.0;
  double max_log_capital = 0.0;
  std::vector<CrossingReport> crossings;
  bool refuted = false;
  CapitalTrajectory trajectory;
};

struct AuditReport {
  AuditMode mode = AuditMode::bounded;
  double threshold = 100.0;
  std::string battery_version;
  std::string system;
  std::size_t path_length = 0;
  std::vector<StrategyResult> results;
  Verdict verdict = Verdict::not_refuted;
  std::vector<std::string> witnesses;
  std::vector<ChurchVerdict> church;
};

/// Runs every strategy along the path. Bounded mode refutes when some
/// capital reaches the threshold; Schnorr mode when some capital stays at or
/// above its growth function over the whole tail window. NOT-REFUTED only
/// records the absence of a refutation.
inline AuditReport audit(BitsView path, const ForecastingSystem& phi, const std::vector<Strategy>& battery,
                         const std::vector<GrowthFunction>& growth = {}, const AuditOptions& opt = {}) {
  if (!(opt.threshold > 1.0)) throw parameter_error("refutation threshold must exceed 1");
  for (const auto& s : battery)
    if (s.target.descriptor() != phi.descriptor())
      throw parameter_error("strategy " + s.label() + " targets " + s.target.descriptor() + ", not " +
                            phi.descriptor());
  AuditReport rep;
  rep.mode = opt.mode;
  rep.threshold = opt.threshold;
  rep.battery_version = opt.battery_version;
  rep.system = phi.descriptor();
  rep.path_length = path.size();
  const double log_threshold = std::log(opt.threshold);

  for (const auto& s : battery) {
    RunOptions ro;
    ro.verify = opt.verify;
    if (opt.stop_at_first_refutation && opt.mode == AuditMode::bounded) ro.stop_at_log = log_threshold;
    StrategyRun run = run_strategy(s, path, ro);
    if (!run.verification.passed()) {
      const auto& v = run.verification.violations.front();
      throw contract_violation("strategy " + s.label() + " is not a supermartingale for " + phi.descriptor() +
                               " at situation " + v.situation + " (upper expectation exceeds 1 by " +
                               format_double(v.excess) + ")");
    }
    StrategyResult r;
    r.label = s.label();
    r.name = s.name;
    r.params = s.params;
    r.steps = run.trajectory.steps();
    r.final_log_capital = run.trajectory.final_log();
    r.max_log_capital = run.trajectory.max_log();
    BitsView walked = path.first(r.steps);
    for (const auto& g : growth) r.crossings.push_back(exceeds_growth(run.trajectory, g, walked, opt.crossing));
    if (opt.mode == AuditMode::bounded) {
      r.refuted = r.max_log_capital >= log_threshold;
    } else {
      auto persistent = [](const CrossingReport& c, const std::vector<double>& lt) {
        return c.every_tail_step && lt.back() > 0.0;
      };
      if (s.paired_growth) {
        auto lt = s.paired_growth->log_values(walked);
        auto c = exceeds_growth(run.trajectory, lt, s.paired_growth->name(), opt.crossing);
        r.refuted = persistent(c, lt);
        r.crossings.push_back(std::move(c));
      } else {
        for (std::size_t i = 0; i < growth.size(); ++i)
          if (persistent(r.crossings[i], growth[i].log_values(walked))) r.refuted = true;
      }
    }
    if (opt.keep_trajectories) r.trajectory = std::move(run.trajectory);
    if (r.refuted) rep.witnesses.push_back(r.label);
    rep.results.push_back(std::move(r));
    if (opt.stop_at_first_refutation && !rep.witnesses.empty()) break;
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::not_refuted : Verdict::refuted;
  if (auto I = phi.stationary_interval(); I && opt.church_verdicts) rep.church = church_verdict(*I, path, default_church_selections(), opt.church);
  return rep;
}

// ---------------------------------------------------------------------------
// Empirical filter

struct FilterCell {
  int lo_index = 0, hi_index = 0;
  double lo = 0.0, hi = 1.0;
  Verdict verdict = Verdict::not_refuted;
  std::string witness;
  bool inherited = false;  // refuted because a grid superset was refuted
};

struct IntersectionAnomaly {
  std::size_t first, second, intersection;  // cell indices
};

struct EmpiricalFilter {
  int grid = 20;
  AuditMode mode = AuditMode::bounded;
  std::string battery_version;
  std::vector<FilterCell> cells;  // sorted by (lo, hi)
  double freq_liminf = 0.0, freq_limsup = 1.0;  // tail-window proxies
  std::optional<std::pair<double, double>> hull;  // intersection of surviving cells
  std::vector<IntersectionAnomaly> anomalies;

  const FilterCell* find(int lo_index, int hi_index) const {
    for (const auto& c : cells)
      if (c.lo_index == lo_index && c.hi_index == hi_index) return &c;
    return nullptr;
  }
  const FilterCell* find(double lo, double hi) const {
    return find(static_cast<int>(std::lround(lo * grid)), static_cast<int>(std::lround(hi * grid)));
  }
};

struct ScanOptions {
  AuditOptions audit{};
  BatteryOptions battery{};
};

inline bool is_supported_grid(int g) { return g == 10 || g == 20 || g == 40 || g == 100; }

/// Min and max of the running relative frequency of ones over the final
/// tail_window fraction of the path.
inline std::pair<double, double> frequency_hull(BitsView path, double tail_window) {
  if (path.empty()) return {0.0, 1.0};
  std::size_t ones = 0;
  const std::size_t n = path.size();
  const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_window * double(n))));
  double lo = 1.0, hi = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ones += path[k];
    if (k + tail >= n) {
      double f = static_cast<double>(ones) / static_cast<double>(k + 1);
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  return {lo, hi};
}

/// Audits the stationary system of every grid interval [i/g, j/g]. Cells
/// that miss the frequency hull are refuted outright; refutations pass down
/// to grid subsets, so the surviving family is increasing by construction.
inline EmpiricalFilter filter_scan(BitsView path, int grid, const ScanOptions& opt = {}) {
  if (!is_supported_grid(grid)) throw parameter_error("grid must be one of 10, 20, 40, 100");
  EmpiricalFilter f;
  f.grid = grid;
  f.mode = opt.audit.mode;
  f.battery_version = opt.audit.battery_version;
  std::tie(f.freq_liminf, f.freq_limsup) = frequency_hull(path, opt.audit.crossing.tail_window);

  for (int i = 0; i <= grid; ++i)
    for (int j = i; j <= grid; ++j)
      f.cells.push_back({i, j, double(i) / grid, double(j) / grid, Verdict::not_refuted, "", false});

  // Widest first, so every refuted superset is settled before its subsets.
  std::vector<std::size_t> order(f.cells.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return f.cells[a].hi_index - f.cells[a].lo_index > f.cells[b].hi_index - f.cells[b].lo_index;
  });
  auto index_of = [grid](int i, int j) {
    // Cells are laid out row by row: row i holds j = i..grid.
    std::size_t before = 0;
    for (int r = 0; r < i; ++r) before += static_cast<std::size_t>(grid - r + 1);
    return before + static_cast<std::size_t>(j - i);
  };

  AuditOptions aopt = opt.audit;
  aopt.stop_at_first_refutation = true;
  aopt.keep_trajectories = false;
  aopt.church_verdicts = false;
  for (std::size_t idx : order) {
    FilterCell& c = f.cells[idx];
    if (c.verdict == Verdict::refuted) continue;
    if (c.lo > f.freq_liminf || c.hi < f.freq_limsup) {
      c.verdict = Verdict::refuted;
      c.witness = "frequency-hull";
    } else {
      auto phi = systems::stationary(Interval(c.lo, c.hi));
      auto rep = audit(path, phi, default_battery(phi, opt.battery), {}, aopt);
      if (rep.verdict == Verdict::refuted) {
        c.verdict = Verdict::refuted;
        c.witness = rep.witnesses.front();
      }
    }
    if (c.verdict != Verdict::refuted) continue;
    const std::string inherited = c.witness + "@[" + format_double(c.lo) + "," + format_double(c.hi) + "]";
    for (int i = c.lo_index; i <= c.hi_index; ++i)
      for (int j = i; j <= c.hi_index; ++j) {
        FilterCell& sub = f.cells[index_of(i, j)];
        if (sub.verdict == Verdict::refuted) continue;
        sub.verdict = Verdict::refuted;
        sub.witness = inherited;
        sub.inherited = true;
      }
  }

  double L = -1.0, U = 2.0;
  std::vector<std::size_t> survivors;
  for (std::size_t k = 0; k < f.cells.size(); ++k) {
    if (f.cells[k].verdict == Verdict::refuted) continue;
    survivors.push_back(k);
    L = std::max(L, f.cells[k].lo);
    U = std::min(U, f.cells[k].hi);
  }
  if (!survivors.empty()) f.hull = std::make_pair(L, U);
  for (std::size_t a = 0; a < survivors.size(); ++a)
    for (std::size_t b = a + 1; b < survivors.size(); ++b) {
      const auto& x = f.cells[survivors[a]];
      const auto& y = f.cells[survivors[b]];
      int lo = std::max(x.lo_index, y.lo_index), hi = std::min(x.hi_index, y.hi_index);
      if (lo > hi) continue;
      std::size_t meet = index_of(lo, hi);
      if (f.cells[meet].verdict == Verdict::refuted) f.anomalies.push_back({survivors[a], survivors[b], meet});
    }
  return f;
}

struct FilterCheck {
  bool increasing = true;
  bool hull_contained = true;
  std::string detail;
};

/// Structural assertions on a scan: survivors are closed under grid
/// supersets and every survivor contains the frequency hull.
inline FilterCheck check_filter_structure(const EmpiricalFilter& f) {
  FilterCheck out;
  for (const auto& c : f.cells) {
    if (c.verdict == Verdict::refuted) continue;
    if (c.lo > f.freq_liminf || c.hi < f.freq_limsup) {
      out.hull_contained = false;
      out.detail = "survivor [" + format_double(c.lo) + "," + format_double(c.hi) + "] misses the frequency hull";
    }
    for (const auto& d : f.cells) {
      if (d.lo_index <= c.lo_index && c.hi_index <= d.hi_index && d.verdict == Verdict::refuted) {
        out.increasing = false;
        out.detail = "survivor [" + format_double(c.lo) + "," + format_double(c.hi) + "] has refuted superset [" +
                     format_double(d.lo) + "," + format_double(d.hi) + "]";
      }
    }
  }
  return out;
}

}  // namespace imprand
