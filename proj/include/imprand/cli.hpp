#pragma once

// Command implementations behind the imprand executable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "imprand/audit.hpp"
#include "imprand/horizon.hpp"
#include "imprand/lawfulness.hpp"
#include "imprand/manifest.hpp"
#include "imprand/path_sim.hpp"
#include "imprand/report_json.hpp"
#include "imprand/strategy.hpp"

namespace imprand::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_refuted = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool fail_on_refute = false;
  std::optional<AuditMode> mode;
  std::optional<int> grid;
};

struct Context {
  manifest::Manifest manifest;
  Overrides overrides;
  std::filesystem::path base_dir = ".";  // relative input files resolve here
  std::ostream* out = nullptr;
};

/// --out, then the OUTPUT_DIR environment variable, then the working
/// directory.
inline std::filesystem::path output_dir(const Overrides& o) {
  if (o.out) return *o.out;
  if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) return env;
  return ".";
}

namespace detail {

inline void write_file(const std::filesystem::path& file, const std::string& content) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream f(file, std::ios::binary);
  if (!f) throw resource_error("cannot write '" + file.string() + "'");
  f << content;
  if (!f) throw resource_error("failed writing '" + file.string() + "'");
}

inline const SystemSpec& need_system(const Context& c) {
  if (!c.manifest.system) throw parameter_error("this command needs a [system] section");
  return *c.manifest.system;
}

inline const manifest::PathSpec& need_path(const Context& c) {
  if (!c.manifest.path) throw parameter_error("this command needs a [path] section");
  return *c.manifest.path;
}

inline bool use_exact(const SystemSpec& s) { return s.exact && s.kind != SystemKind::near_half; }

struct LoadedPath {
  PathPrefix bits;
  PathMeta meta;
};

inline LoadedPath simulate(const Context& c) {
  const auto& spec = need_system(c);
  const auto& p = need_path(c);
  const std::uint64_t seed = c.overrides.seed.value_or(p.seed);
  PathPrefix bits = use_exact(spec) ? sample_path(build_system<Rational>(spec), p.policy, p.length, seed)
                                    : sample_path(build_system<double>(spec), p.policy, p.length, seed);
  LoadedPath lp{bits, PathMeta::of(bits, "simulate")};
  lp.meta.seed = seed;
  lp.meta.system = build_system<double>(spec).descriptor();
  return lp;
}

inline LoadedPath load_path(const Context& c) {
  const auto& p = need_path(c);
  if (p.source == "simulate") return simulate(c);
  if (p.source == "inline") {
    PathPrefix bits = ingest_ascii01(p.bits);
    return {bits, PathMeta::of(bits, "inline")};
  }
  if (p.file.empty()) throw parameter_error("[path] source = file needs 'file'");
  std::filesystem::path file = p.file;
  if (file.is_relative()) file = c.base_dir / file;
  PathPrefix bits = ingest_file(file.string(), p.format, p.packed_length);
  return {bits, PathMeta::of(bits, "file:" + p.file)};
}

inline std::vector<Strategy> build_battery(const Context& c, const ForecastingSystem& phi) {
  manifest::BatterySpec spec = c.manifest.battery.value_or(manifest::BatterySpec{});
  std::vector<Strategy> battery;
  if (spec.preset == "default") battery = default_battery(phi, spec.options);
  for (const auto& name : spec.extra) {
    if (name == "doubling-on-ones") {
      battery.push_back(doubling_on_ones(phi));
    } else if (name == "rival-exploit") {
      const auto& sys = need_system(c);
      if (sys.kind != SystemKind::explain_away || !sys.interval)
        throw parameter_error("rival-exploit strategies need an explain-away system");
      std::vector<ForecastingSystem> rivals;
      for (const auto& r : sys.rivals) rivals.push_back(systems::stationary(to_binary64(r)));
      auto ea = explain_away(to_binary64(*sys.interval), std::move(rivals));
      for (std::size_t m = 0; m < ea.rivals.size(); ++m) {
        Strategy s = rival_exploit_multipliers(m, ea).second;
        s.target = phi;
        battery.push_back(std::move(s));
      }
    }
  }
  if (spec.mix && !battery.empty()) {
    Strategy mixed = mixture(std::move(battery));
    battery = {spec.cap ? cap_at(std::move(mixed), *spec.cap) : std::move(mixed)};
  } else if (spec.cap) {
    for (auto& s : battery) s = cap_at(std::move(s), *spec.cap);
  }
  return battery;
}

}  // namespace detail

inline int simulate_command(const Context& c) {
  auto lp = detail::simulate(c);
  const auto& p = detail::need_path(c);
  auto file = output_dir(c.overrides) / p.output;
  detail::write_file(file, p.format == BitFormat::ascii01 ? to_ascii01(lp.bits) : to_packed(lp.bits));
  *c.out << "wrote " << lp.bits.size() << " bits (" << lp.meta.ones << " ones, seed " << *lp.meta.seed << ") to "
         << file.string() << "\n";
  return exit_ok;
}

inline int audit_command(const Context& c) {
  const auto& spec = detail::need_system(c);
  auto phi = build_system<double>(spec);
  auto lp = detail::load_path(c);
  auto battery = detail::build_battery(c, phi);
  manifest::AuditSpec as = c.manifest.audit.value_or(manifest::AuditSpec{});
  AuditOptions opt;
  opt.mode = c.overrides.mode.value_or(as.mode);
  opt.threshold = as.threshold;
  opt.crossing.tail_window = as.tail_window;
  opt.church.tail_window = as.tail_window;
  opt.church.slack_sigmas = as.slack_sigmas;
  opt.church.min_tail_points = as.min_tail_points;
  std::vector<GrowthFunction> growth;
  for (const auto& g : as.growth) growth.push_back(g.build());
  auto rep = audit(lp.bits, phi, battery, growth, opt);
  const auto dir = output_dir(c.overrides);
  detail::write_file(dir / as.report, audit_json(rep, lp.meta).dump(2) + "\n");
  detail::write_file(dir / as.trajectories, trajectories_csv(rep, lp.bits));
  *c.out << to_string(rep.verdict);
  if (!rep.witnesses.empty()) *c.out << " (witness: " << rep.witnesses.front() << ")";
  *c.out << "\n";
  if (rep.verdict == Verdict::refuted && c.overrides.fail_on_refute) return exit_refuted;
  return exit_ok;
}

inline int scan_command(const Context& c) {
  auto lp = detail::load_path(c);
  manifest::ScanSpec ss = c.manifest.scan.value_or(manifest::ScanSpec{});
  ScanOptions opt;
  opt.audit.mode = c.overrides.mode.value_or(ss.mode.value_or(AuditMode::bounded));
  opt.audit.threshold = ss.threshold;
  opt.audit.crossing.tail_window = ss.tail_window;
  if (c.manifest.battery) opt.battery = c.manifest.battery->options;
  const int grid = c.overrides.grid.value_or(ss.grid);
  auto f = filter_scan(lp.bits, grid, opt);
  detail::write_file(output_dir(c.overrides) / ss.report, scan_json(f, lp.meta).dump(2) + "\n");
  if (f.hull)
    *c.out << "surviving hull [" << format_double(f.hull->first) << "," << format_double(f.hull->second) << "]\n";
  else
    *c.out << "no surviving interval\n";
  return exit_ok;
}

inline int expect_command(const Context& c) {
  const auto& spec = detail::need_system(c);
  if (!c.manifest.expect) throw parameter_error("expect needs an [expect] section");
  const auto& x = *c.manifest.expect;
  auto compute = [&]<Scalar S>(const basic_forecasting_system<S>& phi) {
    HorizonGamble<S> g = [&] {
      if (x.gamble == "ones-count") return HorizonGamble<S>::ones_count(x.horizon);
      if (x.gamble == "indicator") return HorizonGamble<S>::indicator(x.horizon, x.cylinders);
      std::vector<S> table;
      for (const auto& v : x.payoffs) table.push_back(scalar_from<S>(v));
      return HorizonGamble<S>(x.horizon, std::move(table));
    }();
    *c.out << "upper " << format_scalar(upper_expectation_fh(phi, g)) << "\n";
    *c.out << "lower " << format_scalar(lower_expectation_fh(phi, g)) << "\n";
  };
  if (detail::use_exact(spec) && x.payoffs_exact)
    compute(build_system<Rational>(spec));
  else
    compute(build_system<double>(spec));
  return exit_ok;
}

inline int lawful_command(const Context& c) {
  auto lp = detail::load_path(c);
  manifest::LawfulSpec ls = c.manifest.lawful.value_or(manifest::LawfulSpec{});
  auto rep = check_lawful_for(lp.bits, LawAlgorithm(ls.n, ls.r), ls.m_max);
  detail::write_file(output_dir(c.overrides) / ls.report, lawful_json(rep, lp.meta).dump(2) + "\n");
  if (rep.passed())
    *c.out << "lawful for " << rep.algorithm << " at every m <= " << rep.m_max << "\n";
  else
    *c.out << "condition " << to_string(rep.failure->condition) << " fails at m = " << rep.failure->m << "\n";
  return exit_ok;
}

/// Dispatches a command; errors propagate as exceptions.
inline int run(const std::string& command, const Context& c) {
  if (command == "simulate") return simulate_command(c);
  if (command == "audit") return audit_command(c);
  if (command == "scan") return scan_command(c);
  if (command == "expect") return expect_command(c);
  if (command == "lawful") return lawful_command(c);
  throw parameter_error("unknown command '" + command + "'");
}

}  // namespace imprand::cli
