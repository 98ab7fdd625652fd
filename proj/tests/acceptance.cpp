// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "imprand/imprand.hpp"
#include "random_rationals.hpp"

using namespace imprand;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> body;
};

ForecastingSystem fair() { return systems::stationary(Interval::precise(0.5)); }

// Every scan produced here is also checked for filter structure.
std::vector<std::pair<std::string, EmpiricalFilter>> scan_corpus;

// ---------------------------------------------------------------------------

Outcome product_bound() {
  const std::size_t n = 5000, len = 2 * n;
  auto pair = divergence_pair(fair(), systems::near_half(), SelectionProcess::constant(true));
  const double log_bound = std::log((2.0 * n + 32.0) / 32.0);

  std::vector<std::pair<std::string, PathPrefix>> paths;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    paths.emplace_back("seed " + std::to_string(seed), sample_path(fair(), RealityPolicy{}, len, seed));
  // Reality swings between the two systems' forecasts.
  auto hull = systems::custom<double>("half-near-half-hull", [](BitsView s) {
    double p = near_half_forecast(s.size());
    return Interval(std::min(0.5, p), std::max(0.5, p));
  });
  paths.emplace_back("oscillate-extremes",
                     sample_path(hull, RealityPolicy::of(PolicyKind::oscillate_extremes), len, 2026));

  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [name, path] : paths) {
    auto a = run_strategy(pair.first, path), b = run_strategy(pair.second, path);
    if (!a.verification.passed() || !b.verification.passed()) {
      o.pass = false;
      o.detail = "supermartingale check failed on " + name;
      return o;
    }
    const double slack = a.trajectory.final_log() + b.trajectory.final_log() - log_bound;
    worst = std::min(worst, slack);
    if (slack < -1e-9 * log_bound) {
      o.pass = false;
      o.detail = "bound missed on " + name;
    }
  }
  if (o.pass) o.detail = std::to_string(paths.size()) + " paths, min log slack " + format_double(worst);
  return o;
}

Outcome hellinger() {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  double worst_mean = 0.0, worst_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10000; ++k) {
    const double a = u(rng), b = u(rng);
    const Gamble f = hellinger_gamble(a, b), g = hellinger_gamble(b, a);
    worst_mean = std::max(worst_mean, std::abs(ex_precise(a, f) - 1.0));
    const double bound = hellinger_product_bound(a, b);
    worst_slack = std::min({worst_slack, f.at_one * g.at_one - bound, f.at_zero * g.at_zero - bound});
  }
  Outcome o;
  o.pass = worst_mean <= 1e-12 && worst_slack >= -1e-12;
  o.detail = "max |E-1| " + format_double(worst_mean) + ", min slack " + format_double(worst_slack);
  return o;
}

Outcome lemma() {
  oracle::RationalGen gen(5150);
  auto& rng = gen.engine();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t triggered = 0, failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Rational Bq(4 + static_cast<long long>(rng() % 13), 4);  // 1 .. 4 in quarters
    const Rational eq = Bq * Rational(1 + static_cast<long long>(rng() % 63), 64);
    const double B = to_double(Bq), eps = to_double(eq);
    Gamble h{0.0, 0.0};
    h.at_one = B * (2.0 * u(rng) - 1.0);
    h.at_zero = h.at_one + B * (2.0 * u(rng) - 1.0);
    if (h.variation() > B) h.at_zero = h.at_one;

    const std::uint64_t salt = rng();
    auto phi = systems::custom<double>("random", [salt](BitsView s) {
      SplitMix64 g(salt ^ (s.size() * 0x9E3779B97F4A7C15ULL) ^ (s.empty() ? 0 : s.back() + 7));
      double a = g.uniform(), b = g.uniform();
      return Interval(std::min(a, b), std::max(a, b));
    });
    const std::uint64_t sel_salt = rng();
    const double rate = 0.2 + 0.8 * u(rng);
    SelectionProcess sel(SelectionKind::custom, "random", [sel_salt, rate](BitsView s) {
      SplitMix64 g(sel_salt + 31 * s.size() + (s.empty() ? 0 : s.back()));
      return g.uniform() < rate;
    });
    auto st = calibration_supermartingale(phi, h, sel, eps, B);

    // Outcomes lean towards the bit with the smaller payoff.
    const Bit low = h.at_one < h.at_zero ? 1 : 0;
    const double lean = 0.5 + 0.45 * u(rng);
    const std::size_t n = 1 + rng() % 200;
    std::vector<Bit> path;
    for (std::size_t k = 0; k < n; ++k) path.push_back(u(rng) < lean ? low : static_cast<Bit>(1 - low));

    auto run = run_strategy(st, path);
    if (!run.verification.passed()) return {false, "calibration process failed its supermartingale check"};
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      BitsView s(path.data(), k);
      if (sel(s)) {
        sum += h(path[k]) - lower_ex(phi(s), h);
        ++count;
      }
      if (count == 0 || sum / static_cast<double>(count) > -eps) continue;
      ++triggered;
      const double bound = calibration_bound_log(eps, B, count);
      if (std::expm1(run.trajectory.log_at(k + 1) - bound) < -1e-9) ++failures;
    }
  }
  Outcome o;
  o.pass = failures == 0 && triggered > 0;
  o.detail = std::to_string(triggered) + " triggered prefixes, " + std::to_string(failures) + " violations";
  return o;
}

Outcome coherence() {
  oracle::RationalGen gen(77);
  std::size_t bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const ExactInterval I = gen.interval();
    const ExactGamble f = gen.gamble(), g = gen.gamble();
    const Rational lam = gen.nonneg(), mu = gen.any();
    auto L = [&](const ExactGamble& x) { return lower_ex(I, x); };
    auto U = [&](const ExactGamble& x) { return upper_ex(I, x); };
    const ExactGamble sum{f.at_one + g.at_one, f.at_zero + g.at_zero};
    const ExactGamble scaled{lam * f.at_one, lam * f.at_zero};
    const ExactGamble shifted{f.at_one + mu, f.at_zero + mu};
    const ExactGamble below{std::min(f.at_one, g.at_one), std::min(f.at_zero, g.at_zero)};
    bool ok = f.min() <= L(f) && L(f) <= U(f) && U(f) <= f.max();
    ok = ok && L(scaled) == lam * L(f) && U(scaled) == lam * U(f);
    ok = ok && L(sum) >= L(f) + L(g) && U(sum) <= U(f) + U(g);
    ok = ok && L(shifted) == L(f) + mu && U(shifted) == U(f) + mu;
    ok = ok && L(below) <= L(f) && U(below) <= U(f);
    if (!ok) ++bad;
  }

  using G = HorizonGamble<Rational>;
  auto random_gamble = [&](std::size_t n) {
    std::vector<Rational> v;
    for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) v.push_back(gen.any());
    return G(n, std::move(v));
  };
  std::size_t bad_global = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + k % 8;
    std::vector<ExactInterval> table;
    for (std::size_t i = 0; i < 2 * n + 2; ++i) table.push_back(gen.interval());
    auto phi = systems::custom<Rational>("random", [table](BitsView s) {
      return table[(2 * s.size() + (s.empty() ? 0 : s.back())) % table.size()];
    });
    const G f = random_gamble(n), g = random_gamble(n);
    const Rational lam = gen.nonneg(), mu = gen.any();
    auto L = [&](const G& x) { return lower_expectation_fh(phi, x); };
    auto U = [&](const G& x) { return upper_expectation_fh(phi, x); };
    const auto& pf = f.payoffs();
    std::vector<Rational> below;
    for (std::size_t i = 0; i < pf.size(); ++i) below.push_back(std::min(pf[i], g[i]));
    const Rational Lf = L(f), Uf = U(f), Lg = L(g), Ug = U(g), Ls = L(f + g), Us = U(f + g);
    bool ok = *std::min_element(pf.begin(), pf.end()) <= Lf && Lf <= Uf && Uf <= *std::max_element(pf.begin(), pf.end());
    ok = ok && L(lam * f) == lam * Lf && U(lam * f) == lam * Uf;
    ok = ok && Lf + Lg <= Ls && Ls <= Lf + Ug && Lf + Ug <= Us && Us <= Uf + Ug;
    ok = ok && L(f + mu) == Lf + mu && U(f + mu) == Uf + mu;
    ok = ok && L(G(n, below)) <= Lf && U(G(n, below)) <= Uf;
    if (!ok) ++bad_global;
  }

  std::size_t bad_oracle = 0;
  for (int k = 0; k < 60; ++k) {
    const std::size_t n = 1 + k % 10;
    std::vector<Rational> p;
    for (std::size_t d = 0; d < n; ++d) p.push_back(gen.unit());
    auto phi = systems::custom<Rational>("depthwise", [p](BitsView s) { return ExactInterval::precise(p[s.size()]); });
    const G g = random_gamble(n);
    Rational expect(0);
    std::vector<Bit> buf(n);
    for (std::uint64_t i = 0; i < g.payoffs().size(); ++i) {
      G::decode(i, buf);
      Rational w(1);
      for (std::size_t d = 0; d < n; ++d) w *= buf[d] ? p[d] : 1 - p[d];
      expect += w * g[i];
    }
    if (upper_expectation_fh(phi, g) != expect || lower_expectation_fh(phi, g) != expect) ++bad_oracle;
  }
  Outcome o;
  o.pass = bad == 0 && bad_global == 0 && bad_oracle == 0;
  o.detail = "local " + std::to_string(bad) + "/1000, global " + std::to_string(bad_global) + "/1000, oracle " +
             std::to_string(bad_oracle) + "/60 failures";
  return o;
}

Outcome ville() {
  std::ifstream in(IMPRAND_SEEDS_FILE);
  if (!in) return {false, std::string("cannot read ") + IMPRAND_SEEDS_FILE};
  std::vector<std::uint64_t> seeds;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') seeds.push_back(std::stoull(line));
  if (seeds.size() != 1000) return {false, "expected 1000 seeds, found " + std::to_string(seeds.size())};

  const double alpha = 50.0;
  const Strategy capped = cap_at(mixture(default_battery(fair())), alpha);
  RunOptions ro;
  ro.stop_at_log = std::log(alpha) - 1e-12;
  std::size_t hits = 0;
  for (std::uint64_t seed : seeds) {
    auto path = sample_path(fair(), RealityPolicy{}, 10000, seed);
    auto run = run_strategy(capped, path, ro);
    if (!run.verification.passed()) return {false, "capped mixture failed its supermartingale check"};
    if (run.trajectory.max_log() >= std::log(alpha) - 1e-12) ++hits;
  }
  const double fraction = static_cast<double>(hits) / 1000.0;
  const double limit = 1.0 / 50.0 + 3.0 * std::sqrt(0.02 * 0.98 / 1000.0);
  Outcome o;
  o.pass = fraction <= limit;
  o.detail = std::to_string(hits) + "/1000 paths reached 50 (fraction " + format_double(fraction) + ", limit " +
             format_double(limit) + ")";
  return o;
}

Outcome alternating() {
  auto phi = systems::alternating(0.3, 0.7);
  auto path = sample_path(phi, RealityPolicy{}, 100000, 20261016);
  const double all = *selected_frequency(SelectionProcess::constant(true), path).freq;
  const double odd = *selected_frequency(SelectionProcess::parity_odd(), path).freq;
  const double even = *selected_frequency(SelectionProcess::parity_even(), path).freq;
  Outcome o;
  std::ostringstream msg;
  msg << "freq " << format_double(all) << ", odd " << format_double(odd) << ", even " << format_double(even);
  if (std::abs(all - 0.5) > 0.01 || std::abs(odd - 0.3) > 0.015 || std::abs(even - 0.7) > 0.015) o.pass = false;

  auto f = filter_scan(path, 20);
  scan_corpus.emplace_back("alternating", f);
  const FilterCell* target = f.find(0.3, 0.7);
  if (!target || target->verdict != Verdict::not_refuted) {
    o.pass = false;
    msg << "; [0.3,0.7] refuted by " << (target ? target->witness : "?");
  }
  std::size_t expected_refuted = 0;
  for (const auto& c : f.cells) {
    if (!(c.lo_index >= 7 || c.hi_index <= 13)) continue;
    ++expected_refuted;
    if (c.verdict != Verdict::refuted) {
      o.pass = false;
      msg << "; [" << format_double(c.lo) << "," << format_double(c.hi) << "] survived";
    }
  }
  const FilterCell* narrow = f.find(0.35, 0.7);
  msg << "; " << expected_refuted << " cells refuted as required; [0.35,0.7] witness " << (narrow ? narrow->witness : "?");
  if (f.hull) msg << "; hull [" << format_double(f.hull->first) << "," << format_double(f.hull->second) << "]";
  o.detail = msg.str();
  return o;
}

Outcome explain_away_run() {
  const Interval I(0.2, 0.8);
  auto rival = systems::stationary(Interval(0.45, 0.55));
  auto ea = explain_away(I, {rival});
  auto path = sample_path(ea.system, RealityPolicy{}, std::size_t{1} << 14, 909);
  auto pair = rival_exploit_multipliers(0, ea);
  auto m = run_strategy(pair.first, path), companion = run_strategy(pair.second, path);
  if (!m.verification.passed() || !companion.verification.passed())
    return {false, "rival-exploit process failed its supermartingale check"};

  const double log_B = companion.trajectory.max_log();
  const double log_delta = std::log(to_double(rival_delta(ea.rivals[0].epsilon)));
  std::size_t xi = 0, misses = 0;
  for (std::size_t n = 0; n <= path.size(); ++n) {
    if (n > 0 && lambda_trailing_zeros(n - 1) == 0) ++xi;
    const double bound = -log_B + static_cast<double>(xi) * log_delta;
    if (m.trajectory.log_at(n) < bound - 1e-9 * std::max(1.0, std::abs(bound))) ++misses;
  }

  auto battery = default_battery(rival);
  battery.push_back(pair.first);
  auto rival_report = audit(path, rival, battery);
  auto wide = systems::stationary(I);
  auto wide_report = audit(path, wide, default_battery(wide));

  Outcome o;
  o.pass = misses == 0 && rival_report.verdict == Verdict::refuted && wide_report.verdict == Verdict::not_refuted;
  std::ostringstream msg;
  msg << "eps " << format_scalar(ea.rivals[0].epsilon) << ", ln B " << format_double(log_B) << ", final ln M "
      << format_double(m.trajectory.final_log()) << " vs bound " << format_double(-log_B + xi * log_delta) << ", "
      << misses << " misses; rival " << to_string(rival_report.verdict) << ", [0.2,0.8] "
      << to_string(wide_report.verdict);
  o.detail = msg.str();
  return o;
}

Outcome lawfulness() {
  LawAlgorithm alg(2, 2);
  auto zeros = check_lawful_for(BitString::repeat("0", 4000), alg, 1000);
  auto ones = check_lawful_for(BitString::repeat("1", 4000), alg, 1000);
  Outcome o;
  o.pass = zeros.passed() && zeros.checked == 1001 && !ones.passed() && ones.failure->m == 0 &&
           ones.failure->condition == LawCondition::consistent;
  o.detail = "zeros: " + std::to_string(zeros.checked) + " values of m checked, " +
             (zeros.passed() ? "all pass" : "failure") + "; ones: " +
             (ones.failure ? to_string(ones.failure->condition) + " fails at m = " + std::to_string(ones.failure->m)
                           : "no failure");
  return o;
}

Outcome filter_structure() {
  scan_corpus.emplace_back("fair coin", filter_scan(sample_path(fair(), RealityPolicy{}, 100000, 20261016), 10));
  scan_corpus.emplace_back("periodic 01", filter_scan(BitString::repeat("01", 5000), 20));
  scan_corpus.emplace_back("all ones", filter_scan(BitString::repeat("1", 2000), 40));
  scan_corpus.emplace_back("fixed-sequence [0.2,0.6]",
                           filter_scan(sample_path(systems::stationary(Interval(0.2, 0.6)),
                                                   RealityPolicy::fixed_sequence({0.0, 1.0, 0.5}), 20000, 3),
                                       10));
  Outcome o;
  std::size_t cells = 0;
  for (const auto& [name, f] : scan_corpus) {
    auto check = check_filter_structure(f);
    cells += f.cells.size();
    if (!check.increasing || !check.hull_contained) {
      o.pass = false;
      o.detail += name + ": " + check.detail + "; ";
    }
  }
  if (o.pass) o.detail = std::to_string(scan_corpus.size()) + " scans, " + std::to_string(cells) + " cells";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "divergence-pair product bound", 2.0, product_bound},
      {2, "Hellinger identities", 1.0, hellinger},
      {3, "calibration lemma bound", 5.0, lemma},
      {4, "coherence and global expectation properties", 10.0, coherence},
      {5, "Ville calibration of the capped mixture", 30.0, ville},
      {6, "alternating system filter", 60.0, alternating},
      {7, "explain-away construction", 30.0, explain_away_run},
      {8, "lawfulness", 1.0, lawfulness},
      {9, "filter structure", 0.0, filter_structure},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds <= 0.0 || secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %d: %s  %s (%.2f s%s) %s\n", c.id, pass ? "PASS" : "FAIL", c.title, secs,
                in_time ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
