#include <gtest/gtest.h>

#include "imprand/horizon.hpp"
#include "random_rationals.hpp"

using namespace imprand;

namespace {

using G = HorizonGamble<Rational>;

ExactForecastingSystem half() { return systems::stationary(ExactInterval::precise(Rational(1, 2))); }

// Independent oracle: sum over all strings of payoff times product probability.
Rational enumerate(const std::function<Rational(std::size_t)>& p_at_depth, const G& g) {
  Rational total(0);
  std::vector<Bit> buf(g.horizon());
  for (std::uint64_t i = 0; i < g.payoffs().size(); ++i) {
    G::decode(i, buf);
    Rational w(1);
    for (std::size_t k = 0; k < buf.size(); ++k) w *= buf[k] ? p_at_depth(k) : Rational(1) - p_at_depth(k);
    total += w * g[i];
  }
  return total;
}

G random_gamble(oracle::RationalGen& gen, std::size_t n) {
  std::vector<Rational> v;
  for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) v.push_back(gen.any());
  return G(n, std::move(v));
}

// Situation-dependent rational forecasts drawn once per depth and last bit.
ExactForecastingSystem random_system(oracle::RationalGen& gen, std::size_t n) {
  std::vector<ExactInterval> table;
  for (std::size_t i = 0; i < 2 * n + 2; ++i) table.push_back(gen.interval());
  return systems::custom<Rational>("random", [table](BitsView s) {
    std::size_t key = 2 * s.size() + (s.empty() ? 0 : s.back());
    return table[key % table.size()];
  });
}

}  // namespace

TEST(Horizon, VacuousFirstBitIndicator) {
  auto phi = systems::vacuous<Rational>();
  auto g = G::indicator(1, {BitString::parse("1")});
  EXPECT_EQ(upper_expectation_fh(phi, g), Rational(1));
  EXPECT_EQ(lower_expectation_fh(phi, g), Rational(0));
}

TEST(Horizon, OnesCountUnderFairCoin) {
  auto g = G::ones_count(2);
  EXPECT_EQ(upper_expectation_fh(half(), g), Rational(1));
  EXPECT_EQ(lower_expectation_fh(half(), g), Rational(1));
  EXPECT_EQ(enumerate([](std::size_t) { return Rational(1, 2); }, g), Rational(1));
}

TEST(Horizon, OneStepMatchesLocalModel) {
  auto phi = systems::stationary(ExactInterval(Rational(1, 5), Rational(3, 5)));
  auto g = G::ones_count(1);
  EXPECT_EQ(upper_expectation_fh(phi, g), Rational(3, 5));
  EXPECT_EQ(lower_expectation_fh(phi, g), Rational(1, 5));
}

TEST(Horizon, ConstantGamble) {
  auto phi = systems::stationary(ExactInterval(Rational(1, 3), Rational(2, 3)));
  EXPECT_EQ(upper_expectation_fh(phi, G::constant(4, Rational(-7, 3))), Rational(-7, 3));
  EXPECT_EQ(lower_expectation_fh(phi, G::constant(4, Rational(-7, 3))), Rational(-7, 3));
}

TEST(Horizon, Probabilities) {
  auto phi = systems::vacuous<Rational>();
  EXPECT_EQ(upper_probability_fh(phi, 3, {BitString{}}), Rational(1));
  EXPECT_EQ(lower_probability_fh(phi, 3, {BitString{}}), Rational(1));
  EXPECT_EQ(upper_probability_fh(phi, 3, {}), Rational(0));
  for (const char* c : {"0", "10", "111", "011"}) {
    EXPECT_EQ(upper_probability_fh(phi, 3, {BitString::parse(c)}), Rational(1)) << c;
    EXPECT_EQ(lower_probability_fh(phi, 3, {BitString::parse(c)}), Rational(0)) << c;
  }
  EXPECT_EQ(upper_probability_fh(half(), 3, {BitString::parse("10"), BitString::parse("0")}), Rational(3, 4));
}

TEST(Horizon, ResourceLimit) {
  EXPECT_THROW(G::ones_count(21), resource_error);
  EXPECT_THROW(G(2, {Rational(1)}), parameter_error);
  EXPECT_THROW(G::indicator(2, {BitString::parse("000")}), parameter_error);
}

TEST(Horizon, CoherenceProperties) {
  oracle::RationalGen gen(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 8;
    auto phi = random_system(gen, n);
    G f = random_gamble(gen, n), g = random_gamble(gen, n);
    const Rational lam = gen.nonneg(), mu = gen.any();
    const Rational uf = upper_expectation_fh(phi, f), lf = lower_expectation_fh(phi, f);
    const auto& pf = f.payoffs();
    // E1: bounds.
    EXPECT_LE(*std::min_element(pf.begin(), pf.end()), lf);
    EXPECT_LE(lf, uf);
    EXPECT_LE(uf, *std::max_element(pf.begin(), pf.end()));
    // E2: sub-additivity of the upper expectation.
    EXPECT_LE(upper_expectation_fh(phi, f + g), uf + upper_expectation_fh(phi, g));
    // E3: non-negative homogeneity.
    EXPECT_EQ(upper_expectation_fh(phi, lam * f), lam * uf);
    // E4: constant additivity.
    EXPECT_EQ(upper_expectation_fh(phi, f + mu), uf + mu);
    // E5: monotonicity.
    std::vector<Rational> dominated;
    for (std::size_t i = 0; i < pf.size(); ++i) dominated.push_back(std::min(pf[i], g[i]));
    EXPECT_LE(upper_expectation_fh(phi, G(n, dominated)), uf);
    // Conjugacy.
    EXPECT_EQ(lf, -upper_expectation_fh(phi, -f));
  }
}

TEST(Horizon, PreciseMatchesEnumeration) {
  oracle::RationalGen gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 10;
    std::vector<Rational> p;
    for (std::size_t k = 0; k < n; ++k) p.push_back(gen.unit());
    auto phi = systems::custom<Rational>("depthwise", [p](BitsView s) { return ExactInterval::precise(p[s.size()]); });
    G g = random_gamble(gen, n);
    const Rational oracle_value = enumerate([&](std::size_t k) { return p[k]; }, g);
    EXPECT_EQ(upper_expectation_fh(phi, g), oracle_value);
    EXPECT_EQ(lower_expectation_fh(phi, g), oracle_value);
  }
}

TEST(Horizon, MonotoneInConservativeness) {
  oracle::RationalGen gen(13);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 6;
    ExactInterval I = gen.interval();
    Rational a = I.lower() * gen.unit(), b = I.upper() + (1 - I.upper()) * gen.unit();
    auto phi = systems::stationary(I);
    auto psi = systems::stationary(ExactInterval(a, b));
    G g = random_gamble(gen, n);
    EXPECT_LE(upper_expectation_fh(phi, g), upper_expectation_fh(psi, g));
    EXPECT_GE(lower_expectation_fh(phi, g), lower_expectation_fh(psi, g));
  }
}
