#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "imprand/capital.hpp"

using namespace imprand;

namespace {
BitString bits(const char* s) { return BitString::parse(s); }
}  // namespace

TEST(ProcessDifference, ConstantProcess) {
  RealProcess F = [](BitsView) { return 3.0; };
  EXPECT_EQ(process_difference(F, bits("01")), (Gamble{0.0, 0.0}));
}

TEST(ProcessDifference, DepthCounter) {
  RealProcess F = [](BitsView s) { return static_cast<double>(s.size()); };
  EXPECT_EQ(process_difference(F, bits("110")), (Gamble{1.0, 1.0}));
}

TEST(ProcessDifference, DoublingCapital) {
  auto F = as_real_process(constant_multiplier({2.0, 0.0}));
  EXPECT_EQ(process_difference(F, BitString{}), (Gamble{1.0, -1.0}));
}

TEST(RunMultiplier, UnitBetKeepsCapital) {
  auto t = run_multiplier(constant_multiplier({1.0, 1.0}), bits("010011"));
  for (double v : t.log_capital) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(t.steps(), 6u);
}

TEST(RunMultiplier, DoublingHitsZero) {
  auto t = run_multiplier(constant_multiplier({2.0, 0.0}), bits("110"));
  ASSERT_EQ(t.log_capital.size(), 4u);
  EXPECT_DOUBLE_EQ(t.capital_at(1), 2.0);
  EXPECT_DOUBLE_EQ(t.capital_at(2), 4.0);
  EXPECT_EQ(t.capital_at(3), 0.0);
  EXPECT_EQ(t.final_log(), -std::numeric_limits<double>::infinity());
}

TEST(RunMultiplier, ZeroIsAbsorbing) {
  auto t = run_multiplier(constant_multiplier({2.0, 0.0}), bits("10111"));
  for (std::size_t k = 2; k <= 5; ++k) EXPECT_EQ(t.capital_at(k), 0.0);
}

TEST(RunMultiplier, LogCapitalOfOnes) {
  auto t = run_multiplier(constant_multiplier({2.0, 0.0}), BitString::repeat("1", 2000));
  EXPECT_NEAR(t.final_log(), 2000 * std::log(2.0), 1e-9);
  EXPECT_TRUE(std::isfinite(t.final_log()));
}

TEST(RunMultiplier, NegativePayoffNamesTheSituation) {
  MultiplierProcess M{[](BitsView s) { return s.size() == 2 ? Gamble{-0.5, 1.0} : Gamble{1.0, 1.0}; }, "test"};
  try {
    run_multiplier(M, bits("0110"));
    FAIL() << "expected a contract violation";
  } catch (const contract_violation& e) {
    EXPECT_NE(std::string(e.what()).find("01"), std::string::npos);
  }
}

TEST(SupermartingaleMultiplier, Examples) {
  EXPECT_TRUE(is_supermartingale_multiplier_at(ExactGamble{2, 0}, ExactInterval::precise(Rational(1, 2))));
  EXPECT_FALSE(is_supermartingale_multiplier_at(Gamble{2, 0}, Interval::precise(0.6)));
  EXPECT_TRUE(is_supermartingale_multiplier_at(Gamble{1, 1}, Interval(0.1, 0.9)));
  EXPECT_TRUE(is_supermartingale_multiplier_at(constant_multiplier({2, 0}), Interval::precise(0.5), BitsView{}));
}

TEST(VerifySupermartingale, NonIncreasingUnderVacuous) {
  RealProcess T = [](BitsView s) { return 10.0 - static_cast<double>(count_ones(s)); };
  auto r = verify_supermartingale_along(T, systems::vacuous(), bits("0110101"));
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.checked, 7u);
}

TEST(VerifySupermartingale, MultiplierProcessPasses) {
  auto M = constant_multiplier({2.0, 0.0});
  auto r = verify_supermartingale_along(as_real_process(M), systems::stationary(Interval::precise(0.5)), bits("1111"));
  EXPECT_TRUE(r.passed());
}

TEST(VerifySupermartingale, ReportsViolation) {
  ExactForecastingSystem phi = systems::stationary(ExactInterval::precise(Rational(1, 2)));
  basic_real_process<Rational> T = [](BitsView s) {
    if (s.empty()) return Rational(1);
    return s[0] ? Rational(3) : Rational(0);
  };
  auto r = verify_supermartingale_along(T, phi, bits("1"));
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].depth, 0u);
  EXPECT_EQ(r.violations[0].situation, "<init>");
  EXPECT_DOUBLE_EQ(r.violations[0].excess, 0.5);
}

TEST(VerifySupermartingale, RandomClippedMultipliersPass) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double lo = u(rng) * 0.5, hi = lo + u(rng) * (1.0 - lo);
    auto phi = systems::stationary(Interval(lo, hi));
    std::uint64_t salt = rng();
    MultiplierProcess M{[salt, lo, hi](BitsView s) {
                          std::mt19937_64 g(salt ^ (s.size() * 0x9E3779B97F4A7C15ULL) ^ std::hash<std::string>{}(BitString::to_string(s)));
                          std::uniform_real_distribution<double> v(0.0, 3.0);
                          Gamble raw{v(g), v(g)};
                          double ub = upper_ex(Interval(lo, hi), raw);
                          return ub > 1.0 ? Gamble{raw.at_one / ub, raw.at_zero / ub} : raw;
                        },
                        "random"};
    std::vector<Bit> path;
    for (int k = 0; k < 40; ++k) path.push_back(static_cast<Bit>(u(rng) < 0.5));
    auto r = verify_supermartingale_along(as_real_process(M), phi, BitsView(path));
    EXPECT_TRUE(r.passed()) << "trial " << trial;
  }
}

TEST(RunMultiplier, LogDomainMatchesExactProduct) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(1, 24), den(8, 16);
  const std::size_t n = 10000;
  std::vector<ExactGamble> factors;
  for (std::size_t k = 0; k < n; ++k)
    factors.push_back({Rational(num(rng), den(rng)), Rational(num(rng), den(rng))});
  std::vector<Bit> path;
  for (std::size_t k = 0; k < n; ++k) path.push_back(static_cast<Bit>(rng() & 1));
  MultiplierProcess M{[&](BitsView s) {
                        const auto& f = factors[s.size()];
                        return Gamble{to_double(f.at_one), to_double(f.at_zero)};
                      },
                      "rational"};
  auto t = run_multiplier(M, BitsView(path));
  // Numerator and denominator are accumulated separately to skip the gcd
  // at every step.
  boost::multiprecision::cpp_int top = 1, bottom = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const Rational& f = factors[k](path[k]);
    top *= numerator(f);
    bottom *= denominator(f);
    if ((k + 1) % 1000 == 0) {
      double rel = std::expm1(t.log_at(k + 1) - log_of(Rational(top, bottom)));
      ASSERT_LE(std::abs(rel), 1e-9) << "step " << k + 1;
    }
  }
}
