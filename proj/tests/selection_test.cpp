#include <gtest/gtest.h>

#include "imprand/selection.hpp"
#include "random_rationals.hpp"

using namespace imprand;

namespace {
const auto ten = BitString::repeat("10", 5);
}

TEST(SelectedFrequency, SelectEverything) {
  auto r = selected_frequency(SelectionProcess::constant(true), ten);
  EXPECT_EQ(r.count, 10u);
  ASSERT_TRUE(r.freq);
  EXPECT_DOUBLE_EQ(*r.freq, 0.5);
}

TEST(SelectedFrequency, OddIndicesAreOnes) {
  auto r = selected_frequency(SelectionFunction::odd_indices(), ten);
  EXPECT_EQ(r.count, 5u);
  EXPECT_DOUBLE_EQ(*r.freq, 1.0);
  // Same selection as a process: situations of even depth precede odd indices.
  EXPECT_DOUBLE_EQ(*selected_frequency(SelectionProcess::parity_even(), ten).freq, 1.0);
}

TEST(SelectedFrequency, EmptySelectionIsUndefined) {
  auto r = selected_frequency(SelectionProcess::constant(false), ten);
  EXPECT_EQ(r.count, 0u);
  EXPECT_FALSE(r.freq);
}

TEST(SelectedAverage, NoSelectionGivesZero) {
  auto phi = systems::stationary(Interval::precise(0.3));
  EXPECT_EQ(selected_average(phi, Gamble{1, 0}, SelectionProcess::constant(false), ten), 0.0);
}

TEST(SelectedAverage, TwoOnesUnderFairCoin) {
  auto phi = systems::stationary(ExactInterval::precise(Rational(1, 2)));
  EXPECT_EQ(selected_average(phi, ExactGamble{1, 0}, SelectionProcess::constant(true), BitString::parse("11")),
            Rational(1, 2));
}

TEST(SelectedAverage, ConstantGambleAveragesToZero) {
  auto phi = systems::stationary(ExactInterval(Rational(1, 5), Rational(4, 5)));
  EXPECT_EQ(selected_average(phi, ExactGamble{3, 3}, SelectionProcess::bit_echo(1), BitString::parse("1101101")),
            Rational(0));
}

TEST(SelectedAverage, FrequencyBridgeIsExact) {
  oracle::RationalGen gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    Rational p = gen.unit();
    auto phi = systems::stationary(ExactInterval::precise(p));
    std::vector<Bit> path;
    for (int k = 0; k < 60; ++k) path.push_back(static_cast<Bit>(gen.engine()() & 1));
    for (const char* name : {"all", "parity-even", "parity-odd", "bit-echo-0", "bit-echo-1"}) {
      auto sel = SelectionProcess::by_name(name);
      auto f = selected_frequency(sel, path);
      if (f.count == 0) continue;
      Rational freq(static_cast<long long>(f.ones), static_cast<long long>(f.count));
      EXPECT_EQ(selected_average(phi, ExactGamble{1, 0}, sel, path), freq - p);
    }
  }
}

TEST(Church, AlternatingPathViolatesUnderBitEcho) {
  auto path = BitString::repeat("01", 500);
  Interval I(0.4, 0.6);
  auto proc = church_verdict(I, path, std::vector<SelectionProcess>{SelectionProcess::bit_echo(1)});
  EXPECT_EQ(proc[0].status, ChurchStatus::violation);
  EXPECT_DOUBLE_EQ(proc[0].tail_max, 0.0);
  // The time-indexed selection picking the indices where the path shows a one.
  auto fn = church_verdict(I, path, std::vector<SelectionFunction>{SelectionFunction::periodic(BitString::parse("01"))});
  EXPECT_EQ(fn[0].status, ChurchStatus::violation);
  EXPECT_DOUBLE_EQ(fn[0].tail_min, 1.0);
}

TEST(Church, AllOnesConsistentWithUpperOne) {
  auto path = BitString::repeat("1", 200);
  auto v = church_verdict(Interval(0.9, 1.0), path, std::vector<SelectionProcess>{SelectionProcess::constant(true)});
  EXPECT_EQ(v[0].status, ChurchStatus::consistent);
}

TEST(Church, VacuousAlwaysConsistent) {
  for (const char* pattern : {"0", "1", "01", "0010111"}) {
    auto path = BitString::repeat(pattern, 300);
    std::vector<SelectionProcess> sels;
    for (const char* name : {"all", "parity-even", "parity-odd", "bit-echo-0", "bit-echo-1"})
      sels.push_back(SelectionProcess::by_name(name));
    for (const auto& v : church_verdict(Interval::vacuous(), path, sels)) EXPECT_NE(v.status, ChurchStatus::violation);
  }
}

TEST(Church, EmptySelectionIsSkipped) {
  auto v = church_verdict(Interval(0.4, 0.6), BitString::repeat("0", 100),
                          std::vector<SelectionProcess>{SelectionProcess::bit_echo(1)});
  EXPECT_EQ(v[0].status, ChurchStatus::skipped);
  EXPECT_EQ(v[0].count, 0u);
}

TEST(Church, WideningKeepsConsistency) {
  oracle::RationalGen gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Bit> path;
    for (int k = 0; k < 400; ++k) path.push_back(static_cast<Bit>(gen.engine()() % 3 == 0));
    Interval I = to_binary64(gen.interval());
    Interval J(I.lower() * 0.5, I.upper() + (1.0 - I.upper()) * 0.5);
    std::vector<SelectionProcess> sels{SelectionProcess::constant(true), SelectionProcess::parity_odd(),
                                       SelectionProcess::bit_echo(0)};
    auto vi = church_verdict(I, path, sels);
    auto vj = church_verdict(J, path, sels);
    for (std::size_t k = 0; k < sels.size(); ++k)
      if (vi[k].status == ChurchStatus::consistent) EXPECT_EQ(vj[k].status, ChurchStatus::consistent);
  }
}

TEST(Church, RejectsBadTailWindow) {
  ChurchOptions opt;
  opt.tail_window = 0.0;
  EXPECT_THROW(church_verdict(Interval::vacuous(), BitString::repeat("1", 10),
                              std::vector<SelectionProcess>{SelectionProcess::constant(true)}, opt),
               parameter_error);
}
