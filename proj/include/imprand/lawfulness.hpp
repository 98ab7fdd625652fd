#pragma once

// The frequency-based algorithms R_{n,r} and checks of the lawfulness
// conditions along a path prefix.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imprand/errors.hpp"
#include "imprand/situation.hpp"

namespace imprand {

/// R_{n,r}(s), for M = max(n, |s|): the situations t with |t| = r M that
/// extend the depth-M anchor and contain fewer than r M - M ones.
struct LawAlgorithm {
  std::size_t n = 2;
  std::size_t r = 2;

  LawAlgorithm(std::size_t n_, std::size_t r_) : n(n_), r(r_) {
    if (n < 2 || r < 2) throw parameter_error("R_{n,r} needs n >= 2 and r >= 2");
  }

  std::size_t anchor_depth(std::size_t m) const { return std::max(n, m); }
  std::size_t target_depth(std::size_t m) const { return r * anchor_depth(m); }
  // Members have strictly fewer ones than this.
  std::size_t ones_bound(std::size_t m) const { return target_depth(m) - anchor_depth(m); }

  std::string name() const { return "R(" + std::to_string(n) + "," + std::to_string(r) + ")"; }
};

/// Membership of t in R(s). For |s| < n the set depends on the path beyond
/// s; here the anchor is s itself and the target depth r n.
inline bool law_member(const LawAlgorithm& alg, BitsView s, BitsView t) {
  if (t.size() != alg.target_depth(s.size())) return false;
  if (!is_prefix_of(s, t)) return false;
  return count_ones(t) < alg.ones_bound(s.size());
}

/// The all-ones extension of s, to depth r max(n, |s|).
inline BitString all_ones_extension(const LawAlgorithm& alg, BitsView s) {
  std::vector<Bit> bits(s.begin(), s.end());
  bits.resize(alg.target_depth(s.size()), 1);
  return BitString(std::move(bits));
}

enum class LawCondition { defined, extends, non_trivial, consistent };

inline std::string to_string(LawCondition c) {
  switch (c) {
    case LawCondition::defined: return "(i) defined";
    case LawCondition::extends: return "(ii) strictly follows";
    case LawCondition::non_trivial: return "(iii) non-trivial";
    case LawCondition::consistent: return "(iv) contains the path";
  }
  return "?";
}

struct LawFailure {
  std::size_t m = 0;
  LawCondition condition = LawCondition::consistent;
  std::string detail;
};

struct LawfulnessReport {
  std::string algorithm;
  std::size_t m_max = 0;
  std::size_t checked = 0;
  std::optional<LawFailure> failure;

  bool passed() const noexcept { return !failure; }
};

inline std::size_t lawful_required_length(const LawAlgorithm& alg, std::size_t m_max) {
  return alg.target_depth(m_max);
}

/// Checks conditions (i)-(iv) for every m <= m_max, using the path's own
/// prefix w^M (M = max(n, m)) as the anchor.
inline LawfulnessReport check_lawful_for(BitsView path, const LawAlgorithm& alg, std::size_t m_max) {
  const std::size_t need = lawful_required_length(alg, m_max);
  if (path.size() < need)
    throw resource_error("lawfulness check to m = " + std::to_string(m_max) + " needs a prefix of length " +
                         std::to_string(need) + ", got " + std::to_string(path.size()));
  std::vector<std::size_t> ones(need + 1, 0);
  for (std::size_t k = 0; k < need; ++k) ones[k + 1] = ones[k] + path[k];

  LawfulnessReport rep;
  rep.algorithm = alg.name();
  rep.m_max = m_max;
  for (std::size_t m = 0; m <= m_max; ++m) {
    const std::size_t M = alg.anchor_depth(m);
    const std::size_t depth = alg.target_depth(m);
    const std::size_t bound = alg.ones_bound(m);
    ++rep.checked;
    // (ii): members have depth r M > m and extend w^M, which extends w^m.
    if (!(depth > m)) {
      rep.failure = LawFailure{m, LawCondition::extends, "target depth does not exceed m"};
      break;
    }
    // (iii): the all-ones extension of w^M has ones(w^M) + (r-1) M ones.
    if (ones[M] + (depth - M) < bound) {
      rep.failure = LawFailure{m, LawCondition::non_trivial, "all-ones extension is a member"};
      break;
    }
    // (iv)
    if (!(ones[depth] < bound)) {
      rep.failure = LawFailure{m, LawCondition::consistent,
                               "prefix of depth " + std::to_string(depth) + " has " + std::to_string(ones[depth]) +
                                   " ones, needs fewer than " + std::to_string(bound)};
      break;
    }
  }
  return rep;
}

}  // namespace imprand
