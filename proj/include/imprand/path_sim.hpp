#pragma once

// Reality: seeded path sampling from forecasting systems and bitstream
// ingestion.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "imprand/errors.hpp"
#include "imprand/forecasting_system.hpp"
#include "imprand/local_models.hpp"
#include "imprand/situation.hpp"

namespace imprand {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Top 53 bits scaled to [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class PolicyKind { precise_as_given, lower_endpoint, upper_endpoint, midpoint, oscillate_extremes, fixed_sequence };

inline std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::precise_as_given: return "precise-as-given";
    case PolicyKind::lower_endpoint: return "lower-endpoint";
    case PolicyKind::upper_endpoint: return "upper-endpoint";
    case PolicyKind::midpoint: return "midpoint";
    case PolicyKind::oscillate_extremes: return "oscillate-extremes";
    case PolicyKind::fixed_sequence: return "fixed-sequence";
  }
  return "?";
}

inline PolicyKind policy_kind_from(std::string_view name) {
  for (auto k : {PolicyKind::precise_as_given, PolicyKind::lower_endpoint, PolicyKind::upper_endpoint,
                 PolicyKind::midpoint, PolicyKind::oscillate_extremes, PolicyKind::fixed_sequence})
    if (to_string(k) == name) return k;
  throw parameter_error("unknown reality policy '" + std::string(name) + "'");
}

/// How Reality picks a sampling probability inside each interval forecast.
/// oscillate-extremes: lower endpoint at even depth, upper at odd depth.
/// fixed-sequence: p = lower + t_k (upper - lower), t_k cycling through the
/// given weights in [0,1].
struct RealityPolicy {
  PolicyKind kind = PolicyKind::precise_as_given;
  std::vector<double> weights;

  static RealityPolicy of(PolicyKind k) { return {k, {}}; }
  static RealityPolicy fixed_sequence(std::vector<double> w) {
    if (w.empty()) throw parameter_error("fixed-sequence policy needs at least one weight");
    for (double t : w)
      if (!(t >= 0.0 && t <= 1.0)) throw parameter_error("fixed-sequence weights must lie in [0,1]");
    return {PolicyKind::fixed_sequence, std::move(w)};
  }

  template <Scalar S>
  S choose(const basic_interval<S>& I, std::size_t depth) const {
    switch (kind) {
      case PolicyKind::precise_as_given:
        if (!I.is_precise())
          throw parameter_error("precise-as-given policy met the imprecise forecast " + I.str() + " at depth " +
                                std::to_string(depth));
        return I.lower();
      case PolicyKind::lower_endpoint: return I.lower();
      case PolicyKind::upper_endpoint: return I.upper();
      case PolicyKind::midpoint: return (I.lower() + I.upper()) / S(2);
      case PolicyKind::oscillate_extremes: return depth % 2 == 0 ? I.lower() : I.upper();
      case PolicyKind::fixed_sequence: {
        if (weights.empty()) throw parameter_error("fixed-sequence policy has no weights");
        const double t = weights[depth % weights.size()];
        S p = I.lower() + scalar_from<S>(to_rational(t)) * (I.upper() - I.lower());
        if constexpr (!is_exact_v<S>) p = std::min(std::max(p, I.lower()), I.upper());
        return p;
      }
    }
    throw parameter_error("unknown reality policy");
  }
};

/// Step k+1 is 1 iff the k-th uniform draw is below the probability picked
/// from phi(w^k).
template <Scalar S>
PathPrefix sample_path(const basic_forecasting_system<S>& phi, const RealityPolicy& policy, std::size_t n,
                       std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Bit> bits;
  bits.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto I = phi(BitsView(bits));
    const S p = policy.choose(I, k);
    if (!I.contains(p))
      throw contract_violation("reality policy picked " + format_scalar(p) + " outside " + I.str() + " at depth " +
                               std::to_string(k));
    const double u = rng.uniform();
    bool one;
    if constexpr (is_exact_v<S>) {
      one = Rational(u) < p;
    } else {
      one = u < p;
    }
    bits.push_back(one ? 1 : 0);
  }
  return PathPrefix(std::move(bits));
}

// ---------------------------------------------------------------------------
// Ingestion

enum class BitFormat { ascii01, packed_bits };

inline BitFormat bit_format_from(std::string_view name) {
  if (name == "ascii01") return BitFormat::ascii01;
  if (name == "packed-bits") return BitFormat::packed_bits;
  throw parameter_error("unknown bit format '" + std::string(name) + "'");
}

/// Characters '0' and '1', optionally followed by one newline.
inline PathPrefix ingest_ascii01(std::string_view text) {
  if (!text.empty() && text.back() == '\n') text.remove_suffix(1);
  if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
  std::vector<Bit> bits;
  bits.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1')
      throw parse_error(std::string("illegal character '") + text[i] + "' in ascii01 data", i);
    bits.push_back(static_cast<Bit>(text[i] - '0'));
  }
  return PathPrefix(std::move(bits));
}

/// MSB-first bits; exactly ceil(length / 8) bytes are expected.
inline PathPrefix ingest_packed(std::string_view bytes, std::size_t length) {
  const std::size_t need = (length + 7) / 8;
  if (bytes.size() < need)
    throw parse_error("packed data truncated: " + std::to_string(length) + " bits need " + std::to_string(need) +
                          " bytes, got " + std::to_string(bytes.size()),
                      bytes.size());
  if (bytes.size() > need)
    throw parse_error("unexpected data after " + std::to_string(need) + " bytes of packed bits", need);
  std::vector<Bit> bits;
  bits.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const auto byte = static_cast<unsigned char>(bytes[i / 8]);
    bits.push_back(static_cast<Bit>((byte >> (7 - i % 8)) & 1u));
  }
  return PathPrefix(std::move(bits));
}

inline std::string read_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw resource_error("cannot open '" + file + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline PathPrefix ingest_bits(std::string_view raw, BitFormat format, std::size_t packed_length = 0) {
  return format == BitFormat::ascii01 ? ingest_ascii01(raw) : ingest_packed(raw, packed_length);
}

inline PathPrefix ingest_file(const std::string& file, BitFormat format, std::size_t packed_length = 0) {
  return ingest_bits(read_file(file), format, packed_length);
}

inline std::string to_ascii01(BitsView bits) { return BitString::to_string(bits) + "\n"; }

inline std::string to_packed(BitsView bits) {
  std::string out((bits.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i / 8] = static_cast<char>(static_cast<unsigned char>(out[i / 8]) | (0x80u >> (i % 8)));
  return out;
}

}  // namespace imprand
