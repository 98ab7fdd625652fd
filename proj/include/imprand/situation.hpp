#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imprand/errors.hpp"

namespace imprand {

using Bit = std::uint8_t;

/// Read-only view on a finite bit sequence: a situation, or a path prefix.
using BitsView = std::span<const Bit>;

/// A finite bit sequence. Used both for situations (nodes of the event tree,
/// the empty sequence being the initial situation) and for path prefixes.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<Bit> bits) : bits_(std::move(bits)) {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] > 1) throw domain_error("bit at index " + std::to_string(i) + " is not 0 or 1");
  }
  BitString(BitsView view) : bits_(view.begin(), view.end()) {}

  // "0110" -> 0,1,1,0. Anything but '0'/'1' is rejected.
  static BitString parse(std::string_view text) {
    std::vector<Bit> bits;
    bits.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '0') bits.push_back(0);
      else if (text[i] == '1') bits.push_back(1);
      else throw parse_error("illegal character in bit string", i);
    }
    return BitString(std::move(bits));
  }

  static BitString repeat(std::string_view pattern, std::size_t times) {
    std::string s;
    s.reserve(pattern.size() * times);
    for (std::size_t i = 0; i < times; ++i) s += pattern;
    return parse(s);
  }

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t depth() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  Bit operator[](std::size_t i) const { return bits_[i]; }
  BitsView view() const noexcept { return bits_; }
  operator BitsView() const noexcept { return bits_; }

  // First k bits (the prefix of depth k).
  BitsView prefix(std::size_t k) const {
    if (k > bits_.size()) throw resource_error("prefix length exceeds sequence length");
    return BitsView(bits_).first(k);
  }

  void push_back(Bit b) {
    if (b > 1) throw domain_error("bit is not 0 or 1");
    bits_.push_back(b);
  }

  const std::vector<Bit>& bits() const noexcept { return bits_; }
  std::string str() const { return to_string(bits_); }

  static std::string to_string(BitsView bits) {
    std::string s;
    s.reserve(bits.size());
    for (Bit b : bits) s.push_back(b ? '1' : '0');
    return s;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<Bit> bits_;
};

using Situation = BitString;
using PathPrefix = BitString;

// Readable name for a situation; the initial one prints as "<init>".
inline std::string situation_name(BitsView s) { return s.empty() ? std::string("<init>") : BitString::to_string(s); }

// s precedes-or-equals t.
inline bool is_prefix_of(BitsView s, BitsView t) {
  if (s.size() > t.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] != t[i]) return false;
  return true;
}

inline std::size_t count_ones(BitsView s) {
  std::size_t n = 0;
  for (Bit b : s) n += b;
  return n;
}

}  // namespace imprand
