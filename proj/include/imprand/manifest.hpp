#pragma once

// Experiment manifests: a line-oriented key/value format with sections.
//
//   # comment
//   [system]
//   kind = alternating
//   p = 3/10
//   q = 7/10
//
// Values are numbers (integers, rationals a/b, decimals), identifiers,
// double-quoted strings, and bracketed lists; an interval is a list of two
// numbers.

#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imprand/audit.hpp"
#include "imprand/errors.hpp"
#include "imprand/forecasting_system.hpp"
#include "imprand/growth.hpp"
#include "imprand/horizon.hpp"
#include "imprand/number.hpp"
#include "imprand/path_sim.hpp"

namespace imprand {

namespace manifest {

struct Value {
  enum class Type { number, ident, string, list };

  Type type = Type::ident;
  Rational number{0};
  bool decimal = false;  // written with a decimal point or exponent
  std::string text;      // identifier or string contents
  std::vector<Value> items;
  std::size_t line = 0, column = 0;

  bool operator==(const Value& o) const {
    return type == o.type && number == o.number && decimal == o.decimal && text == o.text && items == o.items;
  }
};

struct Entry {
  std::string key;
  Value value;
  std::size_t line = 0, column = 0;

  bool operator==(const Entry& o) const { return key == o.key && value == o.value; }
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
  std::size_t line = 0;

  bool operator==(const Section& o) const { return name == o.name && entries == o.entries; }
  const Entry* find(std::string_view key) const {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
};

struct Document {
  std::vector<Section> sections;

  bool operator==(const Document&) const = default;
  const Section* find(std::string_view name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Syntax

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document parse() {
    Document doc;
    Section* current = nullptr;
    while (!at_end()) {
      skip_blank();
      if (at_end()) break;
      char c = peek();
      if (c == '\n') {
        advance();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        const std::size_t line = line_, col = col_;
        advance();
        skip_blank();
        std::string name = identifier("section name");
        skip_blank();
        expect(']');
        end_of_line();
        if (doc.find(name)) throw parse_error("duplicate section [" + name + "]", line, col);
        doc.sections.push_back({name, {}, line});
        current = &doc.sections.back();
        continue;
      }
      const std::size_t line = line_, col = col_;
      std::string key = identifier("key");
      if (!current) throw parse_error("key '" + key + "' appears before any section", line, col);
      skip_blank();
      expect('=');
      skip_blank();
      Value v = value();
      end_of_line();
      if (current->find(key)) throw parse_error("duplicate key '" + key + "'", line, col);
      current->entries.push_back({key, std::move(v), line, col});
    }
    return doc;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_blank() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }
  void skip_comment() {
    while (!at_end() && peek() != '\n') advance();
  }
  [[noreturn]] void fail(const std::string& what) const { throw parse_error(what, line_, col_); }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'" + found());
    advance();
  }
  std::string found() const {
    if (at_end()) return ", found end of input";
    if (peek() == '\n') return ", found end of line";
    return std::string(", found '") + peek() + "'";
  }
  void end_of_line() {
    skip_blank();
    if (peek() == '#') skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected text" + found());
    advance();
  }
  std::string identifier(const char* what) {
    if (!ident_start(peek())) fail(std::string("expected ") + what + found());
    std::string out;
    while (!at_end() && ident_char(peek())) {
      out += peek();
      advance();
    }
    return out;
  }

  Value value() {
    Value v;
    v.line = line_;
    v.column = col_;
    char c = peek();
    if (c == '[') {
      v.type = Value::Type::list;
      advance();
      skip_space_in_list();
      if (peek() == ']') {
        advance();
        return v;
      }
      while (true) {
        v.items.push_back(value());
        skip_space_in_list();
        if (peek() == ',') {
          advance();
          skip_space_in_list();
          continue;
        }
        if (peek() == ']') {
          advance();
          return v;
        }
        fail("expected ',' or ']' in list" + found());
      }
    }
    if (c == '"') {
      v.type = Value::Type::string;
      advance();
      while (!at_end() && peek() != '"' && peek() != '\n') {
        if (peek() == '\\') {
          advance();
          if (at_end() || (peek() != '"' && peek() != '\\')) fail("unsupported escape in string");
        }
        v.text += peek();
        advance();
      }
      if (peek() != '"') fail("unterminated string");
      advance();
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      v.type = Value::Type::number;
      std::string lexeme;
      const std::size_t start_col = col_;
      while (!at_end()) {
        char d = peek();
        bool ok = std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == '/' || d == 'e' || d == 'E' ||
                  ((d == '-' || d == '+') && (lexeme.empty() || lexeme.back() == 'e' || lexeme.back() == 'E'));
        if (!ok) break;
        lexeme += d;
        advance();
      }
      try {
        v.number = parse_rational(lexeme);
      } catch (const parse_error& e) {
        throw parse_error(std::string("malformed number '") + lexeme + "'", line_, start_col + e.offset());
      }
      v.decimal = lexeme.find_first_of(".eE") != std::string::npos;
      return v;
    }
    if (ident_start(c)) {
      v.type = Value::Type::ident;
      v.text = identifier("identifier");
      return v;
    }
    fail("expected a value" + found());
  }
  void skip_space_in_list() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
};

// Decimal rendering of a rational whose denominator has only factors 2 and 5.
inline std::string decimal_text(const Rational& q) {
  using boost::multiprecision::cpp_int;
  cpp_int den = denominator(q);
  unsigned twos = 0, fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return format_scalar(q);
  const unsigned digits = std::max(twos, fives);
  cpp_int scaled = numerator(q) * boost::multiprecision::pow(cpp_int(10), digits) / denominator(q);
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.str();
  if (digits > 0) {
    if (s.size() <= digits) s = std::string(digits - s.size() + 1, '0') + s;
    s.insert(s.size() - digits, ".");
  } else {
    s += ".0";
  }
  return negative ? "-" + s : s;
}

}  // namespace detail

inline Document parse_document(std::string_view text) { return detail::Parser(text).parse(); }

inline std::string serialize(const Value& v) {
  switch (v.type) {
    case Value::Type::number: return v.decimal ? detail::decimal_text(v.number) : format_scalar(v.number);
    case Value::Type::ident: return v.text;
    case Value::Type::string: {
      std::string out = "\"";
      for (char c : v.text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case Value::Type::list: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.items.size(); ++i) out += (i ? ", " : "") + serialize(v.items[i]);
      return out + "]";
    }
  }
  return "";
}

inline std::string serialize(const Document& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.sections.size(); ++i) {
    if (i) out += "\n";
    out += "[" + doc.sections[i].name + "]\n";
    for (const auto& e : doc.sections[i].entries) out += e.key + " = " + serialize(e.value) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schema

struct PathSpec {
  std::string source = "simulate";  // simulate | file | inline
  std::size_t length = 0;
  std::uint64_t seed = 0;
  RealityPolicy policy{};
  std::string file;
  BitFormat format = BitFormat::ascii01;
  std::size_t packed_length = 0;
  std::string bits;
  std::string output = "path.txt";
};

struct BatterySpec {
  std::string preset = "default";  // default | none
  BatteryOptions options{};
  std::vector<std::string> extra;  // doubling-on-ones, rival-exploit
  bool mix = false;
  std::optional<double> cap;
};

struct GrowthSpec {
  GrowthFamily family = GrowthFamily::affine;
  double a = 1.0, b = 0.0;
  std::string selection = "all";

  GrowthFunction build() const {
    switch (family) {
      case GrowthFamily::affine: return GrowthFunction::affine(a, b);
      case GrowthFamily::power: return GrowthFunction::power(a, b);
      case GrowthFamily::log_scaled: return GrowthFunction::log_scaled(a, b);
      case GrowthFamily::exp_scaled: return GrowthFunction::exp_scaled(a, b);
      case GrowthFamily::selection_driven:
        return GrowthFunction::selection_driven(a, SelectionProcess::by_name(selection), b);
    }
    throw parameter_error("unknown growth family");
  }
};

struct AuditSpec {
  AuditMode mode = AuditMode::bounded;
  double threshold = 100.0;
  double tail_window = 0.5;
  std::vector<GrowthSpec> growth;
  double slack_sigmas = 3.0;
  std::size_t min_tail_points = 20;
  std::string report = "audit.json";
  std::string trajectories = "trajectories.csv";
};

struct ScanSpec {
  int grid = 20;
  std::optional<AuditMode> mode;
  double threshold = 100.0;
  double tail_window = 0.5;
  std::string report = "scan.json";
};

struct ExpectSpec {
  std::size_t horizon = 1;
  std::string gamble = "ones-count";  // ones-count | indicator | table
  std::vector<Rational> payoffs;
  bool payoffs_exact = true;
  std::vector<BitString> cylinders;
};

struct LawfulSpec {
  std::size_t n = 2, r = 2, m_max = 100;
  std::string report = "lawful.json";
};

struct Manifest {
  Document document;
  std::optional<SystemSpec> system;
  std::optional<PathSpec> path;
  std::optional<BatterySpec> battery;
  std::optional<AuditSpec> audit;
  std::optional<ScanSpec> scan;
  std::optional<ExpectSpec> expect;
  std::optional<LawfulSpec> lawful;
};

namespace detail {

[[noreturn]] inline void mismatch(const Entry& e, const std::string& wanted) {
  throw parse_error("type mismatch: '" + e.key + "' expects " + wanted, e.value.line, e.value.column);
}
[[noreturn]] inline void out_of_range(const Entry& e, const std::string& why) {
  throw parse_error("range violation: '" + e.key + "' " + why, e.value.line, e.value.column);
}

inline const Rational& number(const Entry& e, const Value& v) {
  if (v.type != Value::Type::number) mismatch(e, "a number");
  return v.number;
}
inline Rational number(const Entry& e) { return number(e, e.value); }

inline Rational probability(const Entry& e, const Value& v) {
  const Rational& p = number(e, v);
  if (p < 0 || p > 1) out_of_range(e, "must lie in [0,1]");
  return p;
}

inline double real(const Entry& e) { return to_double(number(e)); }

inline std::uint64_t natural(const Entry& e) {
  Rational q = number(e);
  if (denominator(q) != 1 || e.value.decimal) mismatch(e, "an integer");
  if (q < 0) out_of_range(e, "must be non-negative");
  if (q > Rational(std::numeric_limits<std::uint64_t>::max())) out_of_range(e, "is too large");
  return numerator(q).convert_to<std::uint64_t>();
}

inline std::string ident(const Entry& e) {
  if (e.value.type != Value::Type::ident) mismatch(e, "an identifier");
  return e.value.text;
}

inline std::string text(const Entry& e) {
  if (e.value.type != Value::Type::string) mismatch(e, "a quoted string");
  return e.value.text;
}

inline bool boolean(const Entry& e) {
  if (e.value.type == Value::Type::ident && (e.value.text == "true" || e.value.text == "false"))
    return e.value.text == "true";
  mismatch(e, "true or false");
}

inline const std::vector<Value>& list(const Entry& e, const Value& v) {
  if (v.type != Value::Type::list) mismatch(e, "a list");
  return v.items;
}

inline bool interval_exact(const Value& v) { return !v.items[0].decimal && !v.items[1].decimal; }

inline ExactInterval interval(const Entry& e, const Value& v) {
  const auto& items = list(e, v);
  if (items.size() != 2) mismatch(e, "an interval [a,b]");
  Rational lo = probability(e, items[0]), hi = probability(e, items[1]);
  if (lo > hi) out_of_range(e, "has lower bound above upper bound");
  return ExactInterval(lo, hi);
}

inline std::vector<std::string> names(const Entry& e) {
  std::vector<std::string> out;
  for (const auto& v : list(e, e.value)) {
    if (v.type != Value::Type::ident && v.type != Value::Type::string) mismatch(e, "a list of names");
    out.push_back(v.text);
  }
  return out;
}

inline std::vector<double> reals(const Entry& e) {
  std::vector<double> out;
  for (const auto& v : list(e, e.value)) out.push_back(to_double(number(e, v)));
  return out;
}

inline void unknown_key(const Section& s, const Entry& e) {
  throw parse_error("unknown key '" + e.key + "' in section [" + s.name + "]", e.line, e.column);
}

inline SystemKind system_kind(const Entry& e) {
  const std::string k = ident(e);
  for (auto kind : {SystemKind::stationary, SystemKind::vacuous, SystemKind::alternating, SystemKind::near_half,
                    SystemKind::explain_away, SystemKind::table, SystemKind::composite})
    if (to_string(kind) == k) return kind;
  out_of_range(e, "names no known system kind");
}

inline SystemSpec system_section(const Section& s) {
  SystemSpec spec;
  bool kind_seen = false;
  auto exact = [&](bool ok) { spec.exact = spec.exact && ok; };
  for (const auto& e : s.entries) {
    if (e.key == "kind") {
      spec.kind = system_kind(e);
      kind_seen = true;
    } else if (e.key == "interval") {
      spec.interval = interval(e, e.value);
      exact(interval_exact(e.value));
    } else if (e.key == "p" || e.key == "q") {
      (e.key == "p" ? spec.p : spec.q) = probability(e, e.value);
      exact(!e.value.decimal);
    } else if (e.key == "rivals") {
      for (const auto& v : list(e, e.value)) {
        spec.rivals.push_back(interval(e, v));
        exact(interval_exact(v));
      }
    } else if (e.key == "entries") {
      for (const auto& v : list(e, e.value)) {
        const auto& pair = list(e, v);
        if (pair.size() != 2 || pair[0].type != Value::Type::string) mismatch(e, "a list of [\"situation\", [a,b]]");
        BitString::parse(pair[0].text);
        spec.entries.emplace(pair[0].text, interval(e, pair[1]));
        exact(interval_exact(pair[1]));
      }
    } else if (e.key == "fallback" || e.key == "head" || e.key == "tail") {
      auto& slot = e.key == "fallback" ? spec.fallback : (e.key == "head" ? spec.head : spec.tail);
      slot = interval(e, e.value);
      exact(interval_exact(e.value));
    } else if (e.key == "switch_depth") {
      spec.switch_depth = natural(e);
    } else {
      unknown_key(s, e);
    }
  }
  if (!kind_seen) throw parse_error("section [system] needs 'kind'", s.line, 1);
  if (spec.kind == SystemKind::alternating && spec.p && spec.q && !(*spec.p < *spec.q)) {
    const Entry* e = s.find("q");
    out_of_range(*e, "must exceed p");
  }
  return spec;
}

inline PathSpec path_section(const Section& s) {
  PathSpec p;
  for (const auto& e : s.entries) {
    if (e.key == "source") {
      p.source = ident(e);
      if (p.source != "simulate" && p.source != "file" && p.source != "inline")
        out_of_range(e, "must be simulate, file or inline");
    } else if (e.key == "length") {
      p.length = natural(e);
    } else if (e.key == "seed") {
      p.seed = natural(e);
    } else if (e.key == "policy") {
      try {
        p.policy.kind = policy_kind_from(ident(e));
      } catch (const parameter_error&) {
        out_of_range(e, "names no known reality policy");
      }
    } else if (e.key == "weights") {
      p.policy.weights = reals(e);
      for (double w : p.policy.weights)
        if (!(w >= 0.0 && w <= 1.0)) out_of_range(e, "weights must lie in [0,1]");
    } else if (e.key == "file") {
      p.file = text(e);
    } else if (e.key == "format") {
      try {
        p.format = bit_format_from(ident(e));
      } catch (const parameter_error&) {
        out_of_range(e, "must be ascii01 or packed-bits");
      }
    } else if (e.key == "packed_length") {
      p.packed_length = natural(e);
    } else if (e.key == "bits") {
      p.bits = text(e);
      try {
        ingest_ascii01(p.bits);
      } catch (const parse_error& err) {
        throw parse_error("illegal character in 'bits'", e.value.line, e.value.column + 1 + err.offset());
      }
    } else if (e.key == "output") {
      p.output = text(e);
    } else {
      unknown_key(s, e);
    }
  }
  if (p.policy.kind == PolicyKind::fixed_sequence && p.policy.weights.empty())
    throw parse_error("fixed-sequence policy needs 'weights'", s.line, 1);
  return p;
}

inline BatterySpec battery_section(const Section& s) {
  BatterySpec b;
  for (const auto& e : s.entries) {
    if (e.key == "preset") {
      b.preset = ident(e);
      if (b.preset != "default" && b.preset != "none") out_of_range(e, "must be default or none");
    } else if (e.key == "epsilons") {
      b.options.epsilons = reals(e);
      for (double x : b.options.epsilons)
        if (!(x > 0.0 && x < 1.0)) out_of_range(e, "entries must lie in (0,1)");
    } else if (e.key == "selections") {
      b.options.selections = names(e);
      for (const auto& n : b.options.selections) try {
          SelectionProcess::by_name(n);
        } catch (const parameter_error&) {
          out_of_range(e, "names unknown selection '" + n + "'");
        }
    } else if (e.key == "references") {
      b.options.references = reals(e);
      for (double x : b.options.references)
        if (!(x > 0.0 && x < 1.0)) out_of_range(e, "entries must lie in (0,1)");
    } else if (e.key == "schedules") {
      b.options.schedules = names(e);
      for (const auto& n : b.options.schedules) try {
          SelectionProcess::by_name(n);
        } catch (const parameter_error&) {
          out_of_range(e, "names unknown schedule '" + n + "'");
        }
    } else if (e.key == "calibration") {
      b.options.calibration = boolean(e);
    } else if (e.key == "divergence") {
      b.options.divergence = boolean(e);
    } else if (e.key == "extra") {
      b.extra = names(e);
      for (const auto& n : b.extra)
        if (n != "doubling-on-ones" && n != "rival-exploit") out_of_range(e, "names unknown strategy '" + n + "'");
    } else if (e.key == "mix") {
      b.mix = boolean(e);
    } else if (e.key == "cap") {
      b.cap = real(e);
      if (!(*b.cap > 1.0)) out_of_range(e, "must exceed 1");
    } else {
      unknown_key(s, e);
    }
  }
  return b;
}

inline GrowthFamily growth_family(const Entry& e, const Value& v) {
  if (v.type != Value::Type::ident) mismatch(e, "a growth family name");
  for (auto f : {GrowthFamily::affine, GrowthFamily::power, GrowthFamily::log_scaled, GrowthFamily::exp_scaled,
                 GrowthFamily::selection_driven})
    if (to_string(f) == v.text) return f;
  out_of_range(e, "names unknown growth family '" + v.text + "'");
}

inline AuditMode mode(const Entry& e) {
  const std::string m = ident(e);
  if (m != "bounded" && m != "schnorr") out_of_range(e, "must be bounded or schnorr");
  return audit_mode_from(m);
}

inline double threshold(const Entry& e) {
  double t = real(e);
  if (!(t > 1.0)) out_of_range(e, "must exceed 1");
  return t;
}

inline double tail_window(const Entry& e) {
  double t = real(e);
  if (!(t > 0.0 && t <= 1.0)) out_of_range(e, "must lie in (0,1]");
  return t;
}

inline AuditSpec audit_section(const Section& s) {
  AuditSpec a;
  for (const auto& e : s.entries) {
    if (e.key == "mode") {
      a.mode = mode(e);
    } else if (e.key == "threshold") {
      a.threshold = threshold(e);
    } else if (e.key == "tail_window") {
      a.tail_window = tail_window(e);
    } else if (e.key == "growth") {
      // growth = [[affine, 1/32, 1], [selection-driven, 0.01, 0, parity-odd]]
      for (const auto& g : list(e, e.value)) {
        const auto& items = list(e, g);
        if (items.size() < 3 || items.size() > 4) mismatch(e, "a list of [family, a, b] or [family, a, b, selection]");
        GrowthSpec spec;
        spec.family = growth_family(e, items[0]);
        spec.a = to_double(number(e, items[1]));
        spec.b = to_double(number(e, items[2]));
        if (items.size() == 4) {
          if (items[3].type != Value::Type::ident) mismatch(e, "a selection name");
          spec.selection = items[3].text;
        }
        try {
          spec.build();
        } catch (const parameter_error& err) {
          out_of_range(e, err.what());
        }
        a.growth.push_back(spec);
      }
    } else if (e.key == "slack_sigmas") {
      a.slack_sigmas = real(e);
      if (!(a.slack_sigmas >= 0.0)) out_of_range(e, "must be non-negative");
    } else if (e.key == "min_tail_points") {
      a.min_tail_points = natural(e);
    } else if (e.key == "report") {
      a.report = text(e);
    } else if (e.key == "trajectories") {
      a.trajectories = text(e);
    } else {
      unknown_key(s, e);
    }
  }
  return a;
}

inline ScanSpec scan_section(const Section& s) {
  ScanSpec sc;
  for (const auto& e : s.entries) {
    if (e.key == "grid") {
      auto g = natural(e);
      if (!is_supported_grid(static_cast<int>(g)) || g > 100) out_of_range(e, "must be 10, 20, 40 or 100");
      sc.grid = static_cast<int>(g);
    } else if (e.key == "mode") {
      sc.mode = mode(e);
    } else if (e.key == "threshold") {
      sc.threshold = threshold(e);
    } else if (e.key == "tail_window") {
      sc.tail_window = tail_window(e);
    } else if (e.key == "report") {
      sc.report = text(e);
    } else {
      unknown_key(s, e);
    }
  }
  return sc;
}

inline ExpectSpec expect_section(const Section& s) {
  ExpectSpec x;
  for (const auto& e : s.entries) {
    if (e.key == "horizon") {
      x.horizon = natural(e);
      if (x.horizon > default_horizon_limit) out_of_range(e, "exceeds the exhaustion limit 20");
    } else if (e.key == "gamble") {
      x.gamble = ident(e);
      if (x.gamble != "ones-count" && x.gamble != "indicator" && x.gamble != "table")
        out_of_range(e, "must be ones-count, indicator or table");
    } else if (e.key == "payoffs") {
      for (const auto& v : list(e, e.value)) {
        x.payoffs.push_back(number(e, v));
        x.payoffs_exact = x.payoffs_exact && !v.decimal;
      }
    } else if (e.key == "cylinders") {
      for (const auto& v : list(e, e.value)) {
        if (v.type != Value::Type::string) mismatch(e, "a list of quoted bit strings");
        try {
          x.cylinders.push_back(BitString::parse(v.text));
        } catch (const parse_error& err) {
          throw parse_error("illegal character in cylinder", v.line, v.column + 1 + err.offset());
        }
      }
    } else {
      unknown_key(s, e);
    }
  }
  if (x.gamble == "table" && x.payoffs.size() != (std::size_t{1} << x.horizon))
    throw parse_error("table gamble for horizon " + std::to_string(x.horizon) + " needs " +
                          std::to_string(std::size_t{1} << x.horizon) + " payoffs",
                      s.line, 1);
  for (const auto& c : x.cylinders)
    if (c.size() > x.horizon) throw parse_error("cylinder " + c.str() + " is deeper than the horizon", s.line, 1);
  return x;
}

inline LawfulSpec lawful_section(const Section& s) {
  LawfulSpec l;
  for (const auto& e : s.entries) {
    if (e.key == "n" || e.key == "r") {
      auto v = natural(e);
      if (v < 2) out_of_range(e, "must be at least 2");
      (e.key == "n" ? l.n : l.r) = v;
    } else if (e.key == "m_max") {
      l.m_max = natural(e);
    } else if (e.key == "report") {
      l.report = text(e);
    } else {
      unknown_key(s, e);
    }
  }
  return l;
}

}  // namespace detail

/// Parses and validates a manifest. Errors carry line and column.
inline Manifest parse_manifest(std::string_view text) {
  Manifest m;
  m.document = parse_document(text);
  for (const auto& s : m.document.sections) {
    if (s.name == "system") {
      m.system = detail::system_section(s);
    } else if (s.name == "path") {
      m.path = detail::path_section(s);
    } else if (s.name == "battery") {
      m.battery = detail::battery_section(s);
    } else if (s.name == "audit") {
      m.audit = detail::audit_section(s);
    } else if (s.name == "scan") {
      m.scan = detail::scan_section(s);
    } else if (s.name == "expect") {
      m.expect = detail::expect_section(s);
    } else if (s.name == "lawful") {
      m.lawful = detail::lawful_section(s);
    } else {
      throw parse_error("unknown section [" + s.name + "]", s.line, 1);
    }
  }
  return m;
}

inline std::string serialize(const Manifest& m) { return serialize(m.document); }

}  // namespace manifest

}  // namespace imprand
