#pragma once

// JSON and CSV renderings of audit, scan and lawfulness results. Field
// order is fixed and doubles print as shortest round-trip decimals, so equal
// inputs give byte-identical output.

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "imprand/audit.hpp"
#include "imprand/lawfulness.hpp"
#include "imprand/number.hpp"
#include "imprand/situation.hpp"

namespace imprand {

using Json = nlohmann::ordered_json;

/// Finite doubles become JSON numbers; infinities and NaN become strings.
inline Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

struct PathMeta {
  std::string source;
  std::size_t length = 0;
  std::size_t ones = 0;
  std::optional<std::uint64_t> seed;
  std::string system;  // generating system, when simulated

  static PathMeta of(BitsView path, std::string source) {
    PathMeta m;
    m.source = std::move(source);
    m.length = path.size();
    m.ones = count_ones(path);
    return m;
  }
};

inline Json to_json(const PathMeta& m) {
  Json j;
  j["source"] = m.source;
  j["length"] = m.length;
  j["ones"] = m.ones;
  j["frequency"] = m.length ? json_number(double(m.ones) / double(m.length)) : Json(nullptr);
  j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  if (!m.system.empty()) j["generated_by"] = m.system;
  return j;
}

inline Json to_json(const CrossingReport& c) {
  Json j;
  j["growth"] = c.growth;
  j["count"] = c.count();
  j["first"] = c.first ? Json(*c.first) : Json(nullptr);
  j["last"] = c.last ? Json(*c.last) : Json(nullptr);
  j["tail_start"] = c.tail_start;
  j["every_tail_step"] = c.every_tail_step;
  j["strict_integer_excess"] = c.strict_integer_excess;
  j["real_excess"] = c.real_excess;
  j["ratio_bounded_away"] = c.ratio_bounded_away;
  j["max_tail_log_ratio"] = json_number(c.max_tail_log_ratio);
  return j;
}

inline Json to_json(const ChurchVerdict& v) {
  Json j;
  j["selection"] = v.selection;
  j["status"] = to_string(v.status);
  j["count"] = v.count;
  j["tail_count"] = v.tail_count;
  j["tail_min"] = json_number(v.tail_min);
  j["tail_max"] = json_number(v.tail_max);
  j["slack_lower"] = json_number(v.slack_lower);
  j["slack_upper"] = json_number(v.slack_upper);
  return j;
}

inline Json battery_json(const AuditReport& rep) {
  Json arr = Json::array();
  for (const auto& r : rep.results) {
    Json j;
    j["name"] = r.label;
    Json params = Json::object();
    params["strategy"] = r.name;
    for (const auto& [k, v] : r.params) params[k] = v;
    j["params"] = std::move(params);
    j["steps"] = r.steps;
    j["final_log_capital"] = json_number(r.final_log_capital);
    j["max_log_capital"] = json_number(r.max_log_capital);
    Json cr = Json::array();
    for (const auto& c : r.crossings) cr.push_back(to_json(c));
    j["crossings"] = std::move(cr);
    j["refuted"] = r.refuted;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline Json audit_json(const AuditReport& rep, const PathMeta& meta) {
  Json j;
  j["path_meta"] = to_json(meta);
  j["mode"] = to_string(rep.mode);
  j["system"] = rep.system;
  j["threshold"] = json_number(rep.threshold);
  j["battery_version"] = rep.battery_version;
  j["battery"] = battery_json(rep);
  j["verdict"] = to_string(rep.verdict);
  j["witnesses"] = rep.witnesses;
  Json church = Json::array();
  for (const auto& v : rep.church) church.push_back(to_json(v));
  j["church"] = std::move(church);
  j["church_note"] = "finite-sample proxy: tail-window min/max of running selected frequency, 3-sigma slack";
  j["filter"] = nullptr;
  return j;
}

inline Json filter_json(const EmpiricalFilter& f) {
  Json j;
  j["grid"] = f.grid;
  j["battery_version"] = f.battery_version;
  Json cells = Json::array();
  for (const auto& c : f.cells) {
    Json cj;
    cj["lo"] = c.lo;
    cj["hi"] = c.hi;
    cj["verdict"] = to_string(c.verdict);
    cj["witness"] = c.witness.empty() ? Json(nullptr) : Json(c.witness);
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  j["hull"] = f.hull ? Json::array({f.hull->first, f.hull->second}) : Json(nullptr);
  j["frequency_hull"] = Json::array({json_number(f.freq_liminf), json_number(f.freq_limsup)});
  Json anomalies = Json::array();
  for (const auto& a : f.anomalies) {
    auto cell = [&](std::size_t k) { return Json::array({f.cells[k].lo, f.cells[k].hi}); };
    Json aj;
    aj["flag"] = "FINITE-SAMPLE-ANOMALY";
    aj["first"] = cell(a.first);
    aj["second"] = cell(a.second);
    aj["intersection"] = cell(a.intersection);
    anomalies.push_back(std::move(aj));
  }
  j["anomalies"] = std::move(anomalies);
  return j;
}

inline Json scan_json(const EmpiricalFilter& f, const PathMeta& meta) {
  Json j;
  j["path_meta"] = to_json(meta);
  j["mode"] = to_string(f.mode);
  j["battery"] = Json::array();
  j["verdict"] = nullptr;
  j["witnesses"] = Json::array();
  j["filter"] = filter_json(f);
  return j;
}

inline Json lawful_json(const LawfulnessReport& rep, const PathMeta& meta) {
  Json j;
  j["path_meta"] = to_json(meta);
  j["algorithm"] = rep.algorithm;
  j["m_max"] = rep.m_max;
  j["checked"] = rep.checked;
  j["passed"] = rep.passed();
  if (rep.failure) {
    Json f;
    f["m"] = rep.failure->m;
    f["condition"] = to_string(rep.failure->condition);
    f["detail"] = rep.failure->detail;
    j["failure"] = std::move(f);
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

/// step,bit,strategy,log_capital; step 0 carries no bit.
inline std::string trajectories_csv(const AuditReport& rep, BitsView path) {
  std::ostringstream out;
  out << "step,bit,strategy,log_capital\n";
  for (const auto& r : rep.results) {
    std::string name = r.label;
    if (name.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : name) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
      name = quoted + "\"";
    }
    const auto& lc = r.trajectory.log_capital;
    for (std::size_t k = 0; k < lc.size(); ++k) {
      out << k << ',';
      if (k > 0) out << int(path[k - 1]);
      out << ',' << name << ',' << format_double(lc[k]) << '\n';
    }
  }
  return out.str();
}

}  // namespace imprand
