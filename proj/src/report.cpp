#include "lgpdo/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lgpdo {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void table(std::ostringstream& os, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  for (const auto& r : rows) {
    os << "  ";
    for (std::size_t c = 0; c < r.size(); ++c) {
      os << r[c];
      if (c + 1 < r.size()) os << std::string(width[c] - r[c].size() + 2, ' ');
    }
    os << '\n';
  }
}

}  // namespace

const Criterion& CheckReport::require(const std::string& criterion, double value, const std::string& relation,
                                      double limit) {
  bool ok = false;
  if (std::isfinite(value)) {
    if (relation == "<=")
      ok = value <= limit;
    else if (relation == ">=")
      ok = value >= limit;
    else if (relation == "==")
      ok = value == limit;
    else
      throw std::invalid_argument("unknown relation " + relation);
  }
  criteria.push_back({criterion, value, relation, limit, ok});
  return criteria.back();
}

void CheckReport::finalize() {
  pass = !criteria.empty() && std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

nlohmann::json report_to_json(const CheckReport& r, bool include_runtime) {
  nlohmann::json j;
  j["check"] = r.name;
  j["config"] = r.config;
  j["measured"] = r.measured;
  j["criteria"] = nlohmann::json::array();
  for (const auto& c : r.criteria)
    j["criteria"].push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"limit", c.limit},
                             {"pass", c.pass}});
  j["series"] = nlohmann::json::object();
  for (const auto& s : r.series) j["series"][s.name] = {{"columns", s.columns}, {"rows", s.rows}};
  j["notes"] = r.notes;
  j["pass"] = r.pass;
  if (include_runtime) j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

std::string report_to_text(const CheckReport& r) {
  std::ostringstream os;
  os << "check " << r.name << ": " << (r.pass ? "PASS" : "FAIL") << '\n';
  os << "config\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, v] : r.config.items()) rows.push_back({k, scalar_text(v)});
  table(os, rows);
  os << "measured\n";
  rows.clear();
  for (const auto& [k, v] : r.measured.items()) rows.push_back({k, scalar_text(v)});
  table(os, rows);
  os << "criteria\n";
  rows = {{"name", "value", "relation", "limit", "result"}};
  for (const auto& c : r.criteria) rows.push_back({c.name, fmt(c.value), c.relation, fmt(c.limit), c.pass ? "pass" : "fail"});
  table(os, rows);
  for (const auto& s : r.series) {
    os << "series " << s.name << '\n';
    rows = {s.columns};
    for (const auto& row : s.rows) {
      std::vector<std::string> cells;
      for (double v : row) cells.push_back(fmt(v));
      rows.push_back(std::move(cells));
    }
    table(os, rows);
  }
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  return os.str();
}

std::string report_to_csv(const CheckReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "series,row,column,value\n";
  for (const auto& s : r.series)
    for (std::size_t i = 0; i < s.rows.size(); ++i)
      for (std::size_t c = 0; c < s.rows[i].size() && c < s.columns.size(); ++c)
        os << s.name << ',' << i << ',' << s.columns[c] << ',' << s.rows[i][c] << '\n';
  return os.str();
}

}  // namespace lgpdo
