#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lgpdo {

// A named comparison `value relation limit`, relation one of "<=", ">=", "==".
struct Criterion {
  std::string name;
  double value = 0.0;
  std::string relation;
  double limit = 0.0;
  bool pass = false;
};

// Table of doubles for plotting; every row has one entry per column.
struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CheckReport {
  std::string name;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json measured = nlohmann::json::object();
  std::vector<Series> series;
  std::vector<Criterion> criteria;
  std::vector<std::string> notes;
  bool pass = false;
  double runtime_seconds = 0.0;

  // Appends a criterion; non-finite values fail.
  const Criterion& require(const std::string& criterion, double value, const std::string& relation, double limit);
  // pass = every criterion passed (and at least one exists).
  void finalize();
};

// Runtime is left out unless asked for, so reports of equal configs are byte-identical.
nlohmann::json report_to_json(const CheckReport& r, bool include_runtime = false);
std::string report_to_text(const CheckReport& r);
// Tidy rows "series,row,column,value" for every series.
std::string report_to_csv(const CheckReport& r);

}  // namespace lgpdo
