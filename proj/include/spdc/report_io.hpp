#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spdc/estimator.hpp"
#include "spdc/filters.hpp"
#include "spdc/forward_model.hpp"
#include "spdc/monte_carlo.hpp"

namespace spdc {

enum class Format { json, csv, table };

Format parse_format(const std::string& name);

// Rounds to 12 significant digits so that JSON output is stable.
double round12(double v);
std::string format12(double v);

struct FilterRow {
    std::string name;
    std::string description;
    double fwhm_ghz;
    double i1_ghz;
    double i2_max_ghz;
    double ratio;
};

nlohmann::ordered_json to_json(const FilterRow& row);
nlohmann::ordered_json to_json(const Prediction& p);
nlohmann::ordered_json to_json(const SimCounts& c);
nlohmann::ordered_json to_json(const PerformanceReport& r);
nlohmann::ordered_json to_json(const SweepPoint& p);

// Fixed-width text table; every row must have as many cells as the header.
std::string text_table(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

}  // namespace spdc
