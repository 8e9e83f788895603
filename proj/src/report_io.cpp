#include "spdc/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "spdc/errors.hpp"

namespace spdc {

using nlohmann::ordered_json;

Format parse_format(const std::string& name) {
    if (name == "json") return Format::json;
    if (name == "csv") return Format::csv;
    if (name == "table") return Format::table;
    throw ValidationError("unknown output format '" + name + "' (json, csv or table)");
}

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

std::string format12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

ordered_json estimate_json(const Estimate& e) {
    return ordered_json{{"value", round12(e.value)}, {"sigma", round12(e.sigma)}};
}

ordered_json optional_json(const std::optional<double>& v) {
    return v ? ordered_json(round12(*v)) : ordered_json(nullptr);
}

}  // namespace

ordered_json to_json(const FilterRow& row) {
    return ordered_json{{"name", row.name},
                        {"filter", row.description},
                        {"fwhm_ghz", round12(row.fwhm_ghz)},
                        {"i1_ghz", round12(row.i1_ghz)},
                        {"i2_max_ghz", round12(row.i2_max_ghz)},
                        {"i1_over_i2max", round12(row.ratio)}};
}

ordered_json to_json(const Prediction& p) {
    const auto& q = p.probabilities;
    return ordered_json{{"p_a", round12(q.p_a)},
                        {"p_b", round12(q.p_b)},
                        {"p_tc", round12(q.p_tc)},
                        {"p_ac", round12(q.p_ac)},
                        {"p_nab", round12(q.p_nab)},
                        {"p_c", round12(q.p_c)},
                        {"p0_i1", round12(p.p0_i1)},
                        {"k_t", round12(p.k_t)},
                        {"i1_ghz", round12(p.integrals.i1)},
                        {"i2_ghz", round12(p.integrals.i2)},
                        {"detuning_ghz", round12(p.integrals.detuning_ghz)},
                        {"warnings", p.warnings}};
}

ordered_json to_json(const SimCounts& c) {
    return ordered_json{{"n_gates", c.n_gates},
                        {"singles_a", c.singles_a},
                        {"singles_b", c.singles_b},
                        {"coincidences", c.coincidences},
                        {"p_a", round12(c.p_a())},
                        {"p_b", round12(c.p_b())},
                        {"p_c", round12(c.p_c())},
                        {"sigma_a", round12(c.sigma_a())},
                        {"sigma_b", round12(c.sigma_b())},
                        {"sigma_c", round12(c.sigma_c())}};
}

ordered_json to_json(const PerformanceReport& r) {
    return ordered_json{
        {"label", r.label},
        {"p_a", round12(r.observed.p_a)},
        {"p_b", round12(r.observed.p_b)},
        {"p_c", round12(r.observed.p_c)},
        {"p0_i1", estimate_json(r.p0_i1)},
        {"x_a", estimate_json(r.x_a)},
        {"x_b", estimate_json(r.x_b)},
        {"f_sys", estimate_json(r.f_sys)},
        {"f_spdc", estimate_json(r.f_spdc)},
        {"bell_margin", round12(r.bell_margin)},
        {"bell_threshold_spdc", round12(r.bell_threshold_spdc)},
        {"bell_threshold_sys", optional_json(r.bell_threshold_sys)},
        {"c_f_a", optional_json(r.c_f_a)},
        {"c_f_b", optional_json(r.c_f_b)},
        {"p_tc", round12(r.p_tc)},
        {"p_ac", round12(r.p_ac)},
        {"p_nab", round12(r.p_nab)},
        {"fluorescence_mw", optional_json(r.fluorescence_mw)},
        {"warnings", r.warnings}};
}

ordered_json to_json(const SweepPoint& p) {
    return ordered_json{{"detuning_ghz", round12(p.detuning_ghz)},
                        {"transmission", round12(p.transmission)},
                        {"i2_over_i2max", round12(p.i2_over_i2max)}};
}

std::string text_table(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) widths[i] = header[i].size();
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());

    const auto line = [&](const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t i = 0; i < widths.size(); ++i) {
            const std::string& cell = i < cells.size() ? cells[i] : std::string();
            out += cell;
            if (i + 1 < widths.size()) out += std::string(widths[i] - cell.size() + 2, ' ');
        }
        return out + "\n";
    };
    std::string out = line(header);
    std::size_t total = 0;
    for (auto w : widths) total += w + 2;
    out += std::string(total > 2 ? total - 2 : 0, '-') + "\n";
    for (const auto& row : rows) out += line(row);
    return out;
}

}  // namespace spdc
