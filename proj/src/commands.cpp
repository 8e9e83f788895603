#include "spdc/commands.hpp"

#include <cstdio>

#include "spdc/errors.hpp"

namespace spdc {

using nlohmann::ordered_json;

namespace {

std::string short_number(double v, const char* pattern = "%.4g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string optional_cell(const std::optional<double>& v) { return v ? format12(*v) : std::string(); }

}  // namespace

std::vector<FilterRow> filter_rows(const std::vector<NamedFilter>& filters,
                                   const SpectralEnvelope& envelope,
                                   const IntegralOptions& options) {
    std::vector<FilterRow> rows;
    rows.reserve(filters.size());
    for (const auto& f : filters) {
        const auto s = spectral_integrals(f.spec, envelope, 0.0, options);
        rows.push_back({f.name, describe(f.spec), fwhm(f.spec), s.i1, s.i2_max, s.ratio_i1_over_i2max});
    }
    return rows;
}

std::string cmd_filters(const std::optional<ToolkitConfig>& cfg, Format format) {
    const bool custom = cfg && cfg->filters;
    const auto filters = custom ? *cfg->filters : builtin_filters();
    const SpectralEnvelope envelope = cfg ? cfg->envelope : SpectralEnvelope{UnityEnvelope{}};
    const IntegralOptions options = cfg ? cfg->integration : IntegralOptions{};
    const auto rows = filter_rows(filters, envelope, options);

    switch (format) {
        case Format::json: {
            ordered_json out = ordered_json::array();
            for (const auto& r : rows) out.push_back(to_json(r));
            return out.dump(2) + "\n";
        }
        case Format::csv: {
            std::string out = "name,filter,fwhm_ghz,i1_ghz,i2_max_ghz,i1_over_i2max\n";
            for (const auto& r : rows)
                out += r.name + "," + quoted(r.description) + "," + format12(r.fwhm_ghz) + "," +
                       format12(r.i1_ghz) + "," + format12(r.i2_max_ghz) + "," + format12(r.ratio) + "\n";
            return out;
        }
        case Format::table: {
            std::vector<std::vector<std::string>> cells;
            for (const auto& r : rows)
                cells.push_back({r.name, r.description, short_number(r.fwhm_ghz), short_number(r.ratio, "%.3f")});
            return text_table({"filter", "shape", "bandwidth (GHz)", "I1/I2max"}, cells);
        }
    }
    return {};
}

std::string cmd_sweep(const ToolkitConfig& cfg, Format format) {
    const auto points = detuning_sweep(cfg.filter, cfg.envelope, cfg.sweep.d_min_ghz, cfg.sweep.d_max_ghz,
                                       cfg.sweep.n_points, cfg.integration);
    switch (format) {
        case Format::json: {
            ordered_json out = ordered_json::array();
            for (const auto& p : points) out.push_back(to_json(p));
            return out.dump(2) + "\n";
        }
        case Format::csv: {
            std::string out = "detuning_ghz,transmission,i2_over_i2max\n";
            for (const auto& p : points)
                out += format12(p.detuning_ghz) + "," + format12(p.transmission) + "," +
                       format12(p.i2_over_i2max) + "\n";
            return out;
        }
        case Format::table: {
            std::vector<std::vector<std::string>> cells;
            for (const auto& p : points)
                cells.push_back({short_number(p.detuning_ghz), short_number(p.transmission),
                                 short_number(p.i2_over_i2max)});
            return text_table({"detuning (GHz)", "transmission", "I2/I2max"}, cells);
        }
    }
    return {};
}

std::string cmd_predict(const ToolkitConfig& cfg, Format format) {
    const auto prediction = predict(source_params(cfg), channel_params(cfg), cfg.integration);
    const auto j = to_json(prediction);
    switch (format) {
        case Format::json:
            return j.dump(2) + "\n";
        case Format::csv: {
            std::string header;
            std::string values;
            for (const auto& [key, value] : j.items()) {
                if (key == "warnings") continue;
                header += (header.empty() ? "" : ",") + key;
                values += (values.empty() ? "" : ",") + format12(value.get<double>());
            }
            return header + "\n" + values + "\n";
        }
        case Format::table: {
            std::vector<std::vector<std::string>> cells;
            for (const auto& [key, value] : j.items()) {
                if (key == "warnings") continue;
                cells.push_back({key, format12(value.get<double>())});
            }
            std::string out = text_table({"quantity", "value"}, cells);
            for (const auto& w : prediction.warnings) out += "warning: " + w + "\n";
            return out;
        }
    }
    return {};
}

std::vector<SimulationRun> run_simulations(const ToolkitConfig& cfg) {
    const SimConfig base = sim_config(cfg);
    const auto& s = cfg.simulation;
    double i1 = 0.0;
    const auto filter_i1 = [&] {
        if (i1 == 0.0) i1 = spectral_integrals(cfg.filter, cfg.envelope, cfg.detuning_ghz, cfg.integration).i1;
        return i1;
    };

    std::vector<double> p0_values;
    if (!s.p0_per_ghz_values.empty()) {
        p0_values = s.p0_per_ghz_values;
    } else if (!s.p0_i1_values.empty()) {
        for (double v : s.p0_i1_values) p0_values.push_back(v / filter_i1());
    } else {
        p0_values.push_back(base.src.p0_per_ghz);
    }

    std::vector<SimulationRun> runs;
    const auto results = sweep_p0(base, p0_values);
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& [p0, counts] = results[k];
        runs.push_back({"sim-" + std::to_string(k), p0, p0 * filter_i1(), counts});
    }
    return runs;
}

std::vector<MeasurementRecord> to_measurements(const std::vector<SimulationRun>& runs) {
    std::vector<MeasurementRecord> out;
    for (const auto& r : runs)
        out.push_back({r.label, r.counts.n_gates, r.counts.singles_a, r.counts.singles_b, r.counts.coincidences,
                       std::nullopt});
    return out;
}

std::string format_simulation(const ToolkitConfig& cfg, const std::vector<SimulationRun>& runs,
                              Format format) {
    switch (format) {
        case Format::json: {
            ordered_json out{{"seed", cfg.simulation.seed}, {"n_pulses", cfg.simulation.n_pulses}};
            ordered_json list = ordered_json::array();
            for (const auto& r : runs) {
                ordered_json j{{"label", r.label}, {"p0_per_ghz", round12(r.p0_per_ghz)}, {"p0_i1", round12(r.p0_i1)}};
                const auto counts = to_json(r.counts);
                for (const auto& [key, value] : counts.items()) j[key] = value;
                list.push_back(std::move(j));
            }
            out["runs"] = std::move(list);
            return out.dump(2) + "\n";
        }
        case Format::csv:
            return format_measurements_csv(to_measurements(runs));
        case Format::table: {
            std::vector<std::vector<std::string>> cells;
            for (const auto& r : runs)
                cells.push_back({r.label, short_number(r.p0_i1), std::to_string(r.counts.n_gates),
                                 short_number(r.counts.p_a()), short_number(r.counts.p_b()),
                                 short_number(r.counts.p_c())});
            return text_table({"label", "p0*I1", "gates", "P_A", "P_B", "P_C"}, cells);
        }
    }
    return {};
}

std::string cmd_simulate(const ToolkitConfig& cfg, Format format) {
    return format_simulation(cfg, run_simulations(cfg), format);
}

std::string cmd_estimate(const std::vector<MeasurementRecord>& records, const ToolkitConfig& cfg,
                         Format format) {
    const Calibration cal = calibration(cfg);
    std::vector<PerformanceReport> reports;
    reports.reserve(records.size());
    for (const auto& m : records) reports.push_back(estimate(m, cal));

    switch (format) {
        case Format::json: {
            ordered_json out = ordered_json::array();
            for (const auto& r : reports) out.push_back(to_json(r));
            return out.dump(2) + "\n";
        }
        case Format::csv: {
            std::string out =
                "label,p0_i1,p0_i1_sigma,x_a,x_a_sigma,x_b,x_b_sigma,f_sys,f_sys_sigma,f_spdc,f_spdc_sigma,"
                "bell_margin,c_f_a,c_f_b,p_tc,p_ac,p_nab\n";
            for (const auto& r : reports) {
                out += r.label;
                for (const double v : {r.p0_i1.value, r.p0_i1.sigma, r.x_a.value, r.x_a.sigma, r.x_b.value,
                                       r.x_b.sigma, r.f_sys.value, r.f_sys.sigma, r.f_spdc.value, r.f_spdc.sigma,
                                       r.bell_margin})
                    out += "," + format12(v);
                out += "," + optional_cell(r.c_f_a) + "," + optional_cell(r.c_f_b);
                for (const double v : {r.p_tc, r.p_ac, r.p_nab}) out += "," + format12(v);
                out += "\n";
            }
            return out;
        }
        case Format::table: {
            std::vector<std::vector<std::string>> cells;
            for (const auto& r : reports) {
                cells.push_back({r.label, short_number(r.p0_i1.value) + " +/- " + short_number(r.p0_i1.sigma, "%.2g"),
                                 short_number(r.x_a.value) + " +/- " + short_number(r.x_a.sigma, "%.2g"),
                                 short_number(r.x_b.value) + " +/- " + short_number(r.x_b.sigma, "%.2g"),
                                 short_number(r.f_sys.value, "%.4f"), short_number(r.f_spdc.value, "%.4f"),
                                 r.c_f_a ? short_number(*r.c_f_a, "%.3f") : "-"});
            }
            std::string out = text_table({"label", "p0*I1", "X_A", "X_B", "F_sys", "F_SPDC", "C_F(A)"}, cells);
            if (!reports.empty()) {
                out += "Bell limit on p0*I1 (source fidelity): " + short_number(reports.front().bell_threshold_spdc) + "\n";
            }
            for (const auto& r : reports)
                for (const auto& w : r.warnings) out += "warning [" + r.label + "]: " + w + "\n";
            return out;
        }
    }
    return {};
}

}  // namespace spdc
