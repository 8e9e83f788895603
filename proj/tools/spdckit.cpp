// spdckit: filter integrals, count prediction, pulse-level simulation and
// figure-of-merit estimation for pulsed photon-pair sources.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "spdc/commands.hpp"
#include "spdc/errors.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw spdc::ValidationError("cannot write output file: " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Characterization toolkit for pulsed SPDC photon-pair sources"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format_name;
    std::optional<std::uint64_t> seed;

    const auto common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "toolkit configuration (JSON)");
        if (config_required) opt->required();
        opt->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "write the result to a file instead of stdout");
        sub->add_option("--format", format_name, "json, csv or table")
            ->check(CLI::IsMember({"json", "csv", "table"}));
        sub->add_option("--seed", seed, "random seed (overrides simulation.seed)");
    };

    auto* filters = app.add_subcommand("filters", "I1/I2max table for the configured or built-in filters");
    common(filters, false);

    auto* sweep = app.add_subcommand("sweep", "I2/I2max and transmission versus detuning");
    common(sweep, true);
    std::optional<double> d_min;
    std::optional<double> d_max;
    std::optional<int> points;
    sweep->add_option("--d-min", d_min, "lowest detuning (GHz)");
    sweep->add_option("--d-max", d_max, "highest detuning (GHz)");
    sweep->add_option("--points", points, "number of grid points");

    auto* predict = app.add_subcommand("predict", "closed-form count and coincidence probabilities");
    common(predict, true);

    auto* simulate = app.add_subcommand("simulate", "pulse-level Monte Carlo of the configured source");
    common(simulate, true);
    std::string csv_out;
    simulate->add_option("--csv-out", csv_out, "also write the simulated measurement CSV here");

    auto* estimate = app.add_subcommand("estimate", "figures of merit from a measurement CSV");
    common(estimate, true);
    std::string measurements_path;
    estimate->add_option("measurements,--measurements", measurements_path, "measurement CSV")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto format_or = [&](spdc::Format fallback) {
            return format_name.empty() ? fallback : spdc::parse_format(format_name);
        };
        std::optional<spdc::ToolkitConfig> cfg;
        if (!config_path.empty()) cfg = spdc::load_config(config_path);
        if (cfg && seed) cfg->simulation.seed = *seed;

        if (filters->parsed()) {
            write_output(spdc::cmd_filters(cfg, format_or(spdc::Format::table)), out_path);
        } else if (sweep->parsed()) {
            if (d_min) cfg->sweep.d_min_ghz = *d_min;
            if (d_max) cfg->sweep.d_max_ghz = *d_max;
            if (points) cfg->sweep.n_points = *points;
            write_output(spdc::cmd_sweep(*cfg, format_or(spdc::Format::csv)), out_path);
        } else if (predict->parsed()) {
            write_output(spdc::cmd_predict(*cfg, format_or(spdc::Format::json)), out_path);
        } else if (simulate->parsed()) {
            const auto runs = spdc::run_simulations(*cfg);
            write_output(spdc::format_simulation(*cfg, runs, format_or(spdc::Format::json)), out_path);
            if (!csv_out.empty())
                write_output(spdc::format_simulation(*cfg, runs, spdc::Format::csv), csv_out);
        } else if (estimate->parsed()) {
            const auto records = spdc::load_measurements_csv(measurements_path);
            write_output(spdc::cmd_estimate(records, *cfg, format_or(spdc::Format::json)), out_path);
        }
    } catch (const spdc::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const spdc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
