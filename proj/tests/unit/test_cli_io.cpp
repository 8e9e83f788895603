#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "spdc/commands.hpp"
#include "spdc/errors.hpp"

using namespace spdc;

namespace {

const char* kSource = R"({
  "schema_version": 1,
  "filter": {"kind": "dwdm"},
  "pulse_gate": {"fwhm_ns": 20.3, "gate_ns": 20.0, "rep_rate_mhz": 2.0},
  "source": {"p0_i1": 0.05},
  "channels": {
    "a": {"r": 0.5, "tau": 0.602, "c_f": 0.74, "eta": 0.080, "p_dark": 1.9e-4},
    "b": {"r": 0.5, "tau": 0.616, "c_f": 0.726, "eta": 0.076, "p_dark": 1.5e-4}
  },
  "simulation": {"n_pulses": 200000, "seed": 5}
})";

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(kSource);
    REQUIRE(cfg.pulse_gate);
    CHECK(k_t(*cfg.pulse_gate) == doctest::Approx(0.75396).epsilon(1e-5));
    const auto ch = channel_params(cfg);
    CHECK(ch.a.x() == doctest::Approx(0.5 * 0.602 * 0.74 * 0.080));
    CHECK(source_p0(cfg) * 73.0 == doctest::Approx(0.05).epsilon(1e-9));
    const auto cal = calibration(cfg);
    CHECK(cal.ratio_i1_over_i2 == doctest::Approx(1.14).epsilon(1e-9));
    CHECK(cal.p_dark_b == 1.5e-4);
    REQUIRE(cal.r_tau_a);
    CHECK(*cal.r_tau_a == doctest::Approx(0.301));
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_config("{}"), ValidationError);
    CHECK_THROWS_AS(parse_config("not json"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "colour": "red"})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "filter": {"kind": "rectangular", "width": 3}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "filter": {"kind": "hexagon"}})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "source": {"p0_i1": 0.1, "p0_per_ghz": 0.01}})"),
                    ValidationError);
    CHECK_THROWS_AS(cmd_predict(parse_config(R"({"schema_version": 1})"), Format::json), ValidationError);
}

TEST_CASE("tabulated filter paths resolve against the config directory") {
    const auto cfg = parse_config(R"({"schema_version": 1, "filter": {"kind": "tabulated", "csv": "flat_top.csv"}})",
                                  SPDC_TEST_DATA_DIR);
    CHECK(transmission(cfg.filter, 0.0) == 1.0);
    CHECK(transmission(cfg.filter, 15.0) == doctest::Approx(0.5));
}

TEST_CASE("measurement CSV") {
    const std::string text =
        "label,gates,counts_a,counts_b,coincidences,fluorescence_mw\n"
        "p1,1000000,1600,1500,30,1.25\n"
        "p2,2000000,3000,2800,50,\n";
    const auto recs = parse_measurements_csv(text);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].label == "p1");
    CHECK(recs[0].coincidences == 30);
    CHECK(recs[0].fluorescence_mw == 1.25);
    CHECK_FALSE(recs[1].fluorescence_mw);
    CHECK(parse_measurements_csv(format_measurements_csv(recs)).size() == 2);
    CHECK(format_measurements_csv(parse_measurements_csv(format_measurements_csv(recs))) ==
          format_measurements_csv(recs));

    CHECK_THROWS_AS(parse_measurements_csv("label,gates,a,b,c\nx,1,0,0,0\n"), ValidationError);
    CHECK_THROWS_AS(parse_measurements_csv("label,gates,counts_a,counts_b,coincidences\nx,10,11,0,0\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_measurements_csv("label,gates,counts_a,counts_b,coincidences\nx,10,-1,0,0\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_measurements_csv("label,gates,counts_a,counts_b,coincidences\nx,10,1\n"),
                    ValidationError);
    CHECK_THROWS_AS(format_measurements_csv({{"a,b", 1, 0, 0, 0, {}}}), ValidationError);
}

TEST_CASE("filters command") {
    const auto csv = csv_rows(cmd_filters(std::nullopt, Format::csv));
    REQUIRE(csv.size() == 6);
    const std::vector<double> expected{1.0, 1.5, std::sqrt(2.0), 1.14};
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(std::stod(csv[i + 1].back()) == doctest::Approx(expected[i]).epsilon(1e-6));

    const auto empty = parse_config(R"({"schema_version": 1, "filters": []})");
    const auto table = cmd_filters(empty, Format::csv);
    CHECK(csv_rows(table).size() == 1);
    CHECK(nlohmann::json::parse(cmd_filters(empty, Format::json)).empty());

    const auto user = parse_config(R"({"schema_version": 1, "filters": [
        {"name": "t", "filter": {"kind": "trapezoid", "plateau_width_ghz": 46.1, "base_width_ghz": 99.9}}]})");
    const auto j = nlohmann::json::parse(cmd_filters(user, Format::json));
    REQUIRE(j.size() == 1);
    CHECK(j[0].at("i1_over_i2max").get<double>() == doctest::Approx(1.14).epsilon(0.005 / 1.14));
    CHECK_FALSE(cmd_filters(std::nullopt, Format::table).empty());
}

TEST_CASE("sweep command") {
    auto cfg = parse_config(R"({"schema_version": 1, "filter": {"kind": "rectangular", "full_width_ghz": 100},
        "sweep": {"d_min_ghz": -60, "d_max_ghz": 60, "n_points": 25}})");
    const auto rows = csv_rows(cmd_sweep(cfg, Format::csv));
    REQUIRE(rows.size() == 26);
    CHECK(rows[0] == std::vector<std::string>{"detuning_ghz", "transmission", "i2_over_i2max"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double d = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][2]) == doctest::Approx(std::max(0.0, 1 - std::abs(d) / 50)).epsilon(1e-6));
        // even filter: mirrored rows agree
        CHECK(rows[i][1] == rows[rows.size() - i][1]);
        CHECK(rows[i][2] == rows[rows.size() - i][2]);
    }
    cfg.sweep.n_points = 1;
    CHECK_THROWS_AS(cmd_sweep(cfg, Format::csv), ValidationError);
}

TEST_CASE("predict command") {
    const auto j = nlohmann::json::parse(cmd_predict(parse_config(kSource), Format::json));
    CHECK(j["p_a"].get<double>() - 1.9e-4 == doctest::Approx(2 * 0.05 * 0.5 * 0.602 * 0.74 * 0.080 * k_t({12.19, 20, 2})).epsilon(1e-3));
    CHECK(j["p_c"].get<double>() ==
          doctest::Approx(j["p_tc"].get<double>() + j["p_ac"].get<double>() + j["p_nab"].get<double>()));
    CHECK(csv_rows(cmd_predict(parse_config(kSource), Format::csv)).size() == 2);
}

TEST_CASE("outputs are byte-identical for identical inputs") {
    const auto cfg = parse_config(kSource);
    CHECK(cmd_simulate(cfg, Format::json) == cmd_simulate(cfg, Format::json));
    CHECK(cmd_predict(cfg, Format::json) == cmd_predict(cfg, Format::json));
    const auto recs = parse_measurements_csv(cmd_simulate(cfg, Format::csv));
    CHECK(cmd_estimate(recs, cfg, Format::json) == cmd_estimate(recs, cfg, Format::json));
    auto other = cfg;
    other.simulation.threads = 3;
    CHECK(cmd_simulate(other, Format::json) == cmd_simulate(cfg, Format::json));
    CHECK(format12(0.1 + 0.2) == "0.3");
    CHECK(round12(1.0 / 3.0) == 0.333333333333);
}

TEST_CASE("simulated CSV feeds the estimator unchanged") {
    auto cfg = parse_config(kSource);
    cfg.simulation.n_pulses = 20'000'000;
    const auto csv = cmd_simulate(cfg, Format::csv);
    const auto j = nlohmann::json::parse(cmd_estimate(parse_measurements_csv(csv), cfg, Format::json));
    REQUIRE(j.size() == 1);
    const auto ch = channel_params(cfg);
    const auto near = [](const nlohmann::json& e, double truth, double bias) {
        return std::abs(e["value"].get<double>() - truth) <= 3 * e["sigma"].get<double>() + bias * truth;
    };
    CHECK(near(j[0]["p0_i1"], 0.05, 0.05 + ch.a.x() + ch.b.x()));
    CHECK(near(j[0]["x_a"], ch.a.x(), 0.05 + ch.a.x() + ch.b.x()));
    CHECK(near(j[0]["x_b"], ch.b.x(), 0.05 + ch.a.x() + ch.b.x()));
}

TEST_CASE("format names") {
    CHECK(parse_format("json") == Format::json);
    CHECK(parse_format("table") == Format::table);
    CHECK_THROWS_AS(parse_format("xml"), ValidationError);
}
