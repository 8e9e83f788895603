#include "spdc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "spdc/errors.hpp"

namespace spdc {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* a) { return key == a; });
        if (!known) throw ValidationError(where + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, key, where);
}

std::uint64_t unsigned_integer(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned())
        throw ValidationError(where + ": '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

Interval interval(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ValidationError(where + ": expected [lo, hi]");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ValidationError(where + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<TabulatedPoint> point_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where + ": expected [[offset, value], ...]");
    std::vector<TabulatedPoint> out;
    for (const auto& p : v) {
        const auto pair = interval(p, where);
        out.push_back({pair.lo, pair.hi});
    }
    return out;
}

FilterSpec parse_filter(const json& j, const std::filesystem::path& base, const std::string& where) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ValidationError(where + ": filter needs a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    FilterSpec spec{Rectangular{1.0}, optional_number(j, "center_thz", where)};
    if (kind == "rectangular") {
        check_keys(j, {"kind", "center_thz", "full_width_ghz"}, where);
        spec.shape = Rectangular{number(j, "full_width_ghz", where)};
    } else if (kind == "triangular") {
        check_keys(j, {"kind", "center_thz", "base_half_width_ghz"}, where);
        spec.shape = Triangular{number(j, "base_half_width_ghz", where)};
    } else if (kind == "gaussian") {
        check_keys(j, {"kind", "center_thz", "one_over_e_half_width_ghz"}, where);
        spec.shape = Gaussian{number(j, "one_over_e_half_width_ghz", where)};
    } else if (kind == "trapezoid") {
        check_keys(j, {"kind", "center_thz", "plateau_width_ghz", "base_width_ghz", "calibrate"}, where);
        if (j.contains("calibrate")) {
            if (j.contains("plateau_width_ghz") || j.contains("base_width_ghz"))
                throw ValidationError(where + ": give either widths or 'calibrate', not both");
            const auto& c = j.at("calibrate");
            check_keys(c, {"fwhm_ghz", "ratio"}, where + ".calibrate");
            spec.shape = calibrate_trapezoid(number(c, "fwhm_ghz", where), number(c, "ratio", where));
        } else {
            spec.shape = Trapezoid{number(j, "plateau_width_ghz", where), number(j, "base_width_ghz", where)};
        }
    } else if (kind == "dwdm") {
        check_keys(j, {"kind", "center_thz"}, where);
        spec.shape = default_dwdm().shape;
    } else if (kind == "fabry_perot") {
        check_keys(j, {"kind", "center_thz", "fsr_ghz", "finesse"}, where);
        spec.shape = FabryPerot{number(j, "fsr_ghz", where), number(j, "finesse", where)};
    } else if (kind == "cascade") {
        check_keys(j, {"kind", "center_thz", "members"}, where);
        if (!j.contains("members") || !j.at("members").is_array())
            throw ValidationError(where + ": cascade needs a 'members' array");
        Cascade cascade;
        int i = 0;
        for (const auto& m : j.at("members"))
            cascade.members.push_back(parse_filter(m, base, where + ".members[" + std::to_string(i++) + "]"));
        spec.shape = std::move(cascade);
    } else if (kind == "tabulated") {
        check_keys(j, {"kind", "center_thz", "csv", "points"}, where);
        if (j.contains("csv") == j.contains("points"))
            throw ValidationError(where + ": tabulated filter needs exactly one of 'csv' or 'points'");
        if (j.contains("csv")) {
            if (!j.at("csv").is_string()) throw ValidationError(where + ": 'csv' must be a path");
            std::filesystem::path p = j.at("csv").get<std::string>();
            if (p.is_relative()) p = base / p;
            if (!std::filesystem::exists(p))
                throw ValidationError(where + ": tabulated file not found: " + p.string());
            spec.shape = load_tabulated_csv(p.string());
        } else {
            spec.shape = Tabulated{point_list(j.at("points"), where + ".points")};
        }
    } else {
        throw ValidationError(where + ": unknown filter kind '" + kind + "'");
    }
    validate(spec);
    return spec;
}

SpectralEnvelope parse_envelope(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ValidationError(where + ": envelope needs a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    SpectralEnvelope env;
    if (kind == "unity") {
        check_keys(j, {"kind"}, where);
        env = UnityEnvelope{};
    } else if (kind == "gaussian") {
        check_keys(j, {"kind", "fwhm_ghz", "center_thz"}, where);
        env = GaussianEnvelope{number(j, "fwhm_ghz", where), optional_number(j, "center_thz", where)};
    } else if (kind == "tabulated") {
        check_keys(j, {"kind", "points"}, where);
        if (!j.contains("points")) throw ValidationError(where + ": missing 'points'");
        env = TabulatedEnvelope{point_list(j.at("points"), where + ".points")};
    } else {
        throw ValidationError(where + ": unknown envelope kind '" + kind + "'");
    }
    validate(env);
    return env;
}

ChannelSection parse_channel(const json& j, const std::string& where) {
    check_keys(j, {"r", "t", "tau", "c_f", "eta", "p_dark"}, where);
    ChannelSection c{};
    c.channel.r = number(j, "r", where);
    c.channel.eta = number(j, "eta", where);
    c.channel.p_dark = number(j, "p_dark", where);
    c.tau = optional_number(j, "tau", where);
    c.c_f = optional_number(j, "c_f", where);
    if (j.contains("t")) {
        if (c.tau || c.c_f) throw ValidationError(where + ": give either 't' or ('tau', 'c_f')");
        c.channel.t = number(j, "t", where);
    } else {
        if (!c.tau || !c.c_f) throw ValidationError(where + ": missing 't' (or both 'tau' and 'c_f')");
        c.channel.t = *c.tau * *c.c_f;
    }
    return c;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::uint64_t parse_count(const std::string& s, const std::string& where) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError(where + ": '" + s + "' is not a non-negative integer");
    return v;
}

}  // namespace

ToolkitConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, {"schema_version", "filters", "filter", "envelope", "detuning_ghz",
                      "integration", "pulse_gate", "source", "channels", "calibration",
                      "simulation", "sweep"},
               "config");
    if (!root.contains("schema_version")) throw ValidationError("config: missing 'schema_version'");
    const auto& version = root.at("schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
        throw ValidationError("config: unsupported schema_version (expected " +
                              std::to_string(kSchemaVersion) + ")");

    ToolkitConfig cfg;
    if (root.contains("filters")) {
        const auto& list = root.at("filters");
        if (!list.is_array()) throw ValidationError("config.filters: expected an array");
        std::vector<NamedFilter> filters;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "config.filters[" + std::to_string(i) + "]";
            check_keys(list[i], {"name", "filter"}, where);
            if (!list[i].contains("name") || !list[i].at("name").is_string() || !list[i].contains("filter"))
                throw ValidationError(where + ": needs 'name' and 'filter'");
            filters.push_back({list[i].at("name").get<std::string>(),
                               parse_filter(list[i].at("filter"), base_dir, where + ".filter")});
        }
        cfg.filters = std::move(filters);
    }
    if (root.contains("filter")) cfg.filter = parse_filter(root.at("filter"), base_dir, "config.filter");
    if (root.contains("envelope")) cfg.envelope = parse_envelope(root.at("envelope"), "config.envelope");
    if (root.contains("detuning_ghz")) cfg.detuning_ghz = number(root, "detuning_ghz", "config");

    if (root.contains("integration")) {
        const auto& j = root.at("integration");
        check_keys(j, {"relative_tolerance", "band_ghz"}, "config.integration");
        if (j.contains("relative_tolerance"))
            cfg.integration.relative_tolerance = number(j, "relative_tolerance", "config.integration");
        if (j.contains("band_ghz")) cfg.integration.band = interval(j.at("band_ghz"), "config.integration.band_ghz");
    }

    if (root.contains("pulse_gate")) {
        const auto& j = root.at("pulse_gate");
        const std::string where = "config.pulse_gate";
        check_keys(j, {"delta_t_ns", "fwhm_ns", "gate_ns", "rep_rate_mhz"}, where);
        if (j.contains("delta_t_ns") == j.contains("fwhm_ns"))
            throw ValidationError(where + ": give exactly one of 'delta_t_ns' or 'fwhm_ns'");
        const double delta_t = j.contains("delta_t_ns") ? number(j, "delta_t_ns", where)
                                                        : fwhm_to_delta_t(number(j, "fwhm_ns", where));
        PulseGate pg{delta_t, number(j, "gate_ns", where), number(j, "rep_rate_mhz", where)};
        validate(pg);
        cfg.pulse_gate = pg;
    }

    if (root.contains("source")) {
        const auto& j = root.at("source");
        check_keys(j, {"p0_per_ghz", "p0_i1"}, "config.source");
        cfg.source.p0_per_ghz = optional_number(j, "p0_per_ghz", "config.source");
        cfg.source.p0_i1 = optional_number(j, "p0_i1", "config.source");
        if (cfg.source.p0_per_ghz.has_value() == cfg.source.p0_i1.has_value())
            throw ValidationError("config.source: give exactly one of 'p0_per_ghz' or 'p0_i1'");
    }

    if (root.contains("channels")) {
        const auto& j = root.at("channels");
        check_keys(j, {"a", "b"}, "config.channels");
        if (!j.contains("a") || !j.contains("b"))
            throw ValidationError("config.channels: both 'a' and 'b' are required");
        cfg.channel_a = parse_channel(j.at("a"), "config.channels.a");
        cfg.channel_b = parse_channel(j.at("b"), "config.channels.b");
        validate(ChannelParams{cfg.channel_a->channel, cfg.channel_b->channel});
    }

    if (root.contains("calibration")) {
        const auto& j = root.at("calibration");
        const std::string where = "config.calibration";
        check_keys(j, {"ratio_i1_over_i2", "k_t", "p_dark_a", "p_dark_b", "r_tau_a", "r_tau_b", "eta_a", "eta_b"},
                   where);
        auto& c = cfg.calibration;
        c.ratio_i1_over_i2 = optional_number(j, "ratio_i1_over_i2", where);
        c.k_t = optional_number(j, "k_t", where);
        c.p_dark_a = optional_number(j, "p_dark_a", where);
        c.p_dark_b = optional_number(j, "p_dark_b", where);
        c.r_tau_a = optional_number(j, "r_tau_a", where);
        c.r_tau_b = optional_number(j, "r_tau_b", where);
        c.eta_a = optional_number(j, "eta_a", where);
        c.eta_b = optional_number(j, "eta_b", where);
    }

    if (root.contains("simulation")) {
        const auto& j = root.at("simulation");
        const std::string where = "config.simulation";
        check_keys(j, {"n_pulses", "seed", "band_ghz", "threads", "p0_per_ghz_values", "p0_i1_values"}, where);
        auto& s = cfg.simulation;
        if (j.contains("n_pulses")) s.n_pulses = unsigned_integer(j, "n_pulses", where);
        if (j.contains("seed")) s.seed = unsigned_integer(j, "seed", where);
        if (j.contains("threads")) s.threads = static_cast<unsigned>(unsigned_integer(j, "threads", where));
        if (j.contains("band_ghz")) s.band = interval(j.at("band_ghz"), where + ".band_ghz");
        if (j.contains("p0_per_ghz_values"))
            s.p0_per_ghz_values = number_list(j.at("p0_per_ghz_values"), where + ".p0_per_ghz_values");
        if (j.contains("p0_i1_values"))
            s.p0_i1_values = number_list(j.at("p0_i1_values"), where + ".p0_i1_values");
        if (!s.p0_per_ghz_values.empty() && !s.p0_i1_values.empty())
            throw ValidationError(where + ": give at most one of 'p0_per_ghz_values' or 'p0_i1_values'");
        if (s.n_pulses < 1) throw ValidationError(where + ": n_pulses must be positive");
    }

    if (root.contains("sweep")) {
        const auto& j = root.at("sweep");
        const std::string where = "config.sweep";
        check_keys(j, {"d_min_ghz", "d_max_ghz", "n_points"}, where);
        if (j.contains("d_min_ghz")) cfg.sweep.d_min_ghz = number(j, "d_min_ghz", where);
        if (j.contains("d_max_ghz")) cfg.sweep.d_max_ghz = number(j, "d_max_ghz", where);
        if (j.contains("n_points")) cfg.sweep.n_points = static_cast<int>(unsigned_integer(j, "n_points", where));
    }
    return cfg;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

const PulseGate& require_pulse_gate(const ToolkitConfig& cfg) {
    if (!cfg.pulse_gate) throw ValidationError("config: 'pulse_gate' section is required");
    return *cfg.pulse_gate;
}

ChannelParams channel_params(const ToolkitConfig& cfg) {
    if (!cfg.channel_a || !cfg.channel_b) throw ValidationError("config: 'channels' section is required");
    return {cfg.channel_a->channel, cfg.channel_b->channel};
}

double source_p0(const ToolkitConfig& cfg) {
    if (cfg.source.p0_per_ghz) return *cfg.source.p0_per_ghz;
    if (!cfg.source.p0_i1) throw ValidationError("config: 'source' section is required");
    const auto integrals = spectral_integrals(cfg.filter, cfg.envelope, cfg.detuning_ghz, cfg.integration);
    return *cfg.source.p0_i1 / integrals.i1;
}

SourceParams source_params(const ToolkitConfig& cfg) {
    return SourceParams{source_p0(cfg), cfg.filter, cfg.envelope, cfg.detuning_ghz, require_pulse_gate(cfg)};
}

SimConfig sim_config(const ToolkitConfig& cfg) {
    SimConfig sim{source_params(cfg), channel_params(cfg), cfg.simulation.n_pulses, cfg.simulation.seed,
                  cfg.simulation.band, cfg.simulation.threads};
    return sim;
}

Calibration calibration(const ToolkitConfig& cfg) {
    const auto& o = cfg.calibration;
    Calibration cal{};
    if (o.ratio_i1_over_i2) {
        cal.ratio_i1_over_i2 = *o.ratio_i1_over_i2;
    } else {
        const auto integrals = spectral_integrals(cfg.filter, cfg.envelope, cfg.detuning_ghz, cfg.integration);
        if (!(integrals.i2 > 0.0)) throw ValidationError("I2 vanishes at the operating detuning");
        cal.ratio_i1_over_i2 = integrals.i1 / integrals.i2;
    }
    cal.k_t = o.k_t ? *o.k_t : k_t(require_pulse_gate(cfg));

    const auto dark = [&](const std::optional<double>& override_value,
                          const std::optional<ChannelSection>& ch, const char* name) {
        if (override_value) return *override_value;
        if (!ch) throw ValidationError(std::string("config: dark-count probability for channel ") + name +
                                       " needs 'channels' or 'calibration.p_dark_" + name + "'");
        return ch->channel.p_dark;
    };
    cal.p_dark_a = dark(o.p_dark_a, cfg.channel_a, "a");
    cal.p_dark_b = dark(o.p_dark_b, cfg.channel_b, "b");

    const auto r_tau = [](const std::optional<double>& override_value,
                          const std::optional<ChannelSection>& ch) -> std::optional<double> {
        if (override_value) return override_value;
        if (ch && ch->tau) return ch->channel.r * *ch->tau;
        return std::nullopt;
    };
    cal.r_tau_a = r_tau(o.r_tau_a, cfg.channel_a);
    cal.r_tau_b = r_tau(o.r_tau_b, cfg.channel_b);
    cal.eta_a = o.eta_a ? o.eta_a : (cfg.channel_a ? std::optional(cfg.channel_a->channel.eta) : std::nullopt);
    cal.eta_b = o.eta_b ? o.eta_b : (cfg.channel_b ? std::optional(cfg.channel_b->channel.eta) : std::nullopt);
    validate(cal);
    return cal;
}

std::vector<MeasurementRecord> parse_measurements_csv(const std::string& text) {
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    bool has_fluorescence = false;
    std::vector<MeasurementRecord> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        const std::string where = "measurements:" + std::to_string(line_no);
        if (!header_seen) {
            const std::vector<std::string> base{"label", "gates", "counts_a", "counts_b", "coincidences"};
            auto with_fluo = base;
            with_fluo.push_back("fluorescence_mw");
            if (fields == base) {
                has_fluorescence = false;
            } else if (fields == with_fluo) {
                has_fluorescence = true;
            } else {
                throw ValidationError(where + ": expected header 'label,gates,counts_a,counts_b,coincidences"
                                              "[,fluorescence_mw]'");
            }
            header_seen = true;
            continue;
        }
        const std::size_t expected = has_fluorescence ? 6 : 5;
        if (fields.size() != expected)
            throw ValidationError(where + ": expected " + std::to_string(expected) + " fields");
        MeasurementRecord m;
        m.label = fields[0];
        m.gates = parse_count(fields[1], where);
        m.counts_a = parse_count(fields[2], where);
        m.counts_b = parse_count(fields[3], where);
        m.coincidences = parse_count(fields[4], where);
        if (has_fluorescence && !fields[5].empty()) {
            double v = 0.0;
            const auto& s = fields[5];
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size())
                throw ValidationError(where + ": fluorescence_mw '" + s + "' is not a number");
            m.fluorescence_mw = v;
        }
        validate(m);
        out.push_back(std::move(m));
    }
    if (!header_seen) throw ValidationError("measurements: missing header row");
    return out;
}

std::vector<MeasurementRecord> load_measurements_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open measurement file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_measurements_csv(buf.str());
}

std::string format_measurements_csv(const std::vector<MeasurementRecord>& records) {
    const bool fluo = std::any_of(records.begin(), records.end(),
                                  [](const MeasurementRecord& m) { return m.fluorescence_mw.has_value(); });
    std::string out = "label,gates,counts_a,counts_b,coincidences";
    out += fluo ? ",fluorescence_mw\n" : "\n";
    for (const auto& m : records) {
        if (m.label.find_first_of(",\n\r") != std::string::npos)
            throw ValidationError("measurement labels must not contain commas or newlines");
        out += m.label + "," + std::to_string(m.gates) + "," + std::to_string(m.counts_a) + "," +
               std::to_string(m.counts_b) + "," + std::to_string(m.coincidences);
        if (fluo) {
            out += ",";
            if (m.fluorescence_mw) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.12g", *m.fluorescence_mw);
                out += buf;
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace spdc
