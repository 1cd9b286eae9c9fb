#include "gravistate/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace grav {

namespace {

double to_double(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("not a number: '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> r;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) r.push_back(item);
    return r;
}

double json_number(const nlohmann::json& j, const char* key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_number(j.get<std::string>());
    throw ConfigError(std::string("config: '") + key + "' must be a number");
}

}  // namespace

double parse_number(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return to_double(s);
    const double den = to_double(std::string_view(s).substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator in '" + s + "'");
    return to_double(std::string_view(s).substr(0, slash)) / den;
}

std::array<double, 3> parse_triple(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) throw ConfigError("expected three comma-separated values: '" + s + "'");
    return {parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2])};
}

IVec3 parse_mode(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) throw ConfigError("expected a mode n1,n2,n3: '" + s + "'");
    IVec3 n{};
    for (int i = 0; i < 3; ++i) {
        const double v = to_double(parts[i]);
        if (v != std::round(v)) throw ConfigError("mode components must be integers: '" + s + "'");
        n[i] = static_cast<int>(v);
    }
    return n;
}

void RunConfig::validate() const {
    if (geometry != "static-flat" && geometry != "kasner" && geometry != "custom-sin")
        throw ConfigError("unknown geometry '" + geometry + "'");
    if (kmax < 1) throw ConfigError("kmax must be >= 1");
    // some mode must lie above the cutoff: the largest |k| on the lattice is kmax sqrt(3)
    if (!(R >= 0) || !(R < kmax * std::sqrt(3.0))) throw ConfigError("R must satisfy 0 <= R < kmax sqrt(3)");
    if (!(interval.lo < 0 && interval.hi > 0)) throw ConfigError("the interval must contain the Cauchy surface s = 0");
    if (geometry == "kasner") {
        if (!kasner_conditions_hold(p, 1e-12))
            throw ConfigError("Kasner conditions sum p = 1, sum p^2 = 1 violated at 1e-12");
        if (!(t0 + interval.lo > 0)) throw ConfigError("Kasner interval must stay at t > 0");
    }
    if (adiabatic_order < 0 || adiabatic_order > 6) throw ConfigError("adiabatic_order must be in 0..6");
    if (!(sing_tol > 0 && sing_tol < 1)) throw ConfigError("singular tolerance must be in (0, 1)");
    if (!(nu_drop_tol > 0 && nu_drop_tol < 1)) throw ConfigError("nu drop tolerance must be in (0, 1)");
    if (decay_from < 1) throw ConfigError("decay_from must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (sign != 1 && sign != -1) throw ConfigError("sign must be + or -");
    if (quantity != "remainder" && quantity != "gauge" && quantity != "covariance" && quantity != "classical")
        throw ConfigError("unknown decay quantity '" + quantity + "'");
    for (int c : mode)
        if (std::abs(c) > kmax) throw ConfigError("mode outside the lattice |n| <= kmax");
}

SpacetimeMetric RunConfig::make_metric() const {
    if (geometry == "static-flat") return SpacetimeMetric::static_flat(interval);
    if (geometry == "kasner") return SpacetimeMetric::kasner(p, t0, interval);
    return SpacetimeMetric::custom_sin(interval);
}

nlohmann::ordered_json RunConfig::echo() const {
    nlohmann::ordered_json j;
    j["geometry"] = geometry;
    if (geometry == "kasner") {
        j["p"] = p;
        j["t0"] = t0;
    }
    j["interval"] = {interval.lo, interval.hi};
    j["kmax"] = kmax;
    j["R"] = R;
    j["adiabatic_order"] = adiabatic_order;
    j["singular_tol"] = sing_tol;
    j["nu_drop_tol"] = nu_drop_tol;
    j["decay_threshold"] = decay_threshold;
    j["decay_from"] = decay_from;
    return j;
}

void apply_json(RunConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "geometry") {
            c.geometry = v.get<std::string>();
        } else if (key == "p") {
            if (v.is_string()) {
                c.p = parse_triple(v.get<std::string>());
            } else {
                if (!v.is_array() || v.size() != 3) throw ConfigError("config: 'p' must have three entries");
                for (int i = 0; i < 3; ++i) c.p[i] = json_number(v[i], "p");
            }
        } else if (key == "t0") {
            c.t0 = json_number(v, "t0");
        } else if (key == "interval") {
            if (!v.is_array() || v.size() != 2) throw ConfigError("config: 'interval' must be [lo, hi]");
            c.interval = {json_number(v[0], "interval"), json_number(v[1], "interval")};
        } else if (key == "kmax") {
            c.kmax = v.get<int>();
        } else if (key == "R") {
            c.R = json_number(v, "R");
        } else if (key == "adiabatic_order") {
            c.adiabatic_order = v.get<int>();
        } else if (key == "singular_tol") {
            c.sing_tol = json_number(v, "singular_tol");
        } else if (key == "nu_drop_tol") {
            c.nu_drop_tol = json_number(v, "nu_drop_tol");
        } else if (key == "decay_threshold") {
            c.decay_threshold = json_number(v, "decay_threshold");
        } else if (key == "decay_from") {
            c.decay_from = v.get<int>();
        } else if (key == "jobs") {
            c.jobs = v.get<int>();
        } else if (key == "timings") {
            c.timings = v.get<bool>();
        } else if (key == "out") {
            c.out = v.get<std::string>();
        } else if (key == "mode") {
            if (v.is_string()) {
                c.mode = parse_mode(v.get<std::string>());
            } else {
                if (!v.is_array() || v.size() != 3) throw ConfigError("config: 'mode' must have three entries");
                for (int i = 0; i < 3; ++i) c.mode[i] = v[i].get<int>();
            }
        } else if (key == "sign") {
            c.sign = v.is_string() ? (v.get<std::string>() == "-" ? -1 : 1) : v.get<int>();
        } else if (key == "quantity") {
            c.quantity = v.get<std::string>();
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    RunConfig c;
    try {
        apply_json(c, nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    return c;
}

}  // namespace grav
