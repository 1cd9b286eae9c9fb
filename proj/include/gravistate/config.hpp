#pragma once
// Run configuration: JSON file plus command-line overrides, validated on load.

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

#include "gravistate/geometry.hpp"

namespace grav {

struct RunConfig {
    std::string geometry = "static-flat";  // static-flat | kasner | custom-sin
    std::array<double, 3> p = {2.0 / 3, 2.0 / 3, -1.0 / 3};
    double t0 = 1.0;
    Interval interval{};
    int kmax = 3;
    double R = 1.5;
    int adiabatic_order = 2;
    double sing_tol = 1e-8;
    double nu_drop_tol = 1e-12;
    double decay_threshold = 4.0;
    int decay_from = 2;  // first shell of the decay fits
    int jobs = 1;
    bool timings = false;
    std::string out;

    // subcommand extras
    IVec3 mode = {0, 0, 0};
    int sign = +1;
    std::string quantity = "remainder";  // decay: remainder | gauge | covariance | classical

    /// Throws ConfigError on any violated condition.
    void validate() const;
    SpacetimeMetric make_metric() const;

    /// Canonical echo: every parameter that influences results (not jobs, out or timings).
    nlohmann::ordered_json echo() const;
};

/// Reads the keys present in j on top of c; unknown keys are an error.
void apply_json(RunConfig& c, const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

/// "2/3" or "0.5"; throws ConfigError.
double parse_number(const std::string& s);
std::array<double, 3> parse_triple(const std::string& s);
IVec3 parse_mode(const std::string& s);

}  // namespace grav
