// gravistate: command-line front end for the gauge-invariant state construction.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "gravistate/certify.hpp"

using namespace grav;

namespace {

enum Exit { kPass = 0, kCertFail = 1, kConfig = 2, kNumerical = 3 };

struct Flags {
    std::optional<std::string> geometry, p, interval, out, mode, sign, quantity, config;
    std::optional<int> kmax, jobs, order;
    std::optional<double> R, t0, threshold;
    bool timings = false;
};

RunConfig resolve(const Flags& f) {
    RunConfig c = f.config ? load_config_file(*f.config) : RunConfig{};
    if (f.geometry) c.geometry = *f.geometry;
    if (f.p) c.p = parse_triple(*f.p);
    if (f.t0) c.t0 = *f.t0;
    if (f.interval) {
        const auto pos = f.interval->find(',');
        if (pos == std::string::npos) throw ConfigError("--interval expects lo,hi");
        c.interval = {parse_number(f.interval->substr(0, pos)), parse_number(f.interval->substr(pos + 1))};
    }
    if (f.kmax) c.kmax = *f.kmax;
    if (f.R) c.R = *f.R;
    if (f.order) c.adiabatic_order = *f.order;
    if (f.threshold) c.decay_threshold = *f.threshold;
    if (f.jobs) c.jobs = *f.jobs;
    if (f.out) c.out = *f.out;
    if (f.mode) c.mode = parse_mode(*f.mode);
    if (f.sign) {
        if (*f.sign != "+" && *f.sign != "-") throw ConfigError("--sign expects + or -");
        c.sign = *f.sign == "+" ? 1 : -1;
    }
    if (f.quantity) c.quantity = *f.quantity;
    if (f.timings) c.timings = true;
    c.validate();
    return c;
}

void write_out(const RunConfig& c, const std::string& text) {
    if (c.out.empty() || c.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream o(c.out, std::ios::binary);
    if (!o) throw ConfigError("cannot write '" + c.out + "'");
    o << text;
}

// Non-Einstein backgrounds stop every subcommand before any state construction.
bool einstein_gate(const Pipeline& P) {
    const auto e = einstein_condition(P.metric());
    if (e.pass) return true;
    std::cerr << "einstein check failed: max |Ric - Lambda g| = " << e.value << "\n";
    return false;
}

int cmd_verify(Pipeline& P) {
    const StateReport r = certify(P);
    write_out(P.config(), emit(r));
    if (const Condition* f = r.first_failure()) {
        if (f->name == "einstein")
            std::cerr << "einstein check failed: max |Ric - Lambda g| = " << f->value << "\n";
        else
            std::cerr << "certification failed: " << f->name << " (" << f->property << ") = " << f->value
                      << ", required " << f->comparison << " " << f->threshold << "\n";
        return kCertFail;
    }
    std::cerr << "verify: all conditions pass (case " << r.case_tag << ")\n";
    return kPass;
}

int cmd_gauge(Pipeline& P) {
    if (!einstein_gate(P)) return kCertFail;
    const GaugeFamily& G = P.gauge();
    const HadamardFamily& H = G.hadamard();
    nlohmann::ordered_json j;
    j["geometry"] = P.geometry_echo();
    j["config"] = P.config().echo();
    j["case"] = G.singular_modes().empty() ? "regular" : "singular";
    j["kernel_dim"] = G.kernel_dim();
    j["cokernel_dim"] = G.cokernel_dim();
    j["index"] = G.kernel_dim() - G.cokernel_dim();
    j["n"] = G.n();
    j["p"] = G.p();
    auto& s = j["singular_modes"] = nlohmann::ordered_json::array();
    for (std::size_t m : G.singular_modes()) {
        const auto& g = G.mode(m);
        const auto& F = G.projection(m).frame;
        nlohmann::ordered_json e;
        e["mode"] = H.modes()[m];
        e["k"] = {H.modes().wavevector(m)(0), H.modes().wavevector(m)(1), H.modes().wavevector(m)(2)};
        e["kernel_dim"] = g.ker.cols();
        e["cokernel_dim"] = g.coker.cols();
        e["p"] = F.p;
        e["cond_A"] = F.cond_A;
        e["cond_C"] = F.cond_C;
        std::vector<double> sv;
        for (int i = 0; i < g.sigma.size(); ++i) sv.push_back(g.sigma(i).real());
        e["singular_values"] = sv;
        s.push_back(e);
    }
    // conditioning of the regular modes beyond the cutoff
    double smin = std::numeric_limits<double>::infinity(), cmax = 0, lb = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < G.size(); ++m) {
        if (G.mode(m).singular || H.modes().wavevector(m).norm() <= H.R()) continue;
        const auto& sv = G.mode(m).sigma;
        smin = std::min(smin, sv(7).real());
        cmax = std::max(cmax, sv(0).real() / sv(7).real());
        lb = std::min(lb, G.mode(m).lower_bound);
    }
    if (std::isfinite(smin)) {
        j["regular_sigma_min"] = smin;
        j["regular_cond_max"] = cmax;
        j["regular_lower_bound_min"] = lb;
    }
    write_out(P.config(), emit_json(j));
    return kPass;
}

int cmd_decay(Pipeline& P) {
    if (!einstein_gate(P)) return kCertFail;
    const auto& c = P.config();
    const auto norms = decay_norms(P, c.quantity);
    const auto fit = decay_fit(P.modes(), norms, c.decay_from, c.kmax, split_modes(P.hadamard()));
    std::string out = "n1,n2,n3,kabs,norm,included\n";
    for (const auto& row : fit.rows)
        out += std::to_string(row.mode[0]) + "," + std::to_string(row.mode[1]) + "," + std::to_string(row.mode[2]) +
               "," + format_double(row.kabs) + "," + format_double(row.norm) + "," + (row.included ? "1" : "0") + "\n";
    for (const auto& [shell, v] : fit.shell_max) out += "shell_max," + std::to_string(shell) + ",,,"+ format_double(v) + ",\n";
    std::string e = format_double(fit.exponent);
    if (e.front() == '"') e = e.substr(1, e.size() - 2);
    out += "exponent,,,," + e + ",\n";
    write_out(c, out);
    std::cerr << "decay (" << c.quantity << "): exponent " << e << "\n";
    return kPass;
}

int cmd_covariance(Pipeline& P) {
    if (!einstein_gate(P)) return kCertFail;
    const auto& c = P.config();
    const std::size_t m = P.modes().index_of(c.mode);
    const Mat& L = P.covariances().lambda(c.sign, m);
    std::string out = "row";
    for (int j = 0; j < L.cols(); ++j) out += ",re" + std::to_string(j) + ",im" + std::to_string(j);
    out += "\n";
    for (int i = 0; i < L.rows(); ++i) {
        out += std::to_string(i);
        for (int j = 0; j < L.cols(); ++j) out += "," + format_double(L(i, j).real()) + "," + format_double(L(i, j).imag());
        out += "\n";
    }
    write_out(c, out);
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gauge-invariant Hadamard states for linearized gravity on torus backgrounds"};
    app.require_subcommand(1);
    Flags f;
    auto common = [&](CLI::App* s) {
        s->add_option("--geometry", f.geometry, "static-flat | kasner | custom-sin");
        s->add_option("--p", f.p, "Kasner exponents p1,p2,p3 (fractions allowed)");
        s->add_option("--t0", f.t0, "Kasner time of the Cauchy surface");
        s->add_option("--interval", f.interval, "time interval lo,hi around the Cauchy surface");
        s->add_option("--kmax", f.kmax, "mode lattice |n| <= kmax");
        s->add_option("--R", f.R, "frequency cutoff below which b = 1");
        s->add_option("--adiabatic-order", f.order, "iterations of the Riccati refinement of b");
        s->add_option("--decay-threshold", f.threshold, "required decay exponent on non-flat geometries");
        s->add_option("--out", f.out, "output file (default stdout)");
        s->add_option("--config", f.config, "JSON config; flags override it");
        s->add_option("--jobs", f.jobs, "worker threads");
        s->add_flag("--timings", f.timings, "include stage timings in the report");
    };
    auto* verify = app.add_subcommand("verify", "build the state and write the certification report (JSON)");
    auto* gauge = app.add_subcommand("gauge", "Fredholm data of the gauge map (JSON)");
    auto* decay = app.add_subcommand("decay", "per-mode smoothing norms and fitted exponent (CSV)");
    auto* cov = app.add_subcommand("covariance", "covariance Gram matrix of one mode (CSV)");
    for (auto* s : {verify, gauge, decay, cov}) common(s);
    decay->add_option("--quantity", f.quantity, "remainder | gauge | covariance | classical");
    cov->add_option("--mode", f.mode, "mode n1,n2,n3");
    cov->add_option("--sign", f.sign, "+ or -");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kConfig;
    }
    try {
        Pipeline P(resolve(f));
        if (*verify) return cmd_verify(P);
        if (*gauge) return cmd_gauge(P);
        if (*decay) return cmd_decay(P);
        return cmd_covariance(P);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
}
