#include "gravistate/report.hpp"

#include <cmath>
#include <cstdio>

namespace grav {

Condition Condition::check(std::string name, std::string property, double value, std::string comparison,
                           double threshold) {
    Condition c{std::move(name), std::move(property), value, threshold, std::move(comparison), false, false};
    if (c.comparison == "lt")
        c.pass = value < threshold;
    else if (c.comparison == "le")
        c.pass = value <= threshold;
    else if (c.comparison == "gt")
        c.pass = value > threshold;
    else if (c.comparison == "ge")
        c.pass = value >= threshold;
    else if (c.comparison == "eq")
        c.pass = value == threshold;
    else
        throw std::invalid_argument("unknown comparison " + c.comparison);
    return c;
}

Condition Condition::info(std::string name, std::string property, double value) {
    return {std::move(name), std::move(property), value, 0.0, "none", true, true};
}

bool StateReport::passed() const { return first_failure() == nullptr; }

const Condition* StateReport::first_failure() const {
    for (const auto& c : conditions)
        if (!c.informational && !c.pass) return &c;
    return nullptr;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "\"nan\"";
    if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // keep it a JSON float so it parses back as a double
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace {

void write(std::string& out, const nlohmann::ordered_json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* colon = indent > 0 ? ": " : ":";
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) out += ',';
                first = false;
                out += pad + nlohmann::json(k).dump() + colon;
                write(out, v, indent, depth + 1);
            }
            out += close + '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // numeric arrays stay on one line
            bool flat = true;
            for (const auto& v : j) flat = flat && v.is_primitive();
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += flat ? ", " : ",";
                if (!flat) out += pad;
                write(out, j[i], indent, depth + 1);
            }
            out += (flat ? "" : close) + ']';
            return;
        }
        case nlohmann::json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

double read_double(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::nan("");
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        throw std::runtime_error("report: bad number '" + s + "'");
    }
    return j.get<double>();
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

std::string emit_json(const nlohmann::ordered_json& j, int indent) {
    std::string out;
    write(out, j, indent, 0);
    out += '\n';
    return out;
}

std::string emit(const StateReport& r) {
    nlohmann::ordered_json j;
    j["geometry"] = r.geometry;
    j["config"] = r.config;
    j["case"] = r.case_tag;
    j["pass"] = r.passed();
    auto& cs = j["conditions"] = nlohmann::ordered_json::array();
    for (const auto& c : r.conditions) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["property"] = c.property;
        e["residual_or_margin"] = c.value;
        e["comparison"] = c.comparison;
        e["threshold"] = c.threshold;
        e["pass"] = c.pass;
        e["informational"] = c.informational;
        cs.push_back(e);
    }
    j["notes"] = r.notes;
    if (!r.timings.empty()) {
        auto& t = j["timings"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : r.timings) t[k] = v;
    }
    return emit_json(j);
}

StateReport parse_report(const std::string& text) {
    const auto j = nlohmann::ordered_json::parse(text);
    StateReport r;
    r.geometry = j.at("geometry");
    r.config = j.at("config");
    r.case_tag = j.at("case").get<std::string>();
    for (const auto& e : j.at("conditions")) {
        Condition c;
        c.name = e.at("name").get<std::string>();
        c.property = e.at("property").get<std::string>();
        c.value = read_double(e.at("residual_or_margin"));
        c.comparison = e.at("comparison").get<std::string>();
        c.threshold = read_double(e.at("threshold"));
        c.pass = e.at("pass").get<bool>();
        c.informational = e.at("informational").get<bool>();
        r.conditions.push_back(c);
    }
    r.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("timings"))
        for (const auto& [k, v] : j.at("timings").items()) r.timings.emplace_back(k, read_double(v));
    return r;
}

bool same(const StateReport& a, const StateReport& b) {
    if (a.geometry != b.geometry || a.config != b.config || a.case_tag != b.case_tag || a.notes != b.notes)
        return false;
    if (a.conditions.size() != b.conditions.size() || a.timings.size() != b.timings.size()) return false;
    for (std::size_t i = 0; i < a.conditions.size(); ++i) {
        const auto &x = a.conditions[i], &y = b.conditions[i];
        if (x.name != y.name || x.property != y.property || !same_double(x.value, y.value) ||
            x.comparison != y.comparison || !same_double(x.threshold, y.threshold) || x.pass != y.pass ||
            x.informational != y.informational)
            return false;
    }
    for (std::size_t i = 0; i < a.timings.size(); ++i)
        if (a.timings[i].first != b.timings[i].first || !same_double(a.timings[i].second, b.timings[i].second))
            return false;
    return true;
}

}  // namespace grav
