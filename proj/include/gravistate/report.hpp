#pragma once
// Structured verification results and their JSON form.

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace grav {

/// One checked property. value is a residual (compared "lt"/"le"), a margin ("ge"/"gt") or a count ("eq").
struct Condition {
    std::string name;
    std::string property;  // the statement being checked
    double value = 0;
    double threshold = 0;
    std::string comparison = "lt";
    bool pass = false;
    bool informational = false;  // recorded, never affects the verdict

    static Condition check(std::string name, std::string property, double value, std::string comparison,
                           double threshold);
    static Condition info(std::string name, std::string property, double value);
};

struct StateReport {
    nlohmann::ordered_json geometry;
    nlohmann::ordered_json config;
    std::string case_tag;  // "regular" | "singular" | "" when construction did not start
    std::vector<Condition> conditions;
    std::vector<std::string> notes;
    std::vector<std::pair<std::string, double>> timings;  // empty unless requested

    void add(Condition c) { conditions.push_back(std::move(c)); }
    void add(const std::vector<Condition>& cs) { conditions.insert(conditions.end(), cs.begin(), cs.end()); }
    bool passed() const;
    /// First non-informational condition that fails, or nullptr.
    const Condition* first_failure() const;
};

/// JSON text with every double written to 17 significant digits; inf and nan become strings.
std::string emit(const StateReport& r);
StateReport parse_report(const std::string& text);
/// Field-wise equality; nan equals nan.
bool same(const StateReport& a, const StateReport& b);

/// 17-digit serializer for arbitrary JSON values (used for every JSON artifact).
std::string emit_json(const nlohmann::ordered_json& j, int indent = 2);
std::string format_double(double x);

}  // namespace grav
