#pragma once
// End-to-end pipeline and the certification conditions assembled into a StateReport.

#include <memory>

#include "gravistate/config.hpp"
#include "gravistate/report.hpp"
#include "gravistate/states.hpp"

namespace grav {

/// Builds the stages on first use and records how long each took.
class Pipeline {
public:
    explicit Pipeline(RunConfig cfg);
    ~Pipeline();

    const RunConfig& config() const { return cfg_; }
    const SpacetimeMetric& metric() const { return metric_; }
    const ModeBasis& modes() const { return modes_; }
    const ReducedModel& model();
    const HadamardFamily& hadamard();
    const GaugeFamily& gauge();
    const CovariancePair& covariances();

    const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }
    void add_timing(std::string stage, double seconds) { timings_.emplace_back(std::move(stage), seconds); }
    nlohmann::ordered_json geometry_echo();

private:
    RunConfig cfg_;
    SpacetimeMetric metric_;
    ModeBasis modes_;
    std::unique_ptr<ReducedModel> model_;
    std::unique_ptr<HadamardFamily> H_;
    std::unique_ptr<GaugeFamily> G_;
    std::unique_ptr<CovariancePair> C_;
    std::vector<std::pair<std::string, double>> timings_;
};

/// Deterministic subset used where a full sweep is too costly: |n| <= 1 plus a few outer modes.
std::vector<std::size_t> sample_modes(const ModeBasis& B);

Condition einstein_condition(const SpacetimeMetric& metric);
std::vector<Condition> identity_conditions(const SpacetimeMetric& metric, const ModeBasis& B, int jobs,
                                           bool with_control = true);
std::vector<Condition> cauchy_conditions(const ReducedModel& M, const ModeBasis& B, int jobs);
std::vector<Condition> projector_conditions(const HadamardFamily& H, int jobs);
std::vector<Condition> gauge_conditions(const GaugeFamily& G, int jobs);
std::vector<Condition> smoothing_conditions(Pipeline& P);
std::vector<Condition> state_conditions(const CovariancePair& C, int jobs);

/// i (phi | G phi) against phi-datum q phi-datum for a bump source, relative.
double green_identity_defect(const ReducedModel& M, const Eigen::Vector3d& kv, unsigned seed);
/// max over signs of |Lambda+-(D w, v)| for normalized bumps w, v with random unit directions.
double weak_field_defect(const CovariancePair& C, std::size_t mode, unsigned seed);

/// Per-mode norms of the wrong-frequency blocks.
std::vector<double> remainder_norms(const HadamardFamily& H, int jobs);
std::vector<double> gauge_leakage_norms(const GaugeFamily& G, int jobs);
std::vector<double> covariance_leakage_norms(const CovariancePair& C, int jobs);
std::vector<double> classical_leakage_norms(const HadamardFamily& H, int jobs);
std::vector<double> decay_norms(Pipeline& P, const std::string& quantity);

/// Full verification; the Einstein check runs first and stops the run if it fails.
StateReport certify(Pipeline& P);

}  // namespace grav
