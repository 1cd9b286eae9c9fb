#pragma once
// Cauchy-surface covariances lambda+- of the gauge-invariant state and their checks.

#include <functional>
#include <vector>

#include "gravistate/gauge.hpp"

namespace grav {

/// nu = q_{I,2} - (1 - pi~)^* q_{I,2} (1 - pi~) and its spectral split.
struct NuCorrection {
    Mat nu;            // 20 x 20 Hermitian
    Vec alpha;         // kept eigenvalues (|alpha| >= drop tolerance)
    Mat u;             // matching orthonormal eigenvectors
    Mat plus, minus;   // 1_{R+}(nu) nu and 1_{R-}(nu) nu
};

struct ModeCovariance {
    Mat lp, lm;  // lambda+ and lambda- (20 x 20)
    bool singular = false;
    NuCorrection nu;
};

/// lambda+ = T^* q_{I,2} c2+ T + 1_{R+}(nu) nu, lambda- = -T^* q_{I,2} c2- T - 1_{R-}(nu) nu.
ModeCovariance build_mode_covariance(const GaugeFamily& G, std::size_t mode, const ModeProjection& pr,
                                     double drop_tol = 1e-12);

class CovariancePair {
public:
    explicit CovariancePair(const GaugeFamily& G, int jobs = 1, double drop_tol = 1e-12);

    const GaugeFamily& gauge() const { return *G_; }
    std::size_t size() const { return modes_.size(); }
    const ModeCovariance& mode(std::size_t i) const { return modes_.at(i); }
    const Mat& lambda(int sign, std::size_t i) const { return sign > 0 ? modes_.at(i).lp : modes_.at(i).lm; }

private:
    const GaugeFamily* G_;
    std::vector<ModeCovariance> modes_;
};

/// Residuals of the covariance properties on one mode, each already divided by its scale.
struct ModeChecks {
    double ccr = 0;          // |N^* (l+ - l- - q_{I,2}) N|
    double gauge = 0;        // |N^* l+- K_Sigma|
    double positivity = 0;   // min eigenvalue of N^* l+- N (scaled)
    double hermiticity = 0;  // |l+- - l+-^*|
    double consistency = 0;  // |N^* (T^* q T - (1 - pi~)^* q (1 - pi~)) N|
    double nu_ran_k = 0;     // |nu K_Sigma|
    int nu_rank = 0;
    int ker_dim = 0;         // dim Ker K_Sigma^dagger
};
ModeChecks check_mode(const CovariancePair& C, std::size_t mode);

/// Lambda+-(u, v) = (rho G u)^* lambda+- (rho G v) for reduced sources supported in [ta, tb].
cd spacetime_two_point(const CovariancePair& C, std::size_t mode, int sign,
                       const std::function<Mat(double)>& u, const std::function<Mat(double)>& v, double ta,
                       double tb);

/// Energy-norm size of a Hermitian form on V_k data: weights diag(<k>^{1/2}, <k>^{-1/2}) on both sides.
double form_norm(const Mat& form, const Eigen::Vector3d& kv, int k);
/// Wrong-frequency part of the covariances: max(|lambda+ c2-|, |lambda- c2+|) as forms.
double covariance_leakage(const CovariancePair& C, std::size_t mode);

}  // namespace grav
