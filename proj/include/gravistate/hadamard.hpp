#pragma once
// Square-root operators b and the Hadamard projectors c+- on Cauchy data.

#include <vector>

#include "gravistate/cauchy.hpp"

namespace grav {

struct HadamardOptions {
    double R = 1.5;           // modes with |k| <= R get the filler b = 1
    int adiabatic_order = 2;  // Riccati corrections b^2 - i b' = a beyond the frozen sqrt
    bool symmetrize = true;   // V2: b -> (b + I b I)/2
    int jobs = 1;
};

/// Principal square root; eigendecomposition, Schur when the eigenbasis is ill-conditioned.
Mat principal_sqrt(const Mat& a);
/// Taylor coefficients of sqrt(A(t)) from those of A.
std::vector<Mat> sqrt_series(const std::vector<Mat>& a);
/// b(0) for the Riccati equation b^2 - i b' = a, truncated after `order` corrections.
Mat riccati_b(const std::vector<Mat>& a_taylor, int order);

/// c+- from b+ and b- (sign = +1 or -1).
Mat hadamard_projector(const Mat& bp, const Mat& bm, int sign);

struct ModeProjectors {
    Mat bp, bm;  // b+ = b, b- = -b^star
    Mat cp, cm;
    bool filler = false;
};

class HadamardFamily {
public:
    /// Builds b on every mode of `modes`; R is raised until all non-filler modes are admissible.
    HadamardFamily(const ReducedModel& model, const ModeBasis& modes, HadamardOptions opt = {});

    double R() const { return R_; }
    double R_requested() const { return opt_.R; }
    /// min over modes and bundles of the smallest eigenvalue of (b + b^*)/2.
    double re_margin() const { return margin_; }
    const HadamardOptions& options() const { return opt_; }
    const ReducedModel& model() const { return *model_; }
    const ModeBasis& modes() const { return modes_; }

    const Mat& b(int k, std::size_t mode) const { return b_.at(k).at(mode); }
    ModeProjectors projectors(int k, std::size_t mode) const;

private:
    Mat build_b(int k, const Eigen::Vector3d& kv) const;

    const ReducedModel* model_;
    ModeBasis modes_;
    HadamardOptions opt_;
    double R_, margin_ = 0;
    std::array<std::vector<Mat>, 3> b_;
};

/// Decay of per-mode norms over the shells |n|_inf = lo..hi: max norm per shell and
/// the least-squares exponent of max-norm versus shell radius on a log-log scale.
/// Modes with include[i] == 0 are listed but left out of the shell maxima.
struct DecayReport {
    struct Row {
        IVec3 mode;
        double kabs, norm;
        bool included;
    };
    std::vector<Row> rows;
    std::vector<std::pair<int, double>> shell_max;
    double exponent = 0;
};

/// 1 on modes with |k| > R, where c+- split frequencies.
std::vector<char> split_modes(const HadamardFamily& H);
DecayReport decay_fit(const ModeBasis& modes, const std::vector<double>& norms, int lo, int hi,
                      const std::vector<char>& include = {});

/// Largest singular value.
double op_norm(const Mat& m);

/// Sobolev-weighted norm H^{s+1} -> H^s of a map from V_kin data to V_kout data.
double weighted_norm(const Mat& m, const Eigen::Vector3d& kv, int kin, int kout, double s = 1.0);

/// Sobolev-weighted norm H^s -> H^s of a map on V_k data.
double weighted_norm0(const Mat& m, const Eigen::Vector3d& kv, int k, double s = 1.0);

/// Per-mode remainder c2+ K_Sigma c1- - c2- K_Sigma c1+.
Mat smoothing_remainder(const HadamardFamily& H, std::size_t mode);

}  // namespace grav
