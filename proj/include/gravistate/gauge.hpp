#pragma once
// Microlocal TT-synchronous gauge: R_Sigma, the Fredholm map R_Sigma K_Sigma and the
// gauge projection T, including the finite-dimensional corrections on singular modes.

#include <vector>

#include "gravistate/hadamard.hpp"

namespace grav {

struct GaugeOptions {
    double sing_tol = 1e-8;  // singular mode: sigma_min < sing_tol * sigma_max
    int jobs = 1;
};

/// Per-mode gauge operators, Hilbert components.
struct ModeGauge {
    Mat Ks, Kd;   // K_Sigma (20 x 8), K_Sigma^dagger (8 x 20)
    Mat Rs;       // R_Sigma (8 x 20)
    Mat RK;       // R_Sigma K_Sigma (8 x 8)
    Mat Bdiag;    // diag((ib+ + B) pi0 c1+, (ib- + B) pi0 c1-) (8 x 8)
    Vec sigma;    // singular values of RK, descending
    double lower_bound = 0;  // sigma_min(Bdiag) - |RK - Bdiag|
    bool singular = false;
    Mat ker, coker;  // orthonormal bases of Ker RK and Ker RK^* (8 x n)
};

/// v_j = R^dagger u_j and the normalized w_i with w_i^* q_{I,2} v_j = delta_ij.
/// Columns 0..p-1 of V lie outside Ran K_Sigma, the rest inside; w_i in Ker K^dagger for i < p.
struct DualFrame {
    Mat U, V, W;
    int n = 0, p = 0;
    double cond_A = 1, cond_C = 1;
};

struct ModeProjection {
    Mat T, T_reg;
    Mat pi, pi_tilde;  // on V2 data (20 x 20); pi_tilde keeps the first p terms
    Mat pi1;           // on V1 data (8 x 8), orthogonal onto Ker RK
    Mat pi2;           // on V2 data, orthogonal onto K_Sigma(Ker RK)
    DualFrame frame;
    bool singular = false;
};

class GaugeFamily {
public:
    GaugeFamily(const HadamardFamily& H, GaugeOptions opt = {});

    const HadamardFamily& hadamard() const { return *H_; }
    const GaugeOptions& options() const { return opt_; }
    std::size_t size() const { return modes_.size(); }
    const ModeGauge& mode(std::size_t i) const { return modes_.at(i); }
    const ModeProjection& projection(std::size_t i) const { return proj_.at(i); }
    std::vector<std::size_t> singular_modes() const;

    int kernel_dim() const;
    int cokernel_dim() const;
    int n() const { return cokernel_dim(); }
    int p() const;

    /// Adjoint of R_Sigma for q_{I,2} on data and the Euclidean product on C^8.
    Mat R_dagger(std::size_t i) const;

    /// Rebuilds the projection of mode i, optionally forcing the singular code path.
    ModeProjection build_projection(std::size_t i, bool singular_path) const;

private:
    void normalize_frame(DualFrame& F, const ModeGauge& g) const;

    const HadamardFamily* H_;
    GaugeOptions opt_;
    Mat qI2_;
    std::vector<ModeGauge> modes_;
    std::vector<ModeProjection> proj_;
};

/// R_Sigma f = (l pi0 c2+ f, l pi0 c2- f).
Mat build_R_sigma(const Mat& l, const Mat& c2p, const Mat& c2m);
/// Block form of the adjoint: [[d, -d], [b+ d, -b- d]] diag(J, J), d = (b+ - b-)^{-1},
/// (Jv)_tt = v_t/2, (Jv)_tS = -v_S/2, (Jv)_SS = -v_t h0/2.
Mat R_dagger_explicit(const ReducedModel& model, const Mat& bp, const Mat& bm);

/// Orthonormal basis of the null space of m (SVD, relative threshold).
Mat null_space(const Mat& m, double rel_tol = 1e-10);
/// Orthonormal basis of the range of m.
Mat range_space(const Mat& m, double rel_tol = 1e-10);
/// Moore-Penrose inverse with a relative cutoff.
Mat pinv(const Mat& m, double rel_tol = 1e-10);

/// Classical TT-synchronous gauge: trace and tSigma parts of u and of the raw d_t u vanish on Sigma.
/// R_cl f = (l f0, l (f1 + i/2 A1 f0)), T_cl = 1 - K (R_cl K)^+ R_cl.
struct ClassicalGauge {
    Mat R, RK, T;
    int obstruction = 0;  // dim Ker (R_cl K_Sigma)
    double cond = 0;      // sigma_max / sigma_min of R_cl K_Sigma on its range
};
ClassicalGauge classical_gauge(const ReducedModel& model, const Eigen::Vector3d& kv, double sing_tol = 1e-8);

}  // namespace grav
