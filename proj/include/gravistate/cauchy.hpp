#pragma once
// Reduced per-mode dynamics, Cauchy data and the Cauchy-surface operators.
//
// Cauchy data of a reduced section v at time s are f = (v(s), -i v'(s)).

#include <functional>
#include <vector>

#include "gravistate/field_ops.hpp"

namespace grav {

struct ModelOptions {
    int jet_terms = 12;   // Taylor terms used for curvature when building a-jets
    int cheb_nodes = 48;  // Chebyshev nodes for the time tables of a(t;k)
    double ode_abs = 1e-12;
    double ode_rel = 1e-10;
};

/// Everything about one geometry that does not depend on the mode, with the
/// mode dependence of reduced operators stored as quadratic polynomials in k.
class ReducedModel {
public:
    explicit ReducedModel(const SpacetimeMetric& metric, ModelOptions opt = {});

    const SpacetimeMetric& metric() const { return metric_; }
    const Reduction& reduction() const { return red_; }
    const ModelOptions& options() const { return opt_; }
    bool is_einstein() const { return einstein_; }

    /// a_k(0;k) in Hilbert components, k = 1, 2.
    Mat a0(int k, const Eigen::Vector3d& kv) const { return a_taylor_.at(k).at(0)(kv); }
    /// Taylor coefficients of a_k(t;k) at t = 0.
    std::vector<Mat> a_taylor(int k, const Eigen::Vector3d& kv) const;
    int a_taylor_terms(int k) const { return static_cast<int>(a_taylor_.at(k).size()); }

    const std::vector<double>& nodes() const { return nodes_; }
    std::vector<Mat> a_nodes(int k, const Eigen::Vector3d& kv) const;

    Mat K_sigma(const Eigen::Vector3d& kv) const;         // 20 x 8
    Mat K_sigma_dagger(const Eigen::Vector3d& kv) const;  // 8 x 20
    /// Reduced K at t = 0 as L0 + L1 d_t; index 0..3 = L0, L0', L1, L1'.
    Mat K_reduced(int which, const Eigen::Vector3d& kv) const { return kred_[which](kv); }
    Mat Kstar_reduced(int which, const Eigen::Vector3d& kv) const { return dred_[which](kv); }

    const Mat& I_tilde() const { return itilde_; }
    Mat I_sigma() const;
    static Mat q(int k);
    Mat q_I2() const;
    static Mat q_tilde(int n);

    /// l u = (1/2 (g0|u), 2 u_tSigma) from V2 to V1, Hilbert components (4 x 10).
    const Mat& l() const { return l_; }
    /// B = [[1/2 tr r0, delta_S], [d_S, -1/2 tr r0 - r0]], r0 = 1/2 h0' h0^{-1} (Hilbert, 4 x 4).
    Mat B(const Eigen::Vector3d& kv) const;
    const Eigen::Matrix3d& h0() const { return h0_; }
    const Eigen::Matrix3d& r0() const { return r0_; }

private:
    SpacetimeMetric metric_;
    ModelOptions opt_;
    Reduction red_;
    bool einstein_;
    Eigen::Matrix3d h0_, r0_;
    std::array<std::vector<KPoly>, 3> a_taylor_;
    std::vector<double> nodes_;
    std::array<std::vector<KPoly>, 3> a_nodes_;
    std::array<KPoly, 4> kred_, dred_;
    Mat itilde_, l_;
};

/// Cauchy operator of a reduced first-order L = L0 + L1 d_t at t = 0, acting on solutions
/// of d_t^2 + a_in: rho_out L U_in.
Mat cauchy_operator(const Mat& L0, const Mat& L0d, const Mat& L1, const Mat& L1d, const Mat& a_in);

/// Time evolution of one mode.
class ModeDynamics {
public:
    ModeDynamics(const ReducedModel& model, int k, const Eigen::Vector3d& kv);

    int dim() const { return n_; }
    Mat a(double s) const;  // barycentric interpolation of the node table

    /// Propagates data (2n x m) from s0 to s1.
    Mat evolve(const Mat& data, double s0, double s1) const;
    /// Solves v'' + a v = F from s0 with the given data; returns data at s1. F(s) is n x m.
    Mat evolve_with_source(const Mat& data, const std::function<Mat(double)>& F, double s0, double s1) const;
    /// rho G F at t = 0 for a source supported in [ta, tb].
    Mat causal_data(const std::function<Mat(double)>& F, double ta, double tb) const;

private:
    const ReducedModel* model_;
    int n_;
    std::vector<Mat> table_;
    std::vector<double> bw_;
    double abs_tol_, rel_tol_;
};

/// Per-mode Sobolev weights diag(<k>^s, <k>^{s-1}) on Cauchy data of fiber dimension n.
Mat sobolev_weight(const Eigen::Vector3d& kv, double s, int n);
double japanese(const Eigen::Vector3d& kv);

}  // namespace grav
