#pragma once
// Differential operators of linearized gravity on a single Fourier mode, as
// polynomials in d/dt with jet-valued matrix coefficients.

#include <functional>
#include <vector>

#include "gravistate/geometry.hpp"
#include "gravistate/jet.hpp"
#include "gravistate/tensor_algebra.hpp"

namespace grav {

/// L = sum_j A_j(t) d_t^j, each A_j a jet at a fixed time.
class DiffOp {
public:
    DiffOp() = default;
    DiffOp(int rows, int cols, int terms);
    static DiffOp multiplication(const Jet& m);
    static DiffOp dt(int n, int terms);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int order() const { return static_cast<int>(A_.size()) - 1; }
    int terms() const;

    const Jet& coef(int j) const { return A_.at(j); }
    Jet& coef(int j) { return A_.at(j); }
    void set_coef(int j, const Jet& a);

    DiffOp operator*(const DiffOp& o) const;  // composition
    DiffOp operator+(const DiffOp& o) const;
    DiffOp operator-(const DiffOp& o) const;
    DiffOp operator*(cd s) const;
    DiffOp operator-() const { return *this * cd(-1.0); }

    DiffOp lmul(const Mat& m) const;  // m o L
    DiffOp rmul(const Mat& m) const;  // L o m

    /// Largest |entry| of the coefficient values at the expansion point.
    double max_abs() const;

    /// Applies L to a section given as a (cols x 1) jet.
    Jet apply(const Jet& section) const;

    /// Formal adjoint for the constant forms u^* tau_in v (domain) and tau_out (codomain).
    DiffOp formal_adjoint(const Mat& tau_in, const Mat& tau_out) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Jet> A_;
};

/// Residual ||L - M|| / max(1, ||L||, ||M||) on coefficient values.
double op_residual(const DiffOp& L, const DiffOp& M);

/// Raw operators on a mode with wavevector k at reduced time s.
class FieldOps {
public:
    FieldOps(const SpacetimeMetric& metric, double s, const Eigen::Vector3d& k, int terms = 8);

    const CurvaturePack& curvature() const { return cp_; }
    const Eigen::Vector3d& wavevector() const { return k_; }
    double lambda() const { return lambda_; }

    DiffOp nabla(int rank) const;        // rank r full -> rank r+1 full
    DiffOp trace_nabla(int rank) const;  // rank r+1 full -> rank r full: g^{ab} nabla_a X_b...

    DiffOp d(int k) const;      // V_k -> V_{k+1}, k = 0, 1
    DiffOp delta(int k) const;  // V_k -> V_{k-1}, k = 1, 2
    DiffOp box(int k) const;
    DiffOp K() const;
    DiffOp Kstar() const;
    DiffOp D(int k) const;  // D_k = D_{k,L} - 2 Lambda
    DiffOp P() const;
    DiffOp I() const;
    DiffOp Riem() const;
    DiffOp g_pairing() const;  // u -> (g|u)_{V2}
    DiffOp g_insert() const;   // f -> f g

    Jet gram(int k) const;

private:
    CurvaturePack cp_;
    Eigen::Vector3d k_;
    double lambda_;
    int terms_;
};

/// Conjugation into the reduced trivialization u = W(t) S v.
/// W solves W' = -1/2 A_1 W, W(0) = 1, with A_1 the d_t coefficient of raw D_k.
class Reduction {
public:
    explicit Reduction(const SpacetimeMetric& metric, int terms = 8);

    const SpacetimeMetric& metric() const { return metric_; }
    int terms() const { return terms_; }
    const Mat& S(int k) const { return S_.at(k); }
    const Mat& Sinv(int k) const { return Sinv_.at(k); }

    /// W_k(s), integrated from 0 with an adaptive Runge-Kutta method.
    Mat W(int k, double s) const;
    /// W_k at several times, integrating outward from 0 once per side.
    std::vector<Mat> W_at(int k, const std::vector<double>& s) const;
    /// Closed form for StaticFlat and diagonal Kasner.
    static Mat W_closed_form(const SpacetimeMetric& metric, int k, double s);
    Jet W_jet(int k, double s, const Mat& W_at_s, int terms) const;

    /// Reduced form of a raw operator V_kin -> V_kout at s.
    DiffOp reduce(const DiffOp& raw, int kin, int kout, double s) const;
    DiffOp reduce(const DiffOp& raw, int kin, int kout, double s, const Mat& Win, const Mat& Wout) const;

    Mat A1(int k, double s) const;

private:
    SpacetimeMetric metric_;
    int terms_;
    std::vector<Mat> S_, Sinv_;
};

/// Degree <= 2 polynomial in the wavevector with matrix coefficients,
/// monomials (1, k1, k2, k3, k1^2, k1k2, k1k3, k2^2, k2k3, k3^2).
class KPoly {
public:
    KPoly() = default;
    static KPoly extract(const std::function<Mat(const Eigen::Vector3d&)>& f);
    /// Wavevectors 0, +-e_i, e_i + e_j at which a polynomial is sampled, and the inverse map.
    static std::array<Eigen::Vector3d, 10> sample_points();
    static KPoly from_samples(const std::array<Mat, 10>& values);
    static std::array<double, 10> monomials(const Eigen::Vector3d& k);
    Mat operator()(const Eigen::Vector3d& k) const;
    const std::array<Mat, 10>& coefficients() const { return c_; }
    std::array<Mat, 10>& coefficients() { return c_; }

private:
    std::array<Mat, 10> c_;
};

}  // namespace grav
