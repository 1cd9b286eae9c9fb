#pragma once
// Homogeneous spacetimes M = I x T^3 with g = -dt^2 + h_t dx^2.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gravistate/jet.hpp"

namespace grav {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using IVec3 = std::array<int, 3>;

/// Truncated Fourier lattice, sup-norm |n|_inf <= kmax, lexicographic order.
class ModeBasis {
public:
    explicit ModeBasis(int kmax, std::array<double, 3> lengths = {2 * M_PI, 2 * M_PI, 2 * M_PI});

    int kmax() const { return kmax_; }
    std::size_t size() const { return modes_.size(); }
    const IVec3& operator[](std::size_t i) const { return modes_[i]; }
    const std::vector<IVec3>& modes() const { return modes_; }
    const std::array<double, 3>& lengths() const { return lengths_; }

    Eigen::Vector3d wavevector(const IVec3& n) const;
    Eigen::Vector3d wavevector(std::size_t i) const { return wavevector(modes_[i]); }
    std::size_t index_of(const IVec3& n) const;
    std::size_t negative(std::size_t i) const;

private:
    int kmax_;
    std::array<double, 3> lengths_;
    std::vector<IVec3> modes_;
};

struct Interval {
    double lo = -0.5;
    double hi = 0.5;
    bool contains(double s) const { return s > lo && s < hi; }
};

enum class MetricKind { StaticFlat, Kasner, Custom };

/// Taylor coefficients of h at a reduced time s (coefficient n multiplies (t-s)^n).
using HJetFn = std::function<std::vector<Eigen::Matrix3d>(double s, int terms)>;

/// Times are reduced: the Cauchy surface is s = 0. For Kasner the physical time is t0 + s.
class SpacetimeMetric {
public:
    static SpacetimeMetric static_flat(Interval I = {});
    static SpacetimeMetric kasner(std::array<double, 3> p, double t0 = 1.0, Interval I = {}, bool validate = true);
    static SpacetimeMetric custom(std::string name, HJetFn jets, Interval I, double lambda = 0.0);
    /// Derivatives by fourth-order central differences of a plain callback.
    static SpacetimeMetric custom_from_callback(std::string name, std::function<Eigen::Matrix3d(double)> h,
                                                Interval I, double lambda = 0.0);
    /// h_t = (1 + 0.1 sin t)^2 delta, the non-Einstein control.
    static SpacetimeMetric custom_sin(Interval I = {});

    MetricKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double lambda() const { return lambda_; }
    const Interval& interval() const { return interval_; }
    const std::array<double, 3>& kasner_exponents() const { return p_; }
    double t0() const { return t0_; }

    Eigen::Matrix3d h(double s) const;
    std::vector<Eigen::Matrix3d> h_taylor(double s, int terms) const;
    Jet h_jet(double s, int terms) const;

private:
    MetricKind kind_ = MetricKind::StaticFlat;
    std::string name_;
    double lambda_ = 0.0;
    Interval interval_;
    std::array<double, 3> p_{0, 0, 0};
    double t0_ = 0.0;
    HJetFn jets_;
};

bool kasner_conditions_hold(const std::array<double, 3>& p, double tol = 1e-12);

/// Curvature of g at reduced time s, as Taylor jets in (t - s).
/// Riemann is stored as a 16x16 jet: row 4a+b, column 4c+d holds R_{abc}^d,
/// with (nabla_a nabla_b - nabla_b nabla_a) u_c = R_{abc}^d u_d.
struct CurvaturePack {
    double s = 0.0;
    Jet g, ginv;
    std::array<Jet, 4> christoffel;  // christoffel[a](b,c) = Gamma^a_{bc}
    Jet riemann;
    Jet ricci;
    Jet scalar;

    cd gamma(int a, int b, int c, int n = 0) const { return christoffel[a][n](b, c); }
    cd riem(int a, int b, int c, int d, int n = 0) const { return riemann[n](4 * a + b, 4 * c + d); }
};

CurvaturePack build_curvature(const SpacetimeMetric& metric, double s, int terms = 8);

struct EinsteinCheck {
    bool is_einstein;
    double max_residual;
};
EinsteinCheck check_einstein(const SpacetimeMetric& metric, double tol = 1e-12, int samples = 9);

/// Lorentzian metric jet diag(-1, h) from an h jet.
Jet spacetime_metric_jet(const Jet& h);

}  // namespace grav
