#include "gravistate/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace grav {

ModeBasis::ModeBasis(int kmax, std::array<double, 3> lengths) : kmax_(kmax), lengths_(lengths) {
    if (kmax < 0) throw ConfigError("kmax must be non-negative");
    for (double L : lengths)
        if (!(L > 0)) throw ConfigError("torus lengths must be positive");
    for (int a = -kmax; a <= kmax; ++a)
        for (int b = -kmax; b <= kmax; ++b)
            for (int c = -kmax; c <= kmax; ++c) modes_.push_back({a, b, c});
}

Eigen::Vector3d ModeBasis::wavevector(const IVec3& n) const {
    Eigen::Vector3d k;
    for (int i = 0; i < 3; ++i) k(i) = 2 * M_PI * n[i] / lengths_[i];
    return k;
}

std::size_t ModeBasis::index_of(const IVec3& n) const {
    const int w = 2 * kmax_ + 1;
    for (int v : n)
        if (std::abs(v) > kmax_) throw std::out_of_range("mode outside basis");
    return static_cast<std::size_t>(((n[0] + kmax_) * w + (n[1] + kmax_)) * w + (n[2] + kmax_));
}

std::size_t ModeBasis::negative(std::size_t i) const {
    const auto& n = modes_[i];
    return index_of({-n[0], -n[1], -n[2]});
}

bool kasner_conditions_hold(const std::array<double, 3>& p, double tol) {
    const double s1 = p[0] + p[1] + p[2];
    const double s2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    return std::abs(s1 - 1.0) <= tol && std::abs(s2 - 1.0) <= tol;
}

SpacetimeMetric SpacetimeMetric::static_flat(Interval I) {
    SpacetimeMetric m;
    m.kind_ = MetricKind::StaticFlat;
    m.name_ = "static-flat";
    m.interval_ = I;
    m.jets_ = [](double, int terms) {
        std::vector<Eigen::Matrix3d> r(terms, Eigen::Matrix3d::Zero());
        if (terms > 0) r[0] = Eigen::Matrix3d::Identity();
        return r;
    };
    return m;
}

SpacetimeMetric SpacetimeMetric::kasner(std::array<double, 3> p, double t0, Interval I, bool validate) {
    if (validate && !kasner_conditions_hold(p)) {
        std::ostringstream os;
        os.precision(17);
        os << "Kasner conditions violated: sum p = " << p[0] + p[1] + p[2]
           << ", sum p^2 = " << p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        throw ConfigError(os.str());
    }
    if (!(t0 + I.lo > 0)) throw ConfigError("Kasner time interval must lie in t > 0");
    SpacetimeMetric m;
    m.kind_ = MetricKind::Kasner;
    m.name_ = "kasner";
    m.interval_ = I;
    m.p_ = p;
    m.t0_ = t0;
    m.jets_ = [p, t0](double s, int terms) {
        const double t = t0 + s;
        std::vector<Eigen::Matrix3d> r(terms, Eigen::Matrix3d::Zero());
        for (int i = 0; i < 3; ++i) {
            const double alpha = 2 * p[i];
            double coef = 1.0;  // generalized binomial C(alpha, n)
            for (int n = 0; n < terms; ++n) {
                r[n](i, i) = coef * std::pow(t, alpha - n);
                coef *= (alpha - n) / (n + 1);
            }
        }
        return r;
    };
    return m;
}

SpacetimeMetric SpacetimeMetric::custom(std::string name, HJetFn jets, Interval I, double lambda) {
    SpacetimeMetric m;
    m.kind_ = MetricKind::Custom;
    m.name_ = std::move(name);
    m.interval_ = I;
    m.lambda_ = lambda;
    m.jets_ = std::move(jets);
    return m;
}

SpacetimeMetric SpacetimeMetric::custom_from_callback(std::string name, std::function<Eigen::Matrix3d(double)> h,
                                                      Interval I, double lambda) {
    const double scale = I.hi - I.lo;
    auto jets = [h, scale](double s, int terms) {
        std::vector<Eigen::Matrix3d> r(terms, Eigen::Matrix3d::Zero());
        if (terms > 0) r[0] = h(s);
        auto f = [&](double x) { return h(s + x); };
        if (terms > 1) {
            const double d = 1e-4 * scale;
            r[1] = (-f(2 * d) + 8 * f(d) - 8 * f(-d) + f(-2 * d)) / (12 * d);
        }
        if (terms > 2) {
            const double d = 2e-3 * scale;
            r[2] = (-f(2 * d) + 16 * f(d) - 30 * f(0) + 16 * f(-d) - f(-2 * d)) / (12 * d * d) / 2.0;
        }
        if (terms > 3) {
            const double d = 5e-3 * scale;
            r[3] = (-f(3 * d) + 8 * f(2 * d) - 13 * f(d) + 13 * f(-d) - 8 * f(-2 * d) + f(-3 * d)) /
                   (8 * d * d * d) / 6.0;
        }
        if (terms > 4) {
            const double d = 1e-2 * scale;
            r[4] = (-f(3 * d) + 12 * f(2 * d) - 39 * f(d) + 56 * f(0) - 39 * f(-d) + 12 * f(-2 * d) - f(-3 * d)) /
                   (6 * d * d * d * d) / 24.0;
        }
        return r;
    };
    return custom(std::move(name), jets, I, lambda);
}

SpacetimeMetric SpacetimeMetric::custom_sin(Interval I) {
    auto jets = [](double s, int terms) {
        std::vector<double> f(terms, 0.0);
        double fact = 1.0;
        for (int n = 0; n < terms; ++n) {
            if (n > 0) fact *= n;
            f[n] = 0.1 * std::sin(s + n * M_PI / 2) / fact;
        }
        if (terms > 0) f[0] += 1.0;
        std::vector<Eigen::Matrix3d> r(terms, Eigen::Matrix3d::Zero());
        for (int n = 0; n < terms; ++n) {
            double sq = 0.0;
            for (int m = 0; m <= n; ++m) sq += f[m] * f[n - m];
            r[n] = sq * Eigen::Matrix3d::Identity();
        }
        return r;
    };
    return custom("custom-sin", jets, I, 0.0);
}

std::vector<Eigen::Matrix3d> SpacetimeMetric::h_taylor(double s, int terms) const {
    if (!(s >= interval_.lo && s <= interval_.hi)) {
        std::ostringstream os;
        os << "time " << s << " outside the interval (" << interval_.lo << ", " << interval_.hi << ")";
        throw std::domain_error(os.str());
    }
    auto r = jets_(s, terms);
    Eigen::LLT<Eigen::Matrix3d> llt(r.at(0));
    if (llt.info() != Eigen::Success) throw std::domain_error("h_t is not positive definite");
    return r;
}

Eigen::Matrix3d SpacetimeMetric::h(double s) const { return h_taylor(s, 1)[0]; }

Jet SpacetimeMetric::h_jet(double s, int terms) const {
    auto r = h_taylor(s, terms);
    Jet j(3, 3, terms);
    for (int n = 0; n < terms; ++n) j[n] = r[n].cast<cd>();
    return j;
}

Jet spacetime_metric_jet(const Jet& h) {
    Jet g(4, 4, h.terms());
    for (int n = 0; n < h.terms(); ++n) g[n].block(1, 1, 3, 3) = h[n];
    if (h.terms() > 0) g[0](0, 0) = -1.0;
    return g;
}

CurvaturePack build_curvature(const SpacetimeMetric& metric, double s, int terms) {
    CurvaturePack cp;
    cp.s = s;
    cp.g = spacetime_metric_jet(metric.h_jet(s, terms));
    cp.ginv = cp.g.inverse();
    const Jet dg = cp.g.derivative();
    const int tg = dg.terms();

    // Only time derivatives survive: Gamma^a_{bc} = 1/2 g^{ad}(d_b g_dc + d_c g_db - d_d g_bc).
    for (int a = 0; a < 4; ++a) {
        cp.christoffel[a] = Jet(4, 4, tg);
        for (int n = 0; n < tg; ++n)
            for (int m = 0; m <= n; ++m)
                for (int b = 0; b < 4; ++b)
                    for (int c = 0; c < 4; ++c) {
                        cd acc = 0;
                        for (int d = 0; d < 4; ++d) {
                            cd t = 0;
                            if (b == 0) t += dg[n - m](d, c);
                            if (c == 0) t += dg[n - m](d, b);
                            if (d == 0) t -= dg[n - m](b, c);
                            acc += cp.ginv[m](a, d) * t;
                        }
                        cp.christoffel[a][n](b, c) += 0.5 * acc;
                    }
    }

    // R_{abc}^d = d_b G^d_ac - d_a G^d_bc + G^e_ac G^d_be - G^e_bc G^d_ae
    const int tr = tg - 1;
    cp.riemann = Jet(16, 16, tr);
    auto G = [&](int up, int b, int c, int n) { return cp.christoffel[up][n](b, c); };
    for (int n = 0; n < tr; ++n)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    for (int d = 0; d < 4; ++d) {
                        cd v = 0;
                        if (b == 0) v += double(n + 1) * G(d, a, c, n + 1);
                        if (a == 0) v -= double(n + 1) * G(d, b, c, n + 1);
                        for (int m = 0; m <= n; ++m)
                            for (int e = 0; e < 4; ++e)
                                v += G(e, a, c, m) * G(d, b, e, n - m) - G(e, b, c, m) * G(d, a, e, n - m);
                        cp.riemann[n](4 * a + b, 4 * c + d) = v;
                    }

    cp.ricci = Jet(4, 4, tr);
    for (int n = 0; n < tr; ++n)
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) {
                cd v = 0;
                for (int b = 0; b < 4; ++b) v += cp.riemann[n](4 * a + b, 4 * c + b);
                cp.ricci[n](a, c) = v;
            }

    cp.scalar = Jet(1, 1, tr);
    for (int n = 0; n < tr; ++n)
        for (int m = 0; m <= n; ++m) cp.scalar[n](0, 0) += (cp.ginv[m].cwiseProduct(cp.ricci[n - m].transpose())).sum();
    return cp;
}

EinsteinCheck check_einstein(const SpacetimeMetric& metric, double tol, int samples) {
    const auto& I = metric.interval();
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = I.lo + (I.hi - I.lo) * (i + 0.5) / samples;
        const auto cp = build_curvature(metric, s, 3);
        const Mat res = cp.ricci[0] - metric.lambda() * cp.g[0];
        worst = std::max(worst, res.cwiseAbs().maxCoeff());
    }
    return {worst <= tol, worst};
}

}  // namespace grav
