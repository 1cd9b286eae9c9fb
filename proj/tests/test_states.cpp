#include <doctest.h>

#include <random>

#include "gravistate/states.hpp"

using namespace grav;

namespace {

struct Setup {
    ReducedModel M;
    ModeBasis B;
    HadamardFamily H;
    GaugeFamily G;
    CovariancePair C;
    Setup(const SpacetimeMetric& g, int kmax) : M(g), B(kmax), H(M, B), G(H), C(G) {}
};

const Setup& flat() {
    static const Setup s(SpacetimeMetric::static_flat(), 2);
    return s;
}
const Setup& kasner() {
    static const Setup s(SpacetimeMetric::kasner({2. / 3, 2. / 3, -1. / 3}), 2);
    return s;
}

Mat random_mat(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> N;
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cd(N(rng), N(rng));
    return m;
}

// p^4 with p = (t - ta)(tb - t), normalized to max 1, and its second derivative
struct Bump {
    double ta, tb, norm;
    Bump(double a, double b) : ta(a), tb(b), norm(std::pow(0.25 * (b - a) * (b - a), 4)) {}
    double operator()(double t) const {
        if (t <= ta || t >= tb) return 0;
        return std::pow((t - ta) * (tb - t), 4) / norm;
    }
    double dd(double t) const {
        if (t <= ta || t >= tb) return 0;
        const double p = (t - ta) * (tb - t), dp = ta + tb - 2 * t;
        return (12 * p * p * dp * dp - 8 * p * p * p) / norm;
    }
};

// C^3 step from 0 at ta to 1 at tb: value, first and second derivative
std::array<double, 3> smooth_step(double t, double ta, double tb) {
    const double L = tb - ta, x = std::clamp((t - ta) / L, 0.0, 1.0);
    const double s = x * x * x * x * (35 - 84 * x + 70 * x * x - 20 * x * x * x);
    const double ds = 140 * x * x * x * (1 - x) * (1 - x) * (1 - x);
    const double dds = 420 * x * x * (1 - x) * (1 - x) * (1 - 2 * x);
    return {s, ds / L, dds / (L * L)};
}

}  // namespace

TEST_CASE("covariance properties on every mode") {
    for (const Setup* S : {&flat(), &kasner()}) {
        int singular = 0;
        for (std::size_t m = 0; m < S->B.size(); ++m) {
            const auto r = check_mode(S->C, m);
            CHECK(r.ccr < 1e-9);
            CHECK(r.gauge < 1e-9);
            CHECK(r.positivity >= -1e-9);
            CHECK(r.hermiticity < 1e-12);
            CHECK(r.consistency < 1e-9);
            if (S->C.mode(m).singular) {
                ++singular;
                CHECK(r.nu_ran_k < 1e-10);
                CHECK(r.nu_rank <= 2 * S->G.projection(m).frame.p);
                for (int i = 0; i < S->C.mode(m).nu.alpha.size(); ++i) CHECK(S->C.mode(m).nu.alpha(i) != 0.0);
            }
        }
        CHECK(singular == 1);
    }
}

TEST_CASE("Ker K^dagger has dimension 12 on generic modes") {
    const auto& S = kasner();
    for (std::size_t m = 0; m < S.B.size(); ++m)
        if (S.B.wavevector(m).norm() > 0) CHECK(check_mode(S.C, m).ker_dim == 12);
}

TEST_CASE("regular and degenerate singular paths give identical covariances") {
    const auto& S = kasner();
    for (std::size_t m = 0; m < S.B.size(); ++m) {
        if (S.G.mode(m).singular) continue;
        const auto a = build_mode_covariance(S.G, m, S.G.build_projection(m, false));
        const auto b = build_mode_covariance(S.G, m, S.G.build_projection(m, true));
        CHECK(a.lp == b.lp);
        CHECK(a.lm == b.lm);
    }
}

TEST_CASE("flat space: covariances do not mix frequencies") {
    const auto& S = flat();
    for (std::size_t m = 0; m < S.B.size(); ++m) {
        if (S.B.wavevector(m).norm() <= S.H.R()) continue;
        CHECK(covariance_leakage(S.C, m) < 1e-10);
    }
}

TEST_CASE("weak field equation") {
    std::mt19937_64 rng(31);
    for (const Setup* S : {&flat(), &kasner()})
        for (std::size_t m : {std::size_t(3), S->B.index_of({1, -1, 2})}) {
            const ModeDynamics dyn(S->M, 2, S->B.wavevector(m));
            const double ta = -0.35, tb = 0.3;
            const Bump w(ta, tb);
            const Mat c = random_mat(rng, 10, 1), e = random_mat(rng, 10, 1);
            auto Dw = [&](double t) -> Mat { return w.dd(t) * c + dyn.a(t) * (w(t) * c); };
            auto v = [&](double t) -> Mat { return w(t) * e; };
            for (int sg : {+1, -1}) {
                const cd x = spacetime_two_point(S->C, m, sg, Dw, v, ta, tb);
                CHECK(std::abs(x) < 1e-8);
            }
            auto zero = [](double) -> Mat { return Mat::Zero(10, 1); };
            CHECK(spacetime_two_point(S->C, m, 1, v, zero, ta, tb) == cd(0));
        }
}

TEST_CASE("commutator of the two-point functions on constraint-satisfying sources") {
    std::mt19937_64 rng(37);
    const auto& S = kasner();
    const std::size_t m = S.B.index_of({1, 0, -1});
    const Eigen::Vector3d kv = S.B.wavevector(m);
    const ModeDynamics dyn(S.M, 2, kv);
    const Mat N = null_space(S.G.mode(m).Kd);
    const double ta = -0.3, tb = 0.25;
    // solutions with data in Ker K^dagger, tabulated densely for Hermite interpolation
    const int G = 1200;
    auto table = [&](const Mat& f) {
        std::vector<Mat> d(G + 1);
        d[0] = dyn.evolve(f, 0.0, ta);
        for (int i = 1; i <= G; ++i) d[i] = dyn.evolve(d[i - 1], ta + (tb - ta) * (i - 1) / G, ta + (tb - ta) * i / G);
        return d;
    };
    auto source = [&](const std::vector<Mat>& d) {
        return [&, d](double t) -> Mat {
            const double h = (tb - ta) / G;
            const int i = std::clamp(static_cast<int>((t - ta) / h), 0, G - 1);
            const double x = (t - ta - i * h) / h;
            const Mat p0 = d[i].topRows(10), p1 = d[i + 1].topRows(10);
            const Mat q0 = cd(0, 1) * d[i].bottomRows(10) * h, q1 = cd(0, 1) * d[i + 1].bottomRows(10) * h;
            const double h00 = 2 * x * x * x - 3 * x * x + 1, h10 = x * x * x - 2 * x * x + x;
            const double h01 = -2 * x * x * x + 3 * x * x, h11 = x * x * x - x * x;
            const double d00 = (6 * x * x - 6 * x) / h, d10 = (3 * x * x - 4 * x + 1) / h;
            const double d01 = (-6 * x * x + 6 * x) / h, d11 = (3 * x * x - 2 * x) / h;
            const Mat phi = h00 * p0 + h10 * q0 + h01 * p1 + h11 * q1;
            const Mat dphi = d00 * p0 + d10 * q0 + d01 * p1 + d11 * q1;
            const auto chi = smooth_step(t, ta, tb);
            return Mat(chi[2] * phi + 2 * chi[1] * dphi);
        };
    };
    const Mat fu = N * random_mat(rng, N.cols(), 1), fv = N * random_mat(rng, N.cols(), 1);
    const auto du = table(fu), dv = table(fv);
    const auto u = source(du), v = source(dv);
    const cd lhs = spacetime_two_point(S.C, m, 1, u, v, ta, tb) - spacetime_two_point(S.C, m, -1, u, v, ta, tb);
    // i (u | I G v) by composite Simpson; G v is the solution with data fv at 0
    const int Q = 600;
    const Mat tau2 = tau(2);
    cd acc = 0;
    Mat gv = dyn.evolve(fv, 0.0, ta);
    const auto& red = S.M.reduction();
    for (int i = 0; i <= Q; ++i) {
        const double t = ta + (tb - ta) * i / Q;
        if (i > 0) gv = dyn.evolve(gv, ta + (tb - ta) * (i - 1) / Q, t);
        const Mat W = red.W(2, t);
        const Mat h = S.M.metric().h(t).cast<cd>();
        Mat g4 = Mat::Zero(4, 4), gi4 = Mat::Zero(4, 4);
        g4(0, 0) = gi4(0, 0) = -1;
        g4.block(1, 1, 3, 3) = h;
        gi4.block(1, 1, 3, 3) = h.inverse();
        const Mat St = red.S(2);
        const Mat It = (W * St).inverse() * trace_reversal_raw(g4, gi4) * (W * St);
        const double wgt = (i == 0 || i == Q) ? 1 : (i % 2 ? 4 : 2);
        acc += wgt * (u(t).adjoint() * tau2 * It * gv.topRows(10))(0);
    }
    const cd rhs = cd(0, 1) * acc * ((tb - ta) / Q / 3);
    CHECK(std::abs(lhs - rhs) < 1e-7 * std::max(1.0, std::abs(rhs)));
    CHECK(std::abs(rhs) > 1e-3);
    // the two sources reproduce their data
    const Mat fu2 = dyn.causal_data(u, ta, tb);
    CHECK((fu2 - fu).norm() < 1e-7 * fu.norm());
}
