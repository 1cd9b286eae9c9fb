#include <doctest.h>

#include <random>

#include "gravistate/gauge.hpp"
#include "oracles.hpp"

using namespace grav;

namespace {

struct Setup {
    ReducedModel M;
    ModeBasis B;
    HadamardFamily H;
    GaugeFamily G;
    Setup(const SpacetimeMetric& g, int kmax) : M(g), B(kmax), H(M, B), G(H) {}
};

const Setup& flat() {
    static const Setup s(SpacetimeMetric::static_flat(), 3);
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
double scaled(const Mat& x, double scale) { return x.cwiseAbs().maxCoeff() / std::max(1.0, scale); }

}  // namespace

TEST_CASE("l on the g0 datum and B on flat space") {
    const auto& S = kasner();
    Mat g0 = Mat::Zero(4, 4);
    g0(0, 0) = -1;
    g0.block(1, 1, 3, 3) = S.M.h0().cast<cd>();
    const Vec gh = S.M.reduction().Sinv(2) * metric_fiber(g0);
    const Vec lg = S.M.reduction().S(1) * S.M.l() * gh;
    CHECK(std::abs(lg(0) - 4.0) < 1e-13);
    CHECK(lg.tail(3).norm() < 1e-13);

    const Eigen::Vector3d kv(1, -2, 3);
    const Mat B = flat().M.B(kv);
    CHECK(std::abs(B(0, 0)) < 1e-15);
    CHECK(B.bottomRightCorner(3, 3).norm() < 1e-15);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(B(0, 1 + i) - cd(0, -kv(i))) < 1e-15);
        CHECK(std::abs(B(1 + i, 0) - cd(0, kv(i))) < 1e-15);
    }
}

TEST_CASE("first-order identity and block structure of R K") {
    for (const Setup* S : {&flat(), &kasner()}) {
        for (std::size_t m = 0; m < S->B.size(); ++m) {
            const auto& g = S->G.mode(m);
            const auto p1 = S->H.projectors(1, m), p2 = S->H.projectors(2, m);
            const Mat B = S->M.B(S->B.wavevector(m));
            const Mat lK = S->M.l() * g.Ks.topRows(10);
            for (const auto* pp : {&p1.cp, &p1.cm}) {
                const Mat& b = pp == &p1.cp ? p1.bp : p1.bm;
                const Mat lhs = lK * *pp, rhs = (cd(0, 1) * b + B) * pp->topRows(4);
                CHECK(scaled(lhs - rhs, lhs.cwiseAbs().maxCoeff()) < 1e-10);
            }
            const Mat r = smoothing_remainder(S->H, m);
            Mat expect(8, 8);
            expect << S->M.l() * r.topRows(10), -S->M.l() * r.topRows(10);
            CHECK(scaled(g.RK - g.Bdiag - expect, g.RK.cwiseAbs().maxCoeff()) < 1e-10);
            // pi+- R c2-+ = 0
            CHECK(scaled(g.Rs.topRows(4) * p2.cm, g.Rs.cwiseAbs().maxCoeff()) < 1e-12);
            CHECK(scaled(g.Rs.bottomRows(4) * p2.cp, g.Rs.cwiseAbs().maxCoeff()) < 1e-12);
        }
    }
}

TEST_CASE("R_Sigma adjoint") {
    std::mt19937_64 rng(3);
    for (const Setup* S : {&flat(), &kasner()})
        for (std::size_t m = 0; m < S->B.size(); m += 7) {
            const Mat Rd = S->G.R_dagger(m);
            const auto p2 = S->H.projectors(2, m);
            CHECK(scaled(Rd - R_dagger_explicit(S->M, p2.bp, p2.bm), Rd.cwiseAbs().maxCoeff()) < 1e-12);
            const Mat u = random_mat(rng, 8, 1), f = random_mat(rng, 20, 1);
            const cd lhs = (u.adjoint() * S->G.mode(m).Rs * f)(0);
            const cd rhs = ((Rd * u).adjoint() * S->M.q_I2() * f)(0);
            CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
        }
}

TEST_CASE("Fredholm data: flat space against the zero-mode oracle") {
    const auto& S = flat();
    const auto sing = S.G.singular_modes();
    REQUIRE(sing.size() == 1);
    CHECK(S.B[sing[0]] == IVec3{0, 0, 0});
    const auto oc = oracle::flat_zero_mode_counts();
    CHECK(S.G.kernel_dim() == oc.kernel);
    CHECK(S.G.cokernel_dim() == oc.cokernel);
    for (std::size_t m = 0; m < S.B.size(); ++m) {
        if (m == sing[0]) continue;
        CHECK(S.G.mode(m).sigma.real().minCoeff() > 0.1);
    }
}

TEST_CASE("Fredholm data: index zero") {
    for (const Setup* S : {&flat(), &kasner()}) CHECK(S->G.kernel_dim() == S->G.cokernel_dim());
    const ReducedModel M(SpacetimeMetric::custom_sin());
    const ModeBasis B(2);
    const HadamardFamily H(M, B);
    const GaugeFamily G(H);
    CHECK(G.kernel_dim() == G.cokernel_dim());
    for (std::size_t m = 0; m < B.size(); ++m) CHECK(G.mode(m).ker.cols() == G.mode(m).coker.cols());
}

TEST_CASE("dual frame") {
    for (const Setup* S : {&flat(), &kasner()})
        for (std::size_t m : S->G.singular_modes()) {
            const auto& pr = S->G.projection(m);
            const auto& F = pr.frame;
            const auto& g = S->G.mode(m);
            REQUIRE(F.n >= 1);
            const Mat gram = F.W.adjoint() * S->M.q_I2() * F.V;
            CHECK((gram - Mat::Identity(F.n, F.n)).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((g.Kd * F.V).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((g.Kd * F.W.leftCols(F.p)).cwiseAbs().maxCoeff() < 1e-9);
            // v_j in Ran K_Sigma for j >= p
            const Mat ranK = range_space(g.Ks);
            const Mat out = F.V.rightCols(F.n - F.p) - ranK * (ranK.adjoint() * F.V.rightCols(F.n - F.p));
            if (out.size()) CHECK(out.cwiseAbs().maxCoeff() < 1e-10);
            CHECK(F.cond_A < 1e6);
            CHECK(F.cond_C < 1e6);
        }
}

TEST_CASE("gauge projection T") {
    std::mt19937_64 rng(11);
    for (const Setup* S : {&flat(), &kasner()})
        for (std::size_t m = 0; m < S->B.size(); ++m) {
            const auto& g = S->G.mode(m);
            const auto& pr = S->G.projection(m);
            const Mat& T = pr.T;
            const double sc = T.cwiseAbs().maxCoeff();
            CHECK(scaled(T * T - T, sc) < 1e-10);
            const Mat f1 = random_mat(rng, 8, 3);
            CHECK(scaled(T * g.Ks * f1, sc) < 1e-10);
            CHECK(scaled(g.Rs * T, g.Rs.cwiseAbs().maxCoeff() * sc) < 1e-8);
            // T preserves Ker K^dagger
            const Mat N = null_space(g.Kd);
            CHECK(scaled(g.Kd * T * N, g.Kd.cwiseAbs().maxCoeff() * sc) < 1e-8);
            if (!pr.singular) continue;
            CHECK(scaled(pr.pi2 * T, 1.0) < 1e-10);
            // (1 - pi) is a projection onto the regular data; pi K = 0; pi^dagger preserves Ran K
            const Mat& pi = pr.pi;
            CHECK(scaled(pi * pi - pi, 1.0) < 1e-10);
            CHECK(scaled(pi * g.Ks, 1.0) < 1e-10);
            const Mat qI = S->M.q_I2();
            const Mat pid = qI.inverse() * pi.adjoint() * qI;
            const Mat ranK = range_space(g.Ks);
            const Mat leak = pid * g.Ks - ranK * (ranK.adjoint() * pid * g.Ks);
            CHECK(scaled(leak, 1.0) < 1e-10);
            // T_reg: K pi1 = T_reg K, projection onto Ker R on regular data
            CHECK(scaled(pr.T_reg * g.Ks - g.Ks * pr.pi1, 1.0) < 1e-10);
            const Mat f = random_mat(rng, 20, 4);
            const Mat freg = f - pi * f;
            CHECK(scaled(pr.frame.V.adjoint() * qI * freg, f.norm()) < 1e-10);
            // R f_reg in Ran RK, the second characterization of regular data
            const Mat Rf = g.Rs * freg;
            CHECK(scaled(g.coker.adjoint() * Rf, Rf.norm()) < 1e-10);
            CHECK(scaled(g.Rs * pr.T_reg * freg, 1.0) < 1e-9);
            const Mat Tr2 = pr.T_reg * pr.T_reg - pr.T_reg;
            CHECK(scaled(Tr2 * freg, f.norm()) < 1e-9);
        }
}

TEST_CASE("positivity on Ker R_Sigma") {
    std::mt19937_64 rng(23);
    for (const Setup* S : {&flat(), &kasner()}) {
        const Mat qI = S->M.q_I2();
        int count = 0;
        for (std::size_t m = 0; m < S->B.size() && count < 200; m += 3)
            for (int r = 0; r < 8 && count < 200; ++r, ++count) {
                const Mat f = S->G.projection(m).T * random_mat(rng, 20, 1);
                const auto p2 = S->H.projectors(2, m);
                const double n2 = f.squaredNorm();
                CHECK((f.adjoint() * qI * p2.cp * f)(0).real() >= -1e-9 * n2);
                CHECK(-(f.adjoint() * qI * p2.cm * f)(0).real() >= -1e-9 * n2);
            }
    }
}

TEST_CASE("flat space: T does not mix frequencies") {
    const auto& S = flat();
    for (std::size_t m = 0; m < S.B.size(); ++m) {
        if (S.B.wavevector(m).norm() <= S.H.R()) continue;
        const auto p2 = S.H.projectors(2, m);
        const Mat& T = S.G.projection(m).T;
        CHECK((p2.cp * T * p2.cm).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((p2.cm * T * p2.cp).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("singular code path with an empty frame reproduces the regular path") {
    const auto& S = kasner();
    for (std::size_t m = 0; m < S.B.size(); ++m) {
        if (S.G.mode(m).singular) continue;
        const auto a = S.G.build_projection(m, false), b = S.G.build_projection(m, true);
        CHECK(b.frame.n == 0);
        CHECK(a.T == b.T);
    }
}

TEST_CASE("classical TT-synchronous gauge") {
    std::mt19937_64 rng(5);
    const auto& S = kasner();
    for (std::size_t m = 0; m < S.B.size(); m += 5) {
        const Eigen::Vector3d kv = S.B.wavevector(m);
        const auto c = classical_gauge(S.M, kv);
        const Mat f2 = S.G.mode(m).Ks * random_mat(rng, 8, 1);
        const Mat g = pinv(c.RK) * (c.R * f2);
        CHECK((c.RK * g - c.R * f2).norm() < 1e-8 * std::max(1.0, f2.norm()));
    }
    const auto& F = flat();
    const auto c0 = classical_gauge(F.M, Eigen::Vector3d::Zero());
    CHECK(c0.obstruction == oracle::flat_zero_mode_counts().kernel);
}
