#include <doctest.h>

#include <chrono>
#include <random>

#include "gravistate/cauchy.hpp"
#include "oracles.hpp"

using namespace grav;

namespace {

const ReducedModel& flat_model() {
    static const ReducedModel m(SpacetimeMetric::static_flat());
    return m;
}
const ReducedModel& kasner_model() {
    static const ReducedModel m(SpacetimeMetric::kasner({2. / 3, 2. / 3, -1. / 3}));
    return m;
}

Mat random_mat(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> N;
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cd(N(rng), N(rng));
    return m;
}

}  // namespace

TEST_CASE("model construction time") {
    const auto t0 = std::chrono::steady_clock::now();
    (void)kasner_model();
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("Kasner model built in " << sec << " s");
}

TEST_CASE("Chebyshev tables reproduce direct reductions") {
    const auto& M = kasner_model();
    const Eigen::Vector3d kv(2, -1, 3);
    const ModeDynamics dyn(M, 2, kv);
    for (double s : {-0.37, 0.11, 0.42}) {
        const FieldOps ops(M.metric(), s, kv, 4);
        const Mat W = M.reduction().W(2, s);
        const Mat direct = M.reduction().reduce(ops.D(2), 2, 2, s, W, W).coef(0)[0];
        CHECK((dyn.a(s) - direct).cwiseAbs().maxCoeff() < 1e-10 * direct.cwiseAbs().maxCoeff());
    }
    CHECK((dyn.a(0.0) - M.a0(2, kv)).cwiseAbs().maxCoeff() < 1e-10 * M.a0(2, kv).cwiseAbs().maxCoeff());
}

TEST_CASE("evolution: oscillator and zero mode") {
    const auto& M = flat_model();
    const Eigen::Vector3d kv(1, 2, 0);
    const double w = kv.norm();
    const ModeDynamics dyn(M, 1, kv);
    Mat f(8, 1);
    f.setZero();
    f(2) = 1.0;
    f(6) = -w;  // v = exp(-iwt): -i v'(0) = -w
    const Mat g = dyn.evolve(f, 0.0, 0.45);
    CHECK(std::abs(g(2) - oracle::oscillator(w, 0.45)) < 1e-9);
    CHECK(std::abs(g(6) + w * oracle::oscillator(w, 0.45)) < 1e-9);

    const ModeDynamics zero(M, 2, Eigen::Vector3d::Zero());
    Mat v = Mat::Zero(20, 1);
    v(3) = 2.0;
    CHECK((zero.evolve(v, 0.0, -0.5) - v).norm() < 1e-12);
}

TEST_CASE("charge conservation under evolution") {
    std::mt19937_64 rng(5);
    for (const ReducedModel* M : {&flat_model(), &kasner_model()})
        for (int k = 1; k <= 2; ++k) {
            const Eigen::Vector3d kv(3, -1, 2);
            const ModeDynamics dyn(*M, k, kv);
            const int n = fiber_dim(k);
            const Mat q = ReducedModel::q(k);
            const Mat f = random_mat(rng, 2 * n, 2);
            const Mat Q0 = f.adjoint() * q * f;
            for (double s : {-0.5, 0.5}) {
                const Mat g = dyn.evolve(f, 0.0, s);
                const Mat Q1 = g.adjoint() * q * g;
                CHECK((Q1 - Q0).cwiseAbs().maxCoeff() / Q0.cwiseAbs().maxCoeff() < 1e-9);
            }
        }
}

TEST_CASE("K_Sigma: constraint and adjoint identities") {
    std::mt19937_64 rng(9);
    for (const ReducedModel* M : {&flat_model(), &kasner_model()})
        for (const Eigen::Vector3d& kv : {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(2, -3, 1)}) {
            const Mat Ks = M->K_sigma(kv), Kd = M->K_sigma_dagger(kv);
            CHECK((Kd * Ks).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, Kd.norm() * Ks.norm()));
            // (K^dag f2) . q1 f1 = f2 . q_I2 K f1
            const Mat f1 = random_mat(rng, 8, 3), f2 = random_mat(rng, 20, 3);
            const Mat lhs = (Kd * f2).adjoint() * ReducedModel::q(1) * f1;
            const Mat rhs = f2.adjoint() * M->q_I2() * Ks * f1;
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));
        }
}

TEST_CASE("K_Sigma intertwines the evolutions") {
    std::mt19937_64 rng(13);
    const auto& M = kasner_model();
    const Eigen::Vector3d kv(1, -2, 1);
    const ModeDynamics d1(M, 1, kv), d2(M, 2, kv);
    const Mat f1 = random_mat(rng, 8, 2);
    const double s = 0.5;
    // K applied to the evolved V1 solution at s, computed with the reduced K at s
    const FieldOps ops(M.metric(), s, kv, 6);
    const Mat W1 = M.reduction().W(1, s), W2 = M.reduction().W(2, s);
    const DiffOp Kr = M.reduction().reduce(ops.K(), 1, 2, s, W1, W2);
    const Mat g1 = d1.evolve(f1, 0.0, s);
    const Mat Kat = cauchy_operator(Kr.coef(0)[0], Kr.coef(0)[1], Kr.coef(1)[0], Kr.coef(1)[1], d1.a(s)) * g1;
    const Mat g2 = d2.evolve(M.K_sigma(kv) * f1, 0.0, s);
    CHECK((Kat - g2).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, g2.cwiseAbs().maxCoeff()));
}

TEST_CASE("I_Sigma and charges") {
    const auto& M = kasner_model();
    const Mat Is = M.I_sigma();
    CHECK((Is * Is - Mat::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-14);
    const Mat q2 = ReducedModel::q(2), qI = M.q_I2();
    CHECK((q2 * Is - Is.adjoint() * q2).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((qI - qI.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    // the g0 datum: Hilbert components of g0 in both slots
    const Mat S2inv = M.reduction().Sinv(2);
    Mat g0 = Mat::Zero(4, 4);
    g0(0, 0) = -1;
    g0.block(1, 1, 3, 3) = M.h0().cast<cd>();
    Vec gd = Vec::Zero(20);
    gd.head(10) = S2inv * metric_fiber(g0);
    gd.tail(10) = S2inv * metric_fiber(g0);
    CHECK((Is * gd + gd).norm() < 1e-13);
    Eigen::SelfAdjointEigenSolver<Mat> es(ReducedModel::q_tilde(10));
    CHECK(std::abs(es.eigenvalues().minCoeff() + 1) < 1e-14);
    CHECK(std::abs(es.eigenvalues().maxCoeff() - 1) < 1e-14);
}

TEST_CASE("Green identity and antisymmetry of the causal propagator") {
    std::mt19937_64 rng(17);
    for (const ReducedModel* M : {&flat_model(), &kasner_model()}) {
        const Eigen::Vector3d kv(1, 1, -1);
        const ModeDynamics dyn(*M, 2, kv);
        const double ta = -0.3, tb = 0.35;
        const Mat A = random_mat(rng, 10, 1), Bv = random_mat(rng, 10, 1);
        const Mat C = random_mat(rng, 10, 1), Dv = random_mat(rng, 10, 1);
        auto bump = [&](double t) {
            if (t <= ta || t >= tb) return 0.0;
            return std::pow((t - ta) * (tb - t), 4);
        };
        auto phi = [&](double t) -> Mat { return bump(t) * (A + t * Bv); };
        auto psi = [&](double t) -> Mat { return bump(t) * (C + t * t * Dv); };
        const Mat fphi = dyn.causal_data(phi, ta, tb), fpsi = dyn.causal_data(psi, ta, tb);
        const Mat tau2 = tau(2);
        // (phi | G psi) = int phi^* tau (G psi)(t) dt, with G psi evolved from its data at 0
        auto pair = [&](const std::function<Mat(double)>& a, const Mat& data) {
            cd acc = 0;
            const int N = 64;
            for (int i = 0; i < N; ++i) {  // Gauss-Legendre via midpoint-refined Simpson on a smooth integrand
                const double x0 = ta + (tb - ta) * i / N, x1 = ta + (tb - ta) * (i + 1) / N;
                const double xm = 0.5 * (x0 + x1);
                const Mat u0 = dyn.evolve(data, 0.0, x0).topRows(10), um = dyn.evolve(data, 0.0, xm).topRows(10),
                          u1 = dyn.evolve(data, 0.0, x1).topRows(10);
                acc += (x1 - x0) / 6 *
                       ((a(x0).adjoint() * tau2 * u0)(0) + 4.0 * (a(xm).adjoint() * tau2 * um)(0) +
                        (a(x1).adjoint() * tau2 * u1)(0));
            }
            return acc;
        };
        const cd lhs = cd(0, 1) * pair(phi, fphi);
        const cd rhs = (fphi.adjoint() * ReducedModel::q(2) * fphi)(0);
        CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
        const cd x = pair(phi, fpsi), y = pair(psi, fphi);
        CHECK(std::abs(x + std::conj(y)) < 1e-8 * std::max(1.0, std::abs(x)));
        const Mat zero = dyn.causal_data([](double) -> Mat { return Mat::Zero(10, 1); }, ta, tb);
        CHECK(zero.norm() == 0.0);
    }
}

TEST_CASE("B and the gauge map on K_Sigma") {
    // l pi0 K_Sigma f1 = (i pi1 + B pi0) f1 for any f1; checks l L1 = 1 and l L0 = B at t = 0
    static const ReducedModel sinm(SpacetimeMetric::custom_sin());
    for (const ReducedModel* M : {&flat_model(), &kasner_model(), &sinm})
        for (const Eigen::Vector3d& kv : {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(2, -1, 1)}) {
            const Mat lK = M->l() * M->K_sigma(kv).topRows(10);
            Mat expect(4, 8);
            expect << M->B(kv), cd(0, 1) * Mat::Identity(4, 4);
            CHECK((lK - expect).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, expect.cwiseAbs().maxCoeff()));
        }
}
