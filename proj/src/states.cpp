#include "gravistate/states.hpp"

#include "gravistate/parallel.hpp"

namespace grav {

namespace {

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

ModeCovariance build_mode_covariance(const GaugeFamily& G, std::size_t mode, const ModeProjection& pr,
                                     double drop_tol) {
    const HadamardFamily& H = G.hadamard();
    const Mat qI = H.model().q_I2();
    const auto p2 = H.projectors(2, mode);
    ModeCovariance c;
    c.singular = pr.singular;
    c.lp = pr.T.adjoint() * qI * p2.cp * pr.T;
    c.lm = -(pr.T.adjoint() * qI * p2.cm * pr.T);
    if (!pr.singular) return c;

    NuCorrection& nu = c.nu;
    const Mat one_m = Mat::Identity(20, 20) - pr.pi_tilde;
    nu.nu = qI - one_m.adjoint() * qI * one_m;
    nu.nu = 0.5 * (nu.nu + nu.nu.adjoint());
    const Eigen::SelfAdjointEigenSolver<Mat> es(nu.nu);
    const double cut = drop_tol * std::max(1.0, max_abs(nu.nu));
    std::vector<int> keep;
    for (int i = 0; i < 20; ++i)
        if (std::abs(es.eigenvalues()(i)) >= cut) keep.push_back(i);
    nu.alpha.resize(static_cast<int>(keep.size()));
    nu.u.resize(20, static_cast<int>(keep.size()));
    nu.plus = nu.minus = Mat::Zero(20, 20);
    for (std::size_t j = 0; j < keep.size(); ++j) {
        const double a = es.eigenvalues()(keep[j]);
        const Vec v = es.eigenvectors().col(keep[j]);
        nu.alpha(j) = a;
        nu.u.col(j) = v;
        (a > 0 ? nu.plus : nu.minus) += a * v * v.adjoint();
    }
    c.lp += nu.plus;
    c.lm -= nu.minus;
    return c;
}

CovariancePair::CovariancePair(const GaugeFamily& G, int jobs, double drop_tol) : G_(&G) {
    modes_ = parallel_map<ModeCovariance>(G.size(), jobs, [&](std::size_t m) {
        return build_mode_covariance(G, m, G.projection(m), drop_tol);
    });
}

ModeChecks check_mode(const CovariancePair& C, std::size_t m) {
    const GaugeFamily& G = C.gauge();
    const Mat qI = G.hadamard().model().q_I2();
    const ModeGauge& g = G.mode(m);
    const ModeProjection& pr = G.projection(m);
    const ModeCovariance& c = C.mode(m);
    const Mat N = null_space(g.Kd);
    ModeChecks r;
    r.ker_dim = static_cast<int>(N.cols());
    const double scale = std::max({1.0, max_abs(c.lp), max_abs(c.lm)});

    r.ccr = max_abs(N.adjoint() * (c.lp - c.lm - qI) * N) / scale;
    const double kscale = std::max(1.0, op_norm(g.Ks));
    r.gauge = std::max(op_norm(N.adjoint() * c.lp * g.Ks), op_norm(N.adjoint() * c.lm * g.Ks)) / (scale * kscale);
    r.positivity = 0;
    for (const Mat* l : {&c.lp, &c.lm}) {
        Mat f = N.adjoint() * *l * N;
        f = 0.5 * (f + f.adjoint());
        if (f.size() == 0) continue;
        const double e = Eigen::SelfAdjointEigenSolver<Mat>(f, Eigen::EigenvaluesOnly).eigenvalues()(0);
        r.positivity = std::min(r.positivity, e / std::max(1.0, max_abs(f)));
    }
    r.hermiticity = std::max(max_abs(c.lp - c.lp.adjoint()), max_abs(c.lm - c.lm.adjoint())) / scale;
    const Mat one_m = Mat::Identity(20, 20) - pr.pi_tilde;
    r.consistency = max_abs(N.adjoint() * (pr.T.adjoint() * qI * pr.T - one_m.adjoint() * qI * one_m) * N) / scale;
    if (c.singular) {
        r.nu_ran_k = max_abs(c.nu.nu * g.Ks) / (std::max(1.0, max_abs(c.nu.nu)) * kscale);
        r.nu_rank = static_cast<int>(c.nu.alpha.size());
    }
    return r;
}

cd spacetime_two_point(const CovariancePair& C, std::size_t mode, int sign, const std::function<Mat(double)>& u,
                       const std::function<Mat(double)>& v, double ta, double tb) {
    const HadamardFamily& H = C.gauge().hadamard();
    const auto& I = H.model().metric().interval();
    if (!(ta >= I.lo && tb <= I.hi && ta < tb)) throw std::domain_error("two-point: support outside the interval");
    const ModeDynamics dyn(H.model(), 2, H.modes().wavevector(mode));
    const Mat fu = dyn.causal_data(u, ta, tb), fv = dyn.causal_data(v, ta, tb);
    return (fu.adjoint() * C.lambda(sign, mode) * fv)(0);
}

double form_norm(const Mat& form, const Eigen::Vector3d& kv, int k) {
    const Vec w = sobolev_weight(kv, 0.5, fiber_dim(k)).diagonal().cwiseInverse();
    return op_norm(w.asDiagonal() * form * w.asDiagonal());
}

double covariance_leakage(const CovariancePair& C, std::size_t m) {
    const HadamardFamily& H = C.gauge().hadamard();
    const auto p2 = H.projectors(2, m);
    const Eigen::Vector3d kv = H.modes().wavevector(m);
    return std::max(form_norm(C.mode(m).lp * p2.cm, kv, 2), form_norm(C.mode(m).lm * p2.cp, kv, 2));
}

}  // namespace grav
