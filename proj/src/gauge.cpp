#include "gravistate/gauge.hpp"

#include "gravistate/parallel.hpp"

namespace grav {

namespace {

Mat identity(int n) { return Mat::Identity(n, n); }

}  // namespace

Mat null_space(const Mat& m, double rel_tol) {
    if (m.rows() == 0 || m.cols() == 0) return Mat::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    int r = 0;
    while (r < s.size() && s(r) > rel_tol * smax) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

Mat range_space(const Mat& m, double rel_tol) {
    if (m.rows() == 0 || m.cols() == 0) return Mat::Zero(m.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    int r = 0;
    while (r < s.size() && s(r) > rel_tol * smax) ++r;
    return svd.matrixU().leftCols(r);
}

Mat pinv(const Mat& m, double rel_tol) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    Vec inv = Vec::Zero(s.size());
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * smax) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Mat build_R_sigma(const Mat& l, const Mat& c2p, const Mat& c2m) {
    Mat r(8, 20);
    r << l * c2p.topRows(10), l * c2m.topRows(10);
    return r;
}

Mat R_dagger_explicit(const ReducedModel& model, const Mat& bp, const Mat& bm) {
    const Eigen::Matrix3d& h0 = model.h0();
    Mat J = Mat::Zero(10, 4);
    J(sym_index(0, 0), 0) = 0.5;
    for (int i = 1; i <= 3; ++i) J(sym_index(0, i), i) = -0.5;
    for (int i = 1; i <= 3; ++i)
        for (int j = i; j <= 3; ++j) J(sym_index(i, j), 0) = -0.5 * h0(i - 1, j - 1);
    const Mat Jh = model.reduction().Sinv(2) * J * model.reduction().S(1);
    const Mat d = (bp - bm).inverse();
    Mat r(20, 8);
    r << d * Jh, -d * Jh, bp * d * Jh, -bm * d * Jh;
    return r;
}

GaugeFamily::GaugeFamily(const HadamardFamily& H, GaugeOptions opt) : H_(&H), opt_(opt) {
    const ReducedModel& M = H.model();
    qI2_ = M.q_I2();
    const std::size_t N = H.modes().size();
    const cd i(0, 1);
    modes_ = parallel_map<ModeGauge>(N, opt.jobs, [&](std::size_t m) {
        ModeGauge g;
        const Eigen::Vector3d kv = H.modes().wavevector(m);
        g.Ks = M.K_sigma(kv);
        g.Kd = M.K_sigma_dagger(kv);
        const auto p1 = H.projectors(1, m), p2 = H.projectors(2, m);
        g.Rs = build_R_sigma(M.l(), p2.cp, p2.cm);
        g.RK = g.Rs * g.Ks;
        const Mat B = M.B(kv);
        g.Bdiag.resize(8, 8);
        g.Bdiag << (i * p1.bp + B) * p1.cp.topRows(4), (i * p1.bm + B) * p1.cm.topRows(4);
        Eigen::JacobiSVD<Mat> svd(g.RK, Eigen::ComputeFullU | Eigen::ComputeFullV);
        g.sigma = svd.singularValues().cast<cd>();
        const auto& s = svd.singularValues();
        int r = 0;
        while (r < 8 && s(r) > opt.sing_tol * s(0)) ++r;
        g.singular = r < 8;
        g.ker = svd.matrixV().rightCols(8 - r);
        g.coker = svd.matrixU().rightCols(8 - r);
        const auto sb = Eigen::JacobiSVD<Mat>(g.Bdiag).singularValues();
        g.lower_bound = sb(7) - op_norm(g.RK - g.Bdiag);
        return g;
    });
    proj_ = parallel_map<ModeProjection>(N, opt.jobs, [&](std::size_t m) {
        return build_projection(m, modes_[m].singular);
    });
}

std::vector<std::size_t> GaugeFamily::singular_modes() const {
    std::vector<std::size_t> r;
    for (std::size_t m = 0; m < modes_.size(); ++m)
        if (modes_[m].singular) r.push_back(m);
    return r;
}

int GaugeFamily::kernel_dim() const {
    int d = 0;
    for (const auto& g : modes_) d += static_cast<int>(g.ker.cols());
    return d;
}

int GaugeFamily::cokernel_dim() const {
    int d = 0;
    for (const auto& g : modes_) d += static_cast<int>(g.coker.cols());
    return d;
}

int GaugeFamily::p() const {
    int d = 0;
    for (const auto& pr : proj_) d += pr.frame.p;
    return d;
}

Mat GaugeFamily::R_dagger(std::size_t m) const {
    return H_->model().I_sigma() * ReducedModel::q(2) * modes_.at(m).Rs.adjoint();
}

ModeProjection GaugeFamily::build_projection(std::size_t m, bool singular_path) const {
    const ModeGauge& g = modes_.at(m);
    ModeProjection pr;
    pr.singular = singular_path;
    const Mat RKp = g.singular ? pinv(g.RK, opt_.sing_tol) : Mat(g.RK.partialPivLu().inverse());
    pr.T_reg = identity(20) - g.Ks * RKp * g.Rs;
    pr.pi = pr.pi_tilde = pr.pi2 = Mat::Zero(20, 20);
    pr.pi1 = Mat::Zero(8, 8);
    if (!singular_path) {
        pr.T = pr.T_reg;
        return pr;
    }

    DualFrame& F = pr.frame;
    F.n = static_cast<int>(g.coker.cols());
    F.U = g.coker;
    F.V = R_dagger(m) * F.U;
    F.W = Mat::Zero(20, F.n);
    if (F.n > 0) normalize_frame(F, g);

    pr.pi = F.W * F.V.adjoint() * qI2_;
    pr.pi_tilde = F.W.leftCols(F.p) * F.V.leftCols(F.p).adjoint() * qI2_;
    pr.pi1 = g.ker * g.ker.adjoint();
    const Mat Y = range_space(g.Ks * g.ker);
    pr.pi2 = Y * Y.adjoint();
    pr.T = (identity(20) - pr.pi2) * pr.T_reg * (identity(20) - pr.pi);
    return pr;
}

void GaugeFamily::normalize_frame(DualFrame& F, const ModeGauge& g) const {
    // Split span{v} into a part transverse to Ran K_Sigma and a part inside it.
    const Mat ranK = range_space(g.Ks);
    const Mat X = (identity(20) - ranK * ranK.adjoint()) * F.V;
    const Mat inside = null_space(X, 1e-9);
    F.p = F.n - static_cast<int>(inside.cols());
    Eigen::ColPivHouseholderQR<Mat> qr(X);
    Mat C(F.n, F.n);
    for (int j = 0; j < F.p; ++j) C.col(j) = Mat::Identity(F.n, F.n).col(qr.colsPermutation().indices()(j));
    C.rightCols(F.n - F.p) = inside;
    F.U = F.U * C;
    F.V = F.V * C;

    const Mat NK = null_space(g.Kd);
    const Mat qinv = H_->model().I_sigma() * ReducedModel::q(2);
    for (int j = 0; j < F.n; ++j)
        F.W.col(j) = j < F.p ? Mat(NK * (NK.adjoint() * (qI2_ * F.V.col(j)))) : Mat(qinv * F.V.col(j));
    Mat Q = F.W.adjoint() * qI2_ * F.V;  // [[A, 0], [B, C]]
    Q.topRightCorner(F.p, F.n - F.p).setZero();
    auto cond = [](const Mat& a) {
        if (a.size() == 0) return 1.0;
        const auto s = Eigen::JacobiSVD<Mat>(a).singularValues();
        return s(0) / s(s.size() - 1);
    };
    F.cond_A = cond(Q.topLeftCorner(F.p, F.p));
    F.cond_C = cond(Q.bottomRightCorner(F.n - F.p, F.n - F.p));
    if (!(F.cond_A < 1e10) || !(F.cond_C < 1e10))
        throw NumericalError("dual frame: normalization block is singular (wrong transverse split)");
    F.W = F.W * Q.inverse().adjoint();
}

ClassicalGauge classical_gauge(const ReducedModel& model, const Eigen::Vector3d& kv, double sing_tol) {
    ClassicalGauge c;
    c.R = Mat::Zero(8, 20);
    c.R.block(0, 0, 4, 10) = model.l();
    c.R.block(4, 10, 4, 10) = model.l();
    // the conditions are on the raw d_t u = S (v' - A1 v / 2) at t = 0, with v' = i f1
    const Reduction& red = model.reduction();
    const Mat A1 = red.Sinv(2) * red.A1(2, 0.0) * red.S(2);
    c.R.block(4, 0, 4, 10) = model.l() * (cd(0, 0.5) * A1);
    const Mat K = model.K_sigma(kv);
    c.RK = c.R * K;
    const auto s = Eigen::JacobiSVD<Mat>(c.RK).singularValues();
    int r = 0;
    while (r < 8 && s(r) > sing_tol * s(0)) ++r;
    c.obstruction = 8 - r;
    c.cond = r > 0 ? s(0) / s(r - 1) : 0.0;
    c.T = identity(20) - K * pinv(c.RK, sing_tol) * c.R;
    return c;
}

}  // namespace grav
