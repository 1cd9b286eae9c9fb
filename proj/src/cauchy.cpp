#include "gravistate/cauchy.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace grav {

namespace {

Mat block2(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
    Mat r(a.rows() + c.rows(), a.cols() + b.cols());
    r << a, b, c, d;
    return r;
}

}  // namespace

ReducedModel::ReducedModel(const SpacetimeMetric& metric, ModelOptions opt)
    : metric_(metric), opt_(opt), red_(metric, opt.jet_terms), einstein_(check_einstein(metric).is_einstein) {
    const auto hj = metric.h_taylor(0.0, 2);
    h0_ = hj[0];
    r0_ = 0.5 * hj[1] * h0_.inverse();
    itilde_ = trace_reversal_hilbert(h0_);

    const auto pts = KPoly::sample_points();
    const Mat I1 = Mat::Identity(4, 4), I2 = Mat::Identity(10, 10);

    // Taylor data at the Cauchy surface
    std::array<std::vector<std::array<Mat, 10>>, 3> a_samples;
    std::array<std::array<Mat, 10>, 4> k_samples, d_samples;
    for (int p = 0; p < 10; ++p) {
        const FieldOps ops(metric, 0.0, pts[p], opt.jet_terms);
        for (int k = 1; k <= 2; ++k) {
            const Mat& I = k == 1 ? I1 : I2;
            const DiffOp Dr = red_.reduce(ops.D(k), k, k, 0.0, I, I);
            const Jet& a = Dr.coef(0);
            a_samples[k].resize(a.terms());
            for (int n = 0; n < a.terms(); ++n) a_samples[k][n][p] = a[n];
        }
        const DiffOp Kr = red_.reduce(ops.K(), 1, 2, 0.0, I1, I2);
        const DiffOp Dl = red_.reduce(ops.Kstar(), 2, 1, 0.0, I2, I1);
        for (const auto& [L, out] : {std::pair{&Kr, &k_samples}, std::pair{&Dl, &d_samples}}) {
            (*out)[0][p] = L->coef(0)[0];
            (*out)[1][p] = L->coef(0)[1];
            (*out)[2][p] = L->coef(1)[0];
            (*out)[3][p] = L->coef(1)[1];
        }
    }
    for (int k = 1; k <= 2; ++k)
        for (const auto& s : a_samples[k]) a_taylor_[k].push_back(KPoly::from_samples(s));
    for (int i = 0; i < 4; ++i) {
        kred_[i] = KPoly::from_samples(k_samples[i]);
        dred_[i] = KPoly::from_samples(d_samples[i]);
    }

    // Time tables on Chebyshev points of the interval
    const auto& I = metric.interval();
    const int N = opt.cheb_nodes;
    for (int j = 0; j < N; ++j)
        nodes_.push_back(0.5 * (I.lo + I.hi) + 0.5 * (I.hi - I.lo) * std::cos(M_PI * j / (N - 1)));
    for (int k = 1; k <= 2; ++k) {
        const auto W = red_.W_at(k, nodes_);
        for (int j = 0; j < N; ++j) {
            std::array<Mat, 10> v;
            for (int p = 0; p < 10; ++p) {
                const FieldOps ops(metric, nodes_[j], pts[p], 3);
                v[p] = red_.reduce(ops.D(k), k, k, nodes_[j], W[j], W[j]).coef(0)[0];
            }
            a_nodes_[k].push_back(KPoly::from_samples(v));
        }
    }

    // l in Hilbert components
    const Mat gi0 = Mat(spacetime_metric_jet(metric.h_jet(0.0, 1))[0]).inverse();
    Mat g0 = Mat::Zero(4, 4);
    g0(0, 0) = -1.0;
    g0.block(1, 1, 3, 3) = h0_.cast<cd>();
    Mat lraw = Mat::Zero(4, 10);
    lraw.row(0) = 0.5 * metric_fiber(g0).transpose() * gram_raw(2, gi0);
    for (int i = 1; i <= 3; ++i) lraw(i, i) = 2.0;
    l_ = red_.Sinv(1) * lraw * red_.S(2);
}

std::vector<Mat> ReducedModel::a_taylor(int k, const Eigen::Vector3d& kv) const {
    std::vector<Mat> r;
    for (const auto& p : a_taylor_.at(k)) r.push_back(p(kv));
    return r;
}

std::vector<Mat> ReducedModel::a_nodes(int k, const Eigen::Vector3d& kv) const {
    std::vector<Mat> r;
    for (const auto& p : a_nodes_.at(k)) r.push_back(p(kv));
    return r;
}

Mat cauchy_operator(const Mat& L0, const Mat& L0d, const Mat& L1, const Mat& L1d, const Mat& a_in) {
    const cd i(0, 1);
    return block2(L0, i * L1, -i * (L0d - L1 * a_in), L0 + L1d);
}

Mat ReducedModel::K_sigma(const Eigen::Vector3d& kv) const {
    return cauchy_operator(kred_[0](kv), kred_[1](kv), kred_[2](kv), kred_[3](kv), a0(1, kv));
}

Mat ReducedModel::K_sigma_dagger(const Eigen::Vector3d& kv) const {
    return cauchy_operator(dred_[0](kv), dred_[1](kv), dred_[2](kv), dred_[3](kv), a0(2, kv));
}

Mat ReducedModel::I_sigma() const {
    const Mat z = Mat::Zero(10, 10);
    return block2(itilde_, z, z, itilde_);
}

Mat ReducedModel::q(int k) {
    const Mat t = tau(k), z = Mat::Zero(t.rows(), t.cols());
    return block2(z, t, t, z);
}

Mat ReducedModel::q_I2() const { return q(2) * I_sigma(); }

Mat ReducedModel::q_tilde(int n) {
    const Mat z = Mat::Zero(n, n), one = Mat::Identity(n, n);
    return block2(z, one, one, z);
}

Mat ReducedModel::B(const Eigen::Vector3d& kv) const {
    const Eigen::Matrix3d hinv = h0_.inverse();
    const double tr = r0_.trace();
    Mat b = Mat::Zero(4, 4);
    b(0, 0) = 0.5 * tr;
    const cd i(0, 1);
    b.block(0, 1, 1, 3) = -i * (hinv * kv).transpose().cast<cd>();  // delta_Sigma
    b.block(1, 0, 3, 1) = i * kv.cast<cd>();                         // d_Sigma
    b.block(1, 1, 3, 3) = (-0.5 * tr * Eigen::Matrix3d::Identity() - r0_).cast<cd>();
    return red_.Sinv(1) * b * red_.S(1);
}

// ---------------------------------------------------------------- ModeDynamics

ModeDynamics::ModeDynamics(const ReducedModel& model, int k, const Eigen::Vector3d& kv)
    : model_(&model), n_(fiber_dim(k)), table_(model.a_nodes(k, kv)),
      abs_tol_(model.options().ode_abs), rel_tol_(model.options().ode_rel) {
    const int N = static_cast<int>(table_.size());
    bw_.resize(N);
    for (int j = 0; j < N; ++j) bw_[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N - 1) ? 0.5 : 1.0);
}

Mat ModeDynamics::a(double s) const {
    const auto& x = model_->nodes();
    double den = 0;
    Mat num = Mat::Zero(n_, n_);
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = s - x[j];
        if (d == 0.0) return table_[j];
        const double w = bw_[j] / d;
        num += w * table_[j];
        den += w;
    }
    return num / den;
}

namespace {

using State = std::vector<cd>;

State pack(const Mat& data, int n) {  // (f0, f1) -> (u, u')
    const int m = static_cast<int>(data.cols());
    State x(2 * n * m);
    Eigen::Map<Mat> U(x.data(), n, m), P(x.data() + n * m, n, m);
    U = data.topRows(n);
    P = cd(0, 1) * data.bottomRows(n);
    return x;
}

Mat unpack(const State& x, int n, int m) {
    Eigen::Map<const Mat> U(x.data(), n, m), P(x.data() + n * m, n, m);
    Mat d(2 * n, m);
    d.topRows(n) = U;
    d.bottomRows(n) = cd(0, -1) * P;
    return d;
}

}  // namespace

Mat ModeDynamics::evolve(const Mat& data, double s0, double s1) const {
    return evolve_with_source(data, nullptr, s0, s1);
}

Mat ModeDynamics::evolve_with_source(const Mat& data, const std::function<Mat(double)>& F, double s0,
                                     double s1) const {
    const int n = n_, m = static_cast<int>(data.cols());
    State x = pack(data, n);
    if (s0 == s1) return unpack(x, n, m);
    const auto& I = model_->metric().interval();
    if (s0 < I.lo || s0 > I.hi || s1 < I.lo || s1 > I.hi) throw std::domain_error("evolve: time outside the interval");
    auto rhs = [&](const State& y, State& dy, double t) {
        Eigen::Map<const Mat> U(y.data(), n, m), P(y.data() + n * m, n, m);
        Eigen::Map<Mat> dU(dy.data(), n, m), dP(dy.data() + n * m, n, m);
        dU = P;
        dP = -a(t) * U;
        if (F) dP += F(t);
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(abs_tol_, rel_tol_, ode::runge_kutta_fehlberg78<State>());
    const std::size_t steps = ode::integrate_adaptive(stepper, rhs, x, s0, s1, (s1 - s0) / 32);
    if (steps > 1000000) throw NumericalError("evolve: step limit exceeded");
    for (const cd& v : x)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("evolve: non-finite state");
    return unpack(x, n, m);
}

Mat ModeDynamics::causal_data(const std::function<Mat(double)>& F, double ta, double tb) const {
    const Mat probe = F(0.5 * (ta + tb));
    const Mat zero = Mat::Zero(2 * n_, probe.cols());
    const Mat at_b = evolve_with_source(zero, F, ta, tb);
    return evolve(at_b, tb, 0.0);
}

double japanese(const Eigen::Vector3d& kv) { return std::sqrt(1.0 + kv.squaredNorm()); }

Mat sobolev_weight(const Eigen::Vector3d& kv, double s, int n) {
    const double j = japanese(kv);
    Mat w = Mat::Zero(2 * n, 2 * n);
    w.topLeftCorner(n, n).diagonal().setConstant(std::pow(j, s));
    w.bottomRightCorner(n, n).diagonal().setConstant(std::pow(j, s - 1));
    return w;
}

}  // namespace grav
