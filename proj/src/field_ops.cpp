#include "gravistate/field_ops.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

namespace grav {

// ---------------------------------------------------------------- DiffOp

DiffOp::DiffOp(int rows, int cols, int terms) : rows_(rows), cols_(cols) { A_.emplace_back(rows, cols, terms); }

DiffOp DiffOp::multiplication(const Jet& m) {
    DiffOp r;
    r.rows_ = m.rows();
    r.cols_ = m.cols();
    r.A_.push_back(m);
    return r;
}

DiffOp DiffOp::dt(int n, int terms) {
    DiffOp r(n, n, terms);
    r.set_coef(1, Jet::identity(n, terms));
    return r;
}

int DiffOp::terms() const {
    int t = A_.empty() ? 0 : A_[0].terms();
    for (const auto& a : A_) t = std::min(t, a.terms());
    return t;
}

void DiffOp::set_coef(int j, const Jet& a) {
    if (a.rows() != rows_ || a.cols() != cols_) throw std::invalid_argument("DiffOp::set_coef: shape");
    const int t = A_.empty() ? a.terms() : terms();
    while (static_cast<int>(A_.size()) <= j) A_.emplace_back(rows_, cols_, t);
    A_[j] = a;
}

DiffOp DiffOp::operator*(const DiffOp& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("DiffOp composition: shape");
    const int t = std::min(terms(), o.terms());
    DiffOp r(rows_, o.cols_, t);
    // A_j d^j (B_l d^l) = sum_m C(j,m) A_j B_l^{(m)} d^{j-m+l}
    for (int j = 0; j <= order(); ++j) {
        if (A_[j].max_abs() == 0.0) continue;
        for (int l = 0; l <= o.order(); ++l) {
            Jet Bm = o.A_[l];
            for (int m = 0; m <= j; ++m) {
                if (m > 0) Bm = Bm.derivative();
                if (Bm.terms() == 0) break;
                const int p = j - m + l;
                Jet term = (A_[j] * Bm) * cd(binom(j, m));
                if (p > r.order()) r.set_coef(p, Jet(rows_, o.cols_, term.terms()));
                r.A_[p] = r.A_[p] + term;
            }
        }
    }
    return r;
}

DiffOp DiffOp::operator+(const DiffOp& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("DiffOp sum: shape");
    const int t = std::min(terms(), o.terms());
    DiffOp r(rows_, cols_, t);
    const int ord = std::max(order(), o.order());
    for (int j = 0; j <= ord; ++j) {
        Jet a(rows_, cols_, t);
        if (j <= order()) a = a + A_[j];
        if (j <= o.order()) a = a + o.A_[j];
        r.set_coef(j, a);
    }
    return r;
}

DiffOp DiffOp::operator-(const DiffOp& o) const { return *this + (-o); }

DiffOp DiffOp::operator*(cd s) const {
    DiffOp r = *this;
    for (auto& a : r.A_) a = a * s;
    return r;
}

DiffOp DiffOp::lmul(const Mat& m) const {
    DiffOp r = *this;
    r.rows_ = static_cast<int>(m.rows());
    for (auto& a : r.A_) a = m * a;
    return r;
}

DiffOp DiffOp::rmul(const Mat& m) const {
    DiffOp r = *this;
    r.cols_ = static_cast<int>(m.cols());
    for (auto& a : r.A_) a = a.rmul(m);
    return r;
}

double DiffOp::max_abs() const {
    double v = 0.0;
    for (const auto& a : A_)
        if (a.terms() > 0 && a[0].size()) v = std::max(v, a[0].cwiseAbs().maxCoeff());
    return v;
}

Jet DiffOp::apply(const Jet& section) const {
    Jet out(rows_, section.cols(), std::max(0, std::min(terms(), section.terms() - order())));
    Jet d = section;
    for (int j = 0; j <= order(); ++j) {
        if (j > 0) d = d.derivative();
        out = out + A_[j] * d;
    }
    return out;
}

DiffOp DiffOp::formal_adjoint(const Mat& tau_in, const Mat& tau_out) const {
    // integrating by parts: (L u | v) = (u | L^* v) with forms u^* tau v
    const Mat tin_inv = tau_in.inverse();
    const int t = terms();
    DiffOp r(cols_, rows_, std::max(1, t - order()));
    for (int j = 0; j <= order(); ++j) {
        const Jet base = tin_inv * A_[j].adjoint().rmul(tau_out);
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        for (int m = 0; m <= j; ++m) {
            Jet term = base.derivative(j - m) * cd(sign * binom(j, m));
            if (m > r.order()) r.set_coef(m, Jet(cols_, rows_, term.terms()));
            r.A_[m] = r.A_[m] + term;
        }
    }
    return r;
}

double op_residual(const DiffOp& L, const DiffOp& M) {
    const double scale = std::max({1.0, L.max_abs(), M.max_abs()});
    return (L - M).max_abs() / scale;
}

// ---------------------------------------------------------------- FieldOps

namespace {

int slot_digit(int idx, int rank, int m) {  // m-th index (0 = most significant)
    for (int i = 0; i < rank - 1 - m; ++i) idx /= 4;
    return idx % 4;
}

int replace_digit(int idx, int rank, int m, int c) {
    int w = 1;
    for (int i = 0; i < rank - 1 - m; ++i) w *= 4;
    return idx + (c - (idx / w) % 4) * w;
}

}  // namespace

FieldOps::FieldOps(const SpacetimeMetric& metric, double s, const Eigen::Vector3d& k, int terms)
    : cp_(build_curvature(metric, s, terms)), k_(k), lambda_(metric.lambda()), terms_(terms) {}

DiffOp FieldOps::nabla(int rank) const {
    const int din = full_dim(rank), dout = 4 * din;
    const int t = cp_.christoffel[0].terms();
    DiffOp L(dout, din, t);
    Jet a1(dout, din, t);
    a1[0].block(0, 0, din, din).setIdentity();
    L.set_coef(1, a1);
    Jet& a0 = L.coef(0);
    for (int n = 0; n < t; ++n)
        for (int a = 0; a < 4; ++a)
            for (int I = 0; I < din; ++I) {
                const int row = a * din + I;
                if (n == 0 && a > 0) a0[0](row, I) += cd(0, k_(a - 1));
                for (int m = 0; m < rank; ++m) {
                    const int bm = slot_digit(I, rank, m);
                    for (int c = 0; c < 4; ++c) a0[n](row, replace_digit(I, rank, m, c)) -= cp_.christoffel[c][n](a, bm);
                }
            }
    return L;
}

DiffOp FieldOps::trace_nabla(int rank) const {
    const int dout = full_dim(rank), din = 4 * dout;
    const Jet& gi = cp_.ginv;
    const int t = std::min(gi.terms(), cp_.christoffel[0].terms());
    // H[e](b,c) = g^{ab} Gamma^e_{ac}; Q[e] = g^{ab} Gamma^e_{ab}
    std::array<Jet, 4> H;
    for (int e = 0; e < 4; ++e) H[e] = gi * cp_.christoffel[e].truncated(t);
    DiffOp L(dout, din, t);
    Jet a1(dout, din, t);
    for (int n = 0; n < t; ++n)
        for (int J = 0; J < dout; ++J)
            for (int b = 0; b < 4; ++b) a1[n](J, b * dout + J) = gi[n](0, b);
    L.set_coef(1, a1);
    Jet& a0 = L.coef(0);
    for (int n = 0; n < t; ++n)
        for (int J = 0; J < dout; ++J) {
            for (int b = 0; b < 4; ++b) {
                cd lk = 0;
                for (int a = 1; a < 4; ++a) lk += gi[n](a, b) * cd(0, k_(a - 1));
                a0[n](J, b * dout + J) += lk;
            }
            for (int e = 0; e < 4; ++e) a0[n](J, e * dout + J) -= H[e][n].trace();
            for (int m = 0; m < rank; ++m) {
                const int jm = slot_digit(J, rank, m);
                for (int b = 0; b < 4; ++b)
                    for (int e = 0; e < 4; ++e) a0[n](J, b * dout + replace_digit(J, rank, m, e)) -= H[e][n](b, jm);
            }
        }
    return L;
}

DiffOp FieldOps::d(int k) const {
    if (k == 0) return nabla(0);
    if (k == 1) return nabla(1).lmul(sym_project());
    throw std::invalid_argument("d: k must be 0 or 1");
}

DiffOp FieldOps::delta(int k) const {
    if (k == 1) return -trace_nabla(0);
    if (k == 2) return (trace_nabla(1) * cd(-2.0)).rmul(sym_embed());
    throw std::invalid_argument("delta: k must be 1 or 2");
}

DiffOp FieldOps::box(int k) const {
    switch (k) {
        case 0: return trace_nabla(0) * nabla(0);
        case 1: return trace_nabla(1) * nabla(1);
        case 2: return (trace_nabla(2) * nabla(2)).lmul(sym_project()).rmul(sym_embed());
        default: throw std::invalid_argument("box");
    }
}

DiffOp FieldOps::I() const { return DiffOp::multiplication(trace_reversal_jet(cp_.g, cp_.ginv)); }

DiffOp FieldOps::Riem() const { return DiffOp::multiplication(riem_op_jet(cp_)); }

DiffOp FieldOps::K() const { return I() * d(1); }

DiffOp FieldOps::Kstar() const { return delta(2); }

DiffOp FieldOps::D(int k) const {
    const int n = fiber_dim(k);
    const DiffOp shift = DiffOp::multiplication(Jet::identity(n, terms_) * cd(-2.0 * lambda_));
    switch (k) {
        case 0: return -box(0) + shift;
        case 1: return -box(1) + DiffOp::multiplication(ricci_action_jet(1, cp_)) + shift;
        case 2: return -box(2) + DiffOp::multiplication(ricci_action_jet(2, cp_)) + Riem() * cd(2.0) + shift;
        default: throw std::invalid_argument("D");
    }
}

DiffOp FieldOps::P() const { return -box(2) - I() * d(1) * delta(2) + Riem() * cd(2.0); }

Jet FieldOps::gram(int k) const { return gram_raw_jet(k, cp_.ginv); }

DiffOp FieldOps::g_pairing() const {
    const Jet gr = gram(2);
    Jet gv(1, 10, cp_.g.terms());
    for (int n = 0; n < gv.terms(); ++n) gv[n] = metric_fiber(cp_.g[n]).transpose();
    return DiffOp::multiplication(gv * gr);
}

DiffOp FieldOps::g_insert() const {
    Jet gv(10, 1, cp_.g.terms());
    for (int n = 0; n < gv.terms(); ++n) gv[n] = metric_fiber(cp_.g[n]);
    return DiffOp::multiplication(gv);
}

// ---------------------------------------------------------------- Reduction

Reduction::Reduction(const SpacetimeMetric& metric, int terms) : metric_(metric), terms_(terms) {
    const Eigen::Matrix3d h0 = metric.h(0.0);
    for (int k = 0; k <= 2; ++k) {
        S_.push_back(hilbert_to_raw(k, h0));
        Sinv_.push_back(S_.back().inverse());
    }
}

Mat Reduction::A1(int k, double s) const {
    const FieldOps ops(metric_, s, Eigen::Vector3d::Zero(), 3);
    const DiffOp D = ops.D(k);
    return D.order() >= 1 ? D.coef(1)[0] : Mat::Zero(fiber_dim(k), fiber_dim(k));
}

Mat Reduction::W(int k, double s) const { return W_at(k, {s}).front(); }

std::vector<Mat> Reduction::W_at(int k, const std::vector<double>& s) const {
    const int n = fiber_dim(k);
    using State = std::vector<cd>;
    namespace ode = boost::numeric::odeint;
    auto rhs = [&](const State& y, State& dy, double t) {
        const Mat a = A1(k, t);
        Eigen::Map<const Mat> Y(y.data(), n, n);
        Eigen::Map<Mat> DY(dy.data(), n, n);
        DY = -0.5 * a * Y;
    };
    std::vector<Mat> out(s.size(), Mat::Identity(n, n));
    for (int side : {1, -1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (side * s[i] > 0) idx.push_back(i);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return side * s[a] < side * s[b]; });
        State x(n * n, cd(0));
        for (int i = 0; i < n; ++i) x[i * n + i] = 1.0;
        double t = 0.0;
        auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_fehlberg78<State>());
        for (std::size_t i : idx) {
            if (s[i] != t) ode::integrate_adaptive(stepper, rhs, x, t, s[i], (s[i] - t) / 8);
            t = s[i];
            out[i] = Eigen::Map<const Mat>(x.data(), n, n);
        }
    }
    return out;
}

Mat Reduction::W_closed_form(const SpacetimeMetric& metric, int k, double s) {
    const int n = fiber_dim(k);
    if (metric.kind() == MetricKind::StaticFlat) return Mat::Identity(n, n);
    if (metric.kind() != MetricKind::Kasner) throw std::invalid_argument("W_closed_form: StaticFlat or Kasner only");
    const double x = (metric.t0() + s) / metric.t0();
    const auto& p = metric.kasner_exponents();
    auto pw = [&](int a) { return a == 0 ? 0.0 : p[a - 1]; };
    Mat w = Mat::Zero(n, n);
    if (k == 0) {
        w(0, 0) = std::pow(x, -0.5);
    } else if (k == 1) {
        for (int a = 0; a < 4; ++a) w(a, a) = std::pow(x, pw(a) - 0.5);
    } else {
        for (int i = 0; i < 10; ++i) {
            const auto [a, b] = sym_pair(i);
            w(i, i) = std::pow(x, pw(a) + pw(b) - 0.5);
        }
    }
    return w;
}

Jet Reduction::W_jet(int k, double s, const Mat& W_at_s, int terms) const {
    const FieldOps ops(metric_, s, Eigen::Vector3d::Zero(), terms + 2);
    const Jet A1 = ops.D(k).coef(1);
    // (n+1) W_{n+1} = -1/2 sum_m A1_m W_{n-m}
    Jet w(W_at_s.rows(), W_at_s.cols(), A1.terms() + 1);
    w[0] = W_at_s;
    for (int n = 0; n < A1.terms(); ++n) {
        Mat acc = Mat::Zero(W_at_s.rows(), W_at_s.cols());
        for (int m = 0; m <= n; ++m) acc += A1[m] * w[n - m];
        w[n + 1] = -0.5 * acc / double(n + 1);
    }
    return w;
}

DiffOp Reduction::reduce(const DiffOp& raw, int kin, int kout, double s) const {
    const Mat Win = W(kin, s);
    const Mat Wout = (kout == kin) ? Win : W(kout, s);
    return reduce(raw, kin, kout, s, Win, Wout);
}

DiffOp Reduction::reduce(const DiffOp& raw, int kin, int kout, double s, const Mat& Win, const Mat& Wout) const {
    const int t = raw.terms() + raw.order();
    const Jet win = W_jet(kin, s, Win, t);
    const Jet wout_inv = W_jet(kout, s, Wout, t).inverse();
    return DiffOp::multiplication(wout_inv).lmul(Sinv_[kout]) * raw * DiffOp::multiplication(win.rmul(S_[kin]));
}

// ---------------------------------------------------------------- KPoly

std::array<double, 10> KPoly::monomials(const Eigen::Vector3d& k) {
    return {1.0, k(0), k(1), k(2), k(0) * k(0), k(0) * k(1), k(0) * k(2), k(1) * k(1), k(1) * k(2), k(2) * k(2)};
}

std::array<Eigen::Vector3d, 10> KPoly::sample_points() {
    std::array<Eigen::Vector3d, 10> p;
    p[0].setZero();
    for (int i = 0; i < 3; ++i) {
        p[1 + 2 * i] = Eigen::Vector3d::Unit(i);
        p[2 + 2 * i] = -Eigen::Vector3d::Unit(i);
    }
    p[7] = Eigen::Vector3d(1, 1, 0);
    p[8] = Eigen::Vector3d(1, 0, 1);
    p[9] = Eigen::Vector3d(0, 1, 1);
    return p;
}

KPoly KPoly::from_samples(const std::array<Mat, 10>& f) {
    KPoly p;
    const Mat& c0 = f[0];
    std::array<Mat, 3> lin, quad;
    for (int i = 0; i < 3; ++i) {
        lin[i] = 0.5 * (f[1 + 2 * i] - f[2 + 2 * i]);
        quad[i] = 0.5 * (f[1 + 2 * i] + f[2 + 2 * i]) - c0;
    }
    p.c_[0] = c0;
    for (int i = 0; i < 3; ++i) p.c_[1 + i] = lin[i];
    p.c_[4] = quad[0];
    p.c_[7] = quad[1];
    p.c_[9] = quad[2];
    p.c_[5] = f[7] - c0 - lin[0] - lin[1] - quad[0] - quad[1];
    p.c_[6] = f[8] - c0 - lin[0] - lin[2] - quad[0] - quad[2];
    p.c_[8] = f[9] - c0 - lin[1] - lin[2] - quad[1] - quad[2];
    return p;
}

KPoly KPoly::extract(const std::function<Mat(const Eigen::Vector3d&)>& f) {
    const auto pts = sample_points();
    std::array<Mat, 10> v;
    for (int i = 0; i < 10; ++i) v[i] = f(pts[i]);
    return from_samples(v);
}

Mat KPoly::operator()(const Eigen::Vector3d& k) const {
    const auto m = monomials(k);
    Mat r = m[0] * c_[0];
    for (int i = 1; i < 10; ++i) r += m[i] * c_[i];
    return r;
}

}  // namespace grav
