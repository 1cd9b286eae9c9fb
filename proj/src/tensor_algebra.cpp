#include "gravistate/tensor_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace grav {

namespace {

constexpr std::array<std::array<int, 2>, 10> kPairs = {{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
                                                         {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

Jet kron_left_identity(const Jet& m) {  // 1_4 (x) m
    Jet r(16, 16, m.terms());
    for (int n = 0; n < m.terms(); ++n) r[n] = kron(Mat::Identity(4, 4), m[n]);
    return r;
}

Jet kron_right_identity(const Jet& m) {  // m (x) 1_4
    Jet r(16, 16, m.terms());
    for (int n = 0; n < m.terms(); ++n) r[n] = kron(m[n], Mat::Identity(4, 4));
    return r;
}

Mat ginv_of(const Eigen::Matrix3d& h) {
    Mat gi = Mat::Zero(4, 4);
    gi(0, 0) = -1.0;
    gi.block(1, 1, 3, 3) = h.inverse().cast<cd>();
    return gi;
}

Mat g_of(const Eigen::Matrix3d& h) {
    Mat g = Mat::Zero(4, 4);
    g(0, 0) = -1.0;
    g.block(1, 1, 3, 3) = h.cast<cd>();
    return g;
}

}  // namespace

int fiber_dim(int k) {
    switch (k) {
        case 0: return 1;
        case 1: return 4;
        case 2: return 10;
        default: throw std::invalid_argument("fiber_dim: k must be 0, 1 or 2");
    }
}

std::array<int, 2> sym_pair(int i) { return kPairs.at(i); }

int sym_index(int a, int b) {
    if (a > b) std::swap(a, b);
    for (int i = 0; i < 10; ++i)
        if (kPairs[i][0] == a && kPairs[i][1] == b) return i;
    throw std::out_of_range("sym_index");
}

int full_dim(int rank) {
    int d = 1;
    for (int i = 0; i < rank; ++i) d *= 4;
    return d;
}

Mat sym_embed() {
    Mat e = Mat::Zero(16, 10);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) e(4 * a + b, sym_index(a, b)) = 1.0;
    return e;
}

Mat sym_project() {
    Mat p = Mat::Zero(10, 16);
    for (int i = 0; i < 10; ++i) {
        const auto [a, b] = kPairs[i];
        p(i, 4 * a + b) += 0.5;
        p(i, 4 * b + a) += 0.5;
    }
    return p;
}

Mat gram_raw(int k, const Mat& ginv) {
    switch (k) {
        case 0: return Mat::Identity(1, 1);
        case 1: return ginv;
        case 2: {
            const Mat e = sym_embed();
            return e.transpose() * (2.0 * kron(ginv, ginv)) * e;
        }
        default: throw std::invalid_argument("gram_raw");
    }
}

Jet gram_raw_jet(int k, const Jet& ginv) {
    if (k == 0) return Jet::identity(1, ginv.terms());
    if (k == 1) return ginv;
    const Mat e = sym_embed();
    Jet full(16, 16, ginv.terms());
    for (int n = 0; n < ginv.terms(); ++n)
        for (int m = 0; m <= n; ++m) full[n] += 2.0 * kron(ginv[m], ginv[n - m]);
    Jet r(10, 10, ginv.terms());
    for (int n = 0; n < ginv.terms(); ++n) r[n] = e.transpose() * full[n] * e;
    return r;
}

cd inner_Vk(const TensorFiber& u, const TensorFiber& v, const Eigen::Matrix3d& h) {
    if (u.k != v.k) throw std::invalid_argument("inner_Vk: rank mismatch");
    return u.raw.dot(gram_raw(u.k, ginv_of(h)) * v.raw);
}

Vec metric_fiber(const Mat& g) {
    Vec v(10);
    for (int i = 0; i < 10; ++i) v(i) = g(kPairs[i][0], kPairs[i][1]);
    return v;
}

Mat trace_reversal_raw(const Mat& g, const Mat& ginv) {
    Eigen::RowVectorXcd tr(10);
    for (int i = 0; i < 10; ++i) {
        const auto [a, b] = kPairs[i];
        tr(i) = ginv(a, b) * (a == b ? 1.0 : 2.0);
    }
    return Mat::Identity(10, 10) - 0.5 * metric_fiber(g) * tr;
}

Jet trace_reversal_jet(const Jet& g, const Jet& ginv) {
    const int t = std::min(g.terms(), ginv.terms());
    Jet gv(10, 1, t), tr(1, 10, t);
    for (int n = 0; n < t; ++n) {
        gv[n] = metric_fiber(g[n]);
        for (int i = 0; i < 10; ++i) {
            const auto [a, b] = kPairs[i];
            tr[n](0, i) = ginv[n](a, b) * (a == b ? 1.0 : 2.0);
        }
    }
    return Jet::identity(10, t) - (gv * tr) * cd(0.5);
}

TensorFiber trace_reversal(const TensorFiber& u, const Eigen::Matrix3d& h) {
    if (u.k != 2) throw std::invalid_argument("trace_reversal acts on V2");
    return {2, trace_reversal_raw(g_of(h), ginv_of(h)) * u.raw};
}

Jet riem_op_jet(const CurvaturePack& cp) {
    // W(ac, db) = g^{ce} g^{dm} R_{aem}^n g_{nb}
    const Jet y = cp.riemann * kron_left_identity(cp.g);
    const Jet z = kron_left_identity(cp.ginv) * y;
    const Jet w = z * kron_right_identity(cp.ginv);
    const Mat e = sym_embed(), p = sym_project();
    Jet r(10, 10, w.terms());
    for (int n = 0; n < w.terms(); ++n) {
        Mat full = Mat::Zero(16, 16);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    for (int d = 0; d < 4; ++d) full(4 * a + b, 4 * c + d) = w[n](4 * a + c, 4 * d + b);
        r[n] = p * full * e;
    }
    return r;
}

TensorFiber riem_op(const TensorFiber& u, const CurvaturePack& cp) {
    if (u.k != 2) throw std::invalid_argument("riem_op acts on V2");
    return {2, riem_op_jet(cp)[0] * u.raw};
}

Jet ricci_action_jet(int k, const CurvaturePack& cp) {
    const Jet x = cp.ricci * cp.ginv;  // Ric_a^b
    if (k == 0) return Jet(1, 1, x.terms());
    if (k == 1) return x;
    const Mat e = sym_embed(), p = sym_project();
    Jet r(10, 10, x.terms());
    for (int n = 0; n < x.terms(); ++n)
        r[n] = p * (kron(x[n], Mat::Identity(4, 4)) + kron(Mat::Identity(4, 4), x[n])) * e;
    return r;
}

Mat tau(int k) {
    switch (k) {
        case 0: return Mat::Identity(1, 1);
        case 1: {
            Mat t = Mat::Identity(4, 4);
            t(0, 0) = -1.0;
            return t;
        }
        case 2: {
            Mat t = Mat::Identity(10, 10);
            for (int i = 1; i <= 3; ++i) t(i, i) = -1.0;
            return t;
        }
        default: throw std::invalid_argument("tau");
    }
}

Mat hilbert_to_raw(int k, const Eigen::Matrix3d& h0) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h0);
    const Eigen::Matrix3d F = es.operatorSqrt();
    if (k == 0) return Mat::Identity(1, 1);
    if (k == 1) {
        Mat s = Mat::Zero(4, 4);
        s(0, 0) = 1.0;
        s.block(1, 1, 3, 3) = F.cast<cd>();
        return s;
    }
    if (k != 2) throw std::invalid_argument("hilbert_to_raw");
    Mat s = Mat::Zero(10, 10);
    // Hilbert order follows kPairs, with frame indices in place of coordinate ones.
    for (int i = 0; i < 10; ++i) {
        const auto [A, B] = kPairs[i];
        Eigen::Matrix4d u = Eigen::Matrix4d::Zero();  // raw tensor for unit Hilbert vector i
        if (A == 0 && B == 0) {
            u(0, 0) = 1.0 / std::sqrt(2.0);
        } else if (A == 0) {
            const Eigen::Vector3d col = 0.5 * F.col(B - 1);
            u.block(0, 1, 1, 3) = col.transpose();
            u.block(1, 0, 3, 1) = col;
        } else {
            Eigen::Matrix3d ut = Eigen::Matrix3d::Zero();
            const double w = (A == B) ? 1.0 / std::sqrt(2.0) : 0.5;
            ut(A - 1, B - 1) = w;
            ut(B - 1, A - 1) = w;
            u.block(1, 1, 3, 3) = F * ut * F;
        }
        for (int j = 0; j < 10; ++j) s(j, i) = u(kPairs[j][0], kPairs[j][1]);
    }
    return s;
}

Mat star(const Mat& a, const Mat& t) { return t.inverse() * a.adjoint() * t; }

Mat trace_reversal_hilbert(const Eigen::Matrix3d& h0) {
    const Mat s = hilbert_to_raw(2, h0);
    return s.inverse() * trace_reversal_raw(g_of(h0), ginv_of(h0)) * s;
}

}  // namespace grav
