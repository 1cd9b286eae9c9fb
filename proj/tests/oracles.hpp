#pragma once
// Independent reference values used by the unit and acceptance tests.
// Nothing here calls into the library's curvature or operator code.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

// Ricci of g = -dt^2 + sum_i t^{2 p_i} dx_i^2, from the diagonal-metric formulas
// R_tt = -sum a_i''/a_i, R_ii = a_i^2 (a_i''/a_i + (a_i'/a_i) sum_{j != i} a_j'/a_j).
inline Eigen::Matrix4d kasner_ricci(const std::array<double, 3>& p, double t) {
    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    const double S = p[0] + p[1] + p[2];
    for (int i = 0; i < 3; ++i) {
        r(0, 0) -= p[i] * (p[i] - 1) / (t * t);
        r(i + 1, i + 1) = std::pow(t, 2 * p[i] - 2) * (p[i] * (p[i] - 1) + p[i] * (S - p[i]));
    }
    return r;
}

// Gamma^i_{tj} = 1/2 h^{ik} d_t h_kj by a central difference.
template <class H>
Eigen::Matrix3d mixed_christoffel_fd(H h, double t, double step = 1e-5) {
    const Eigen::Matrix3d dh = (h(t + step) - h(t - step)) / (2 * step);
    return 0.5 * h(t).inverse() * dh;
}

// Least-squares slope of log y against log x; returns -slope.
inline double decay_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// u'' + w^2 u = 0 with data (v, -i v') = (1, -w): u = e^{-iwt}.
inline std::complex<double> oscillator(double w, double t) { return std::exp(std::complex<double>(0, -w * t)); }

// Zero mode on flat space: solutions of D_1 w = 0 are w = alpha + beta t. Gauge data of
// K w and the linear map beta -> R_Sigma K_Sigma f in the frame where c^+ = c^- = 1/2 on
// k = 0 (b = 1). Returns (dim kernel, dim cokernel) of the resulting 8x8 system by
// explicit elimination on the 8 unknowns (alpha, beta).
struct ZeroModeCounts {
    int kernel;
    int cokernel;
};

inline ZeroModeCounts flat_zero_mode_counts() {
    // K w = I dw with dw_ab = beta_(a delta_b)t (only time derivatives survive).
    // In raw components (tt, ti, ij): (dw)_tt = beta_t, (dw)_ti = beta_i / 2, (dw)_ij = 0.
    // I u = u - 1/2 tr_g(u) g with tr_g u = -u_tt + sum u_ii, so (Kw)_tt = beta_t / 2,
    // (Kw)_ti = beta_i / 2, (Kw)_ij = beta_t / 2 delta_ij. Kw is constant in t, so
    // K_Sigma f = ((Kw), 0), with f0 = alpha, f1 = -i beta.
    // l u = (1/2 (g|u), 2 u_tSigma) with (g|u) = 2 tr(g^{-1} u) = 2 (-u_tt + sum_i u_ii) for h = delta.
    // On k = 0 with b = 1, c^+-(f0, 0) = 1/2 (f0, +-f0), so pi0 c^+- (u, 0) = u / 2 and
    // R_Sigma K_Sigma f = (l(Kw)/2, l(Kw)/2).
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(8, 8);  // rows: R K f, cols: (alpha_0..3, beta_0..3)
    for (int j = 0; j < 4; ++j) {
        double beta[4] = {0, 0, 0, 0};
        beta[j] = 1.0;
        const double utt = beta[0] / 2, uii = beta[0] / 2;
        double ut[3] = {beta[1] / 2, beta[2] / 2, beta[3] / 2};
        const double pair = 2 * (-utt + 3 * uii);
        double lu[4] = {0.5 * pair, 2 * ut[0], 2 * ut[1], 2 * ut[2]};
        for (int r = 0; r < 4; ++r) {
            M(r, 4 + j) = lu[r] / 2;
            M(4 + r, 4 + j) = lu[r] / 2;
        }
    }
    // Gaussian elimination rank
    Eigen::MatrixXd A = M;
    int rank = 0;
    for (int c = 0; c < 8 && rank < 8; ++c) {
        int piv = rank;
        for (int r = rank; r < 8; ++r)
            if (std::abs(A(r, c)) > std::abs(A(piv, c))) piv = r;
        if (std::abs(A(piv, c)) < 1e-12) continue;
        A.row(rank).swap(A.row(piv));
        for (int r = 0; r < 8; ++r)
            if (r != rank) A.row(r) -= A(r, c) / A(rank, c) * A.row(rank);
        ++rank;
    }
    return {8 - rank, 8 - rank};
}

}  // namespace oracle
