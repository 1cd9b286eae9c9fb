#include "gravistate/hadamard.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

#include "gravistate/parallel.hpp"

namespace grav {

Mat principal_sqrt(const Mat& a) {
    Eigen::ComplexEigenSolver<Mat> es(a);
    const Mat& V = es.eigenvectors();
    Eigen::JacobiSVD<Mat> svd(V);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(sv.size() - 1);
    if (es.info() != Eigen::Success || !(cond < 1e8)) return a.sqrt();
    Vec d = es.eigenvalues();
    for (auto& x : d) x = std::sqrt(x);
    return V * d.asDiagonal() * V.inverse();
}

namespace {

// Solves X0 Y + Y X0 = C with X0 = U T U^*.
Mat sylvester_sym(const Mat& U, const Mat& T, const Mat& C) {
    const int n = static_cast<int>(T.rows());
    const Mat F = U.adjoint() * C * U;
    Mat Y = Mat::Zero(n, n);
    for (int i = n - 1; i >= 0; --i)
        for (int j = 0; j < n; ++j) {
            cd r = F(i, j);
            for (int k = i + 1; k < n; ++k) r -= T(i, k) * Y(k, j);
            for (int k = 0; k < j; ++k) r -= Y(i, k) * T(k, j);
            Y(i, j) = r / (T(i, i) + T(j, j));
        }
    return U * Y * U.adjoint();
}

}  // namespace

std::vector<Mat> sqrt_series(const std::vector<Mat>& a) {
    std::vector<Mat> x;
    if (a.empty()) return x;
    x.push_back(principal_sqrt(a[0]));
    Eigen::ComplexSchur<Mat> schur(x[0]);
    for (std::size_t n = 1; n < a.size(); ++n) {
        Mat c = a[n];
        for (std::size_t m = 1; m < n; ++m) c -= x[m] * x[n - m];
        x.push_back(sylvester_sym(schur.matrixU(), schur.matrixT(), c));
    }
    return x;
}

Mat riccati_b(const std::vector<Mat>& a_taylor, int order) {
    if (order + 1 > static_cast<int>(a_taylor.size()))
        throw std::invalid_argument("riccati_b: not enough Taylor terms for the requested order");
    std::vector<Mat> b = sqrt_series(a_taylor);
    for (int it = 0; it < order; ++it) {
        std::vector<Mat> rhs(b.size() - 1);
        for (std::size_t n = 0; n + 1 < b.size(); ++n) rhs[n] = a_taylor[n] + cd(0, n + 1.0) * b[n + 1];
        b = sqrt_series(rhs);
    }
    return b[0];
}

Mat hadamard_projector(const Mat& bp, const Mat& bm, int sign) {
    const Mat d = (bp - bm).inverse();
    const int n = static_cast<int>(bp.rows());
    Mat c(2 * n, 2 * n);
    if (sign > 0)
        c << -d * bm, d, -bp * d * bm, bp * d;
    else
        c << d * bp, -d, bm * d * bp, -bm * d;
    return c;
}

HadamardFamily::HadamardFamily(const ReducedModel& model, const ModeBasis& modes, HadamardOptions opt)
    : model_(&model), modes_(modes), opt_(opt), R_(opt.R) {
    const std::size_t N = modes.size();
    std::vector<double> kabs(N);
    for (std::size_t i = 0; i < N; ++i) kabs[i] = modes.wavevector(i).norm();
    for (;;) {
        // Admissibility of a(0;k) and of the resulting b on every non-filler mode.
        struct Probe {
            bool ok = true;
            double margin = std::numeric_limits<double>::infinity();
        };
        for (int k = 1; k <= 2; ++k) b_[k].assign(N, Mat());
        const auto probes = parallel_map<Probe>(N, opt_.jobs, [&](std::size_t i) {
            Probe p;
            for (int k = 1; k <= 2; ++k) {
                const int n = fiber_dim(k);
                if (kabs[i] <= R_) {
                    b_[k][i] = Mat::Identity(n, n);
                    p.margin = std::min(p.margin, 1.0);
                    continue;
                }
                const Eigen::ComplexEigenSolver<Mat> es(model.a0(k, modes.wavevector(i)), false);
                if (es.eigenvalues().real().minCoeff() < 1.0) {
                    p.ok = false;
                    return p;
                }
                b_[k][i] = build_b(k, modes.wavevector(i));
                const Mat h = 0.5 * (b_[k][i] + b_[k][i].adjoint());
                const double m = Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
                if (!(m > 0)) p.ok = false;
                p.margin = std::min(p.margin, m);
            }
            return p;
        });
        double bad = -1;
        margin_ = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < N; ++i) {
            if (!probes[i].ok) bad = std::max(bad, kabs[i]);
            margin_ = std::min(margin_, probes[i].margin);
        }
        if (bad < 0) break;
        R_ = bad;
        bool any_left = false;
        for (double x : kabs) any_left = any_left || x > R_;
        if (!any_left) throw NumericalError("no admissible cutoff R within kmax");
    }
}

Mat HadamardFamily::build_b(int k, const Eigen::Vector3d& kv) const {
    Mat b = opt_.adiabatic_order == 0 ? principal_sqrt(model_->a0(k, kv))
                                      : riccati_b(model_->a_taylor(k, kv), opt_.adiabatic_order);
    if (k == 2 && opt_.symmetrize) {
        const Mat& I = model_->I_tilde();
        b = 0.5 * (b + I * b * I);
    }
    return b;
}

ModeProjectors HadamardFamily::projectors(int k, std::size_t mode) const {
    ModeProjectors p;
    p.filler = modes_.wavevector(mode).norm() <= R_;
    p.bp = b(k, mode);
    p.bm = -star(p.bp, tau(k));
    p.cp = hadamard_projector(p.bp, p.bm, +1);
    p.cm = hadamard_projector(p.bp, p.bm, -1);
    return p;
}

double op_norm(const Mat& m) {
    if (m.size() == 0) return 0;
    return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

double weighted_norm(const Mat& m, const Eigen::Vector3d& kv, int kin, int kout, double s) {
    const Mat wo = sobolev_weight(kv, s, fiber_dim(kout));
    const Vec wi = sobolev_weight(kv, s + 1, fiber_dim(kin)).diagonal();
    return op_norm(wo * m * wi.cwiseInverse().asDiagonal());
}

double weighted_norm0(const Mat& m, const Eigen::Vector3d& kv, int k, double s) {
    const Vec w = sobolev_weight(kv, s, fiber_dim(k)).diagonal();
    return op_norm(w.asDiagonal() * m * w.cwiseInverse().asDiagonal());
}

Mat smoothing_remainder(const HadamardFamily& H, std::size_t mode) {
    const auto p1 = H.projectors(1, mode), p2 = H.projectors(2, mode);
    const Mat K = H.model().K_sigma(H.modes().wavevector(mode));
    return p2.cp * K * p1.cm - p2.cm * K * p1.cp;
}

std::vector<char> split_modes(const HadamardFamily& H) {
    std::vector<char> m(H.modes().size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = H.modes().wavevector(i).norm() > H.R();
    return m;
}

DecayReport decay_fit(const ModeBasis& modes, const std::vector<double>& norms, int lo, int hi,
                      const std::vector<char>& include) {
    DecayReport r;
    std::vector<double> smax(hi + 1, 0.0);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& n = modes[i];
        const bool in = include.empty() || include[i];
        r.rows.push_back({n, modes.wavevector(i).norm(), norms[i], in});
        const int sh = std::max({std::abs(n[0]), std::abs(n[1]), std::abs(n[2])});
        if (in && sh >= lo && sh <= hi) smax[sh] = std::max(smax[sh], norms[i]);
    }
    std::vector<double> x, y;
    bool zero = false;
    for (int sh = lo; sh <= hi && sh <= modes.kmax(); ++sh) {
        r.shell_max.emplace_back(sh, smax[sh]);
        if (smax[sh] <= 0) zero = true;
        x.push_back(std::log(static_cast<double>(sh)));
        y.push_back(std::log(smax[sh]));
    }
    if (x.size() < 2) {
        r.exponent = std::numeric_limits<double>::quiet_NaN();
    } else if (zero) {
        r.exponent = std::numeric_limits<double>::infinity();
    } else {
        const double n = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        r.exponent = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return r;
}

}  // namespace grav
