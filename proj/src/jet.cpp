#include "gravistate/jet.hpp"

#include <algorithm>
#include <stdexcept>

namespace grav {

Jet::Jet(int rows, int cols, int terms) : rows_(rows), cols_(cols) {
    c_.assign(std::max(terms, 0), Mat::Zero(rows, cols));
}

Jet Jet::constant(const Mat& m, int terms) {
    Jet j(static_cast<int>(m.rows()), static_cast<int>(m.cols()), terms);
    if (terms > 0) j.c_[0] = m;
    return j;
}

Jet Jet::identity(int n, int terms) { return constant(Mat::Identity(n, n), terms); }

Jet Jet::derivative(int times) const {
    Jet r = *this;
    for (int k = 0; k < times; ++k) {
        Jet d(rows_, cols_, r.terms() - 1);
        for (int n = 0; n + 1 < r.terms(); ++n) d.c_[n] = r.c_[n + 1] * static_cast<double>(n + 1);
        r = std::move(d);
    }
    return r;
}

Jet Jet::truncated(int terms) const {
    Jet r = *this;
    if (terms < r.terms()) r.c_.resize(std::max(terms, 0));
    return r;
}

Jet Jet::adjoint() const {
    Jet r(cols_, rows_, terms());
    for (int n = 0; n < terms(); ++n) r.c_[n] = c_[n].adjoint();
    return r;
}

Jet Jet::inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("Jet::inverse: not square");
    Jet r(rows_, cols_, terms());
    if (terms() == 0) return r;
    Eigen::PartialPivLU<Mat> lu(c_[0]);
    r.c_[0] = lu.inverse();
    for (int n = 1; n < terms(); ++n) {
        Mat acc = Mat::Zero(rows_, cols_);
        for (int m = 1; m <= n; ++m) acc += c_[m] * r.c_[n - m];
        r.c_[n] = -r.c_[0] * acc;
    }
    return r;
}

Jet Jet::operator+(const Jet& o) const {
    const int t = std::min(terms(), o.terms());
    Jet r(rows_, cols_, t);
    for (int n = 0; n < t; ++n) r.c_[n] = c_[n] + o.c_[n];
    return r;
}

Jet Jet::operator-(const Jet& o) const {
    const int t = std::min(terms(), o.terms());
    Jet r(rows_, cols_, t);
    for (int n = 0; n < t; ++n) r.c_[n] = c_[n] - o.c_[n];
    return r;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (auto& m : r.c_) m = -m;
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    *this = *this + o;
    return *this;
}

Jet Jet::operator*(const Jet& o) const {
    const int t = std::min(terms(), o.terms());
    Jet r(rows_, o.cols_, t);
    for (int n = 0; n < t; ++n) {
        Mat acc = Mat::Zero(rows_, o.cols_);
        for (int m = 0; m <= n; ++m) acc.noalias() += c_[m] * o.c_[n - m];
        r.c_[n] = std::move(acc);
    }
    return r;
}

Jet Jet::operator*(cd s) const {
    Jet r = *this;
    for (auto& m : r.c_) m *= s;
    return r;
}

Jet operator*(const Mat& m, const Jet& j) {
    Jet r(static_cast<int>(m.rows()), j.cols(), j.terms());
    for (int n = 0; n < j.terms(); ++n) r[n] = m * j[n];
    return r;
}

Jet Jet::rmul(const Mat& m) const {
    Jet r(rows_, static_cast<int>(m.cols()), terms());
    for (int n = 0; n < terms(); ++n) r.c_[n] = c_[n] * m;
    return r;
}

double Jet::max_abs() const {
    double v = 0.0;
    for (const auto& m : c_)
        if (m.size()) v = std::max(v, m.cwiseAbs().maxCoeff());
    return v;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace grav
