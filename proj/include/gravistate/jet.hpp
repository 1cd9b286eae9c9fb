#pragma once
// Truncated Taylor series in s = t - t_ref with complex matrix coefficients.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace grav {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

class Jet {
public:
    Jet() = default;
    Jet(int rows, int cols, int terms);
    static Jet constant(const Mat& m, int terms);
    static Jet identity(int n, int terms);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int terms() const { return static_cast<int>(c_.size()); }

    Mat& operator[](int n) { return c_[n]; }
    const Mat& operator[](int n) const { return c_[n]; }

    Jet derivative(int times = 1) const;
    Jet truncated(int terms) const;
    Jet adjoint() const;  // coefficientwise conjugate transpose
    Jet inverse() const;

    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator-() const;
    Jet operator*(const Jet& o) const;
    Jet operator*(cd s) const;
    Jet& operator+=(const Jet& o);

    // left/right multiplication by a constant matrix
    friend Jet operator*(const Mat& m, const Jet& j);
    Jet rmul(const Mat& m) const;

    Mat value() const { return c_.at(0); }
    double max_abs() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Mat> c_;
};

Jet operator*(const Mat& m, const Jet& j);

double binom(int n, int k);

}  // namespace grav
