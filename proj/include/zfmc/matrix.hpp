#ifndef ZFMC_MATRIX_HPP
#define ZFMC_MATRIX_HPP

#include <cmath>
#include <span>
#include <vector>

#include "zfmc/error.hpp"

namespace zfmc {

// Dense square matrix, row-major. Indices are 0-based; chain states carry
// 1-based labels throughout the library, so entry (P)_{ij} for states i,j
// lives at operator()(i-1, j-1).
class Matrix {
public:
    Matrix() = default;

    explicit Matrix(int n, double fill = 0.0) : n_(n), a_(static_cast<size_t>(n) * n, fill) {
        if (n < 1) throw Error(errc::bad_argument, "matrix order must be positive");
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int size() const { return n_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    std::span<const double> row(int i) const {
        return {a_.data() + static_cast<size_t>(i) * n_, static_cast<size_t>(n_)};
    }

    double row_sum(int i) const {
        double s = 0.0;
        for (double v : row(i)) s += v;
        return s;
    }

    Matrix operator*(const Matrix& o) const {
        if (n_ != o.n_) throw Error(errc::bad_argument, "matrix size mismatch in product");
        Matrix r(n_);
        for (int i = 0; i < n_; ++i) {
            for (int k = 0; k < n_; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
            }
        }
        return r;
    }

    Matrix& operator+=(const Matrix& o) {
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    Matrix& operator*=(double c) {
        for (double& v : a_) v *= c;
        return *this;
    }

    bool operator==(const Matrix& o) const = default;

private:
    int n_ = 0;
    std::vector<double> a_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.size() != b.size()) throw Error(errc::bad_argument, "matrix size mismatch");
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a(i, j) - b(i, j)));
    return m;
}

}  // namespace zfmc

#endif  // ZFMC_MATRIX_HPP
