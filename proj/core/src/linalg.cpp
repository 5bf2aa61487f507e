#include "capkit/linalg.hpp"

#include <cmath>

namespace capkit {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

CholeskyFactor cholesky_factor(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) {
        throw InvalidInputError("cholesky_factor: matrix not square");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (a(i, j) != a(j, i)) {
                throw InvalidInputError("cholesky_factor: matrix not symmetric");
            }
        }
    }
    Matrix lower(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            diag -= lower(j, k) * lower(j, k);
        }
        if (!(diag > 0.0)) {
            throw NotPositiveDefiniteError(
                "cholesky_factor: non-positive pivot at column " + std::to_string(j));
        }
        const double pivot = std::sqrt(diag);
        lower(j, j) = pivot;
        for (std::size_t i = j + 1; i < n; ++i) {
            double sum = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                sum -= lower(i, k) * lower(j, k);
            }
            lower(i, j) = sum / pivot;
        }
    }
    return {std::move(lower)};
}

std::vector<double> solve_triangular(const Matrix& triangle,
                                     const std::vector<double>& rhs,
                                     TriangularOrientation orientation) {
    const std::size_t n = triangle.rows();
    if (triangle.cols() != n) {
        throw InvalidInputError("solve_triangular: matrix not square");
    }
    if (rhs.size() != n) {
        throw InvalidInputError("solve_triangular: rhs length mismatch");
    }
    std::vector<double> x(n, 0.0);
    if (orientation == TriangularOrientation::lower) {
        for (std::size_t i = 0; i < n; ++i) {
            double sum = rhs[i];
            for (std::size_t j = 0; j < i; ++j) {
                sum -= triangle(i, j) * x[j];
            }
            const double diag = triangle(i, i);
            if (diag == 0.0) {
                throw SingularSystemError("solve_triangular: zero diagonal entry");
            }
            x[i] = sum / diag;
        }
    } else {
        for (std::size_t ii = n; ii-- > 0;) {
            double sum = rhs[ii];
            for (std::size_t j = ii + 1; j < n; ++j) {
                sum -= triangle(ii, j) * x[j];
            }
            const double diag = triangle(ii, ii);
            if (diag == 0.0) {
                throw SingularSystemError("solve_triangular: zero diagonal entry");
            }
            x[ii] = sum / diag;
        }
    }
    return x;
}

std::vector<double> solve_with_factor(const CholeskyFactor& factor,
                                      const std::vector<double>& rhs) {
    const auto y = solve_triangular(factor.lower, rhs, TriangularOrientation::lower);
    return solve_triangular(factor.lower.transposed(), y,
                            TriangularOrientation::upper);
}

}  // namespace capkit
