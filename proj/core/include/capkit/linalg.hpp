#pragma once
// Dense row-major matrices plus the Cholesky / triangular-solve kernels the
// prior extractor is built on. Sentences are short (d <~ 64), so everything
// stays dense and unblocked; no explicit matrix inversion anywhere.

#include <cstddef>
#include <vector>

#include "capkit/error.hpp"

namespace capkit {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }

    Matrix transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Lower-triangular factor L with strictly positive diagonal; L * L^T
// reconstructs the factored matrix.
struct CholeskyFactor {
    Matrix lower;
};

// Unblocked Cholesky-Crout factorization of a symmetric matrix. Throws
// InvalidInputError if the input is not square/symmetric and
// NotPositiveDefiniteError when a non-positive pivot appears (signals
// lambda <= 0 or a corrupted system).
CholeskyFactor cholesky_factor(const Matrix& a);

enum class TriangularOrientation { lower, upper };

// Forward substitution for lower triangles, backward for upper. Throws
// SingularSystemError on a zero diagonal entry, InvalidInputError on shape
// mismatch.
std::vector<double> solve_triangular(const Matrix& triangle,
                                     const std::vector<double>& rhs,
                                     TriangularOrientation orientation);

// Convenience: solves A x = b given the factor of A, via the two
// substitutions in sequence.
std::vector<double> solve_with_factor(const CholeskyFactor& factor,
                                      const std::vector<double>& rhs);

}  // namespace capkit
