// Dense row-major matrices and a cyclic Jacobi eigensolver for real
// symmetric matrices. Everything here is desk scale (N up to a few hundred).

#ifndef STOCHSYNC_CORE_LINALG_HPP
#define STOCHSYNC_CORE_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace stochsync {

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool is_symmetric(double tol) const;

    // (M + M^T) / 2
    Matrix symmetric_part() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// y = M x
void matvec(const Matrix& m, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

// Eigenvalues of a symmetric matrix, sorted ascending. When eigenvectors is
// non-null it receives the orthonormal eigenvectors as columns, in matching
// order. Throws EigensolverError if the sweep limit is hit.
std::vector<double> symmetric_eigenvalues(const Matrix& a,
                                          Matrix* eigenvectors = nullptr);

} // namespace stochsync

#endif
