#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace stochsync {

bool Matrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

Matrix Matrix::symmetric_part() const {
    Matrix s(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return s;
}

void matvec(const Matrix& m, std::span<const double> x, std::span<double> y) {
    for (int i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
        y[i] = acc;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

namespace {

double off_diagonal_norm(const Matrix& a) {
    double acc = 0.0;
    const int n = a.rows();
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) acc += a(p, q) * a(p, q);
    return std::sqrt(2.0 * acc);
}

} // namespace

std::vector<double> symmetric_eigenvalues(const Matrix& input,
                                          Matrix* eigenvectors) {
    const int n = input.rows();
    if (n != input.cols())
        throw ValidationError("symmetric_eigenvalues: matrix must be square");
    if (n == 0) throw ValidationError("symmetric_eigenvalues: empty matrix");

    Matrix a = input;
    Matrix v;
    if (eigenvectors) {
        v = Matrix(n, n);
        for (int i = 0; i < n; ++i) v(i, i) = 1.0;
    }

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) scale = 1.0;

    const double tol = 1e-15 * scale * n;
    const int max_sweeps = 100;

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= tol) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= tol / (n * n)) continue;

                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t =
                    (theta >= 0.0 ? 1.0 : -1.0) /
                    (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = akp - s * (akq + tau * akp);
                    a(p, k) = a(k, p);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(q, k) = a(k, q);
                }
                if (eigenvectors) {
                    for (int k = 0; k < n; ++k) {
                        const double vkp = v(k, p);
                        const double vkq = v(k, q);
                        v(k, p) = vkp - s * (vkq + tau * vkp);
                        v(k, q) = vkq + s * (vkp - tau * vkq);
                    }
                }
            }
        }
    }
    if (sweep == max_sweeps && off_diagonal_norm(a) > tol)
        throw EigensolverError(
            "Jacobi eigensolver failed to converge in 100 sweeps");

    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = a(i, i);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return values[i] < values[j]; });

    std::vector<double> sorted(n);
    for (int i = 0; i < n; ++i) sorted[i] = values[order[i]];
    if (eigenvectors) {
        *eigenvectors = Matrix(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) (*eigenvectors)(i, j) = v(i, order[j]);
    }
    return sorted;
}

} // namespace stochsync
