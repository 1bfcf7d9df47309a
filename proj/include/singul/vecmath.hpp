#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace singul {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }
inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline double dist2(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(dist2(a, b));
}

inline Vec add(std::span<const double> a, std::span<const double> b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scaled(std::span<const double> a, double s) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

inline void axpy(double s, std::span<const double> x, Vec& y) {
    assert(x.size() == y.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

inline Vec normalized(std::span<const double> a) {
    const double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return scaled(a, 1.0 / n);
}

inline Vec midpoint(std::span<const double> a, std::span<const double> b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = 0.5 * (a[i] + b[i]);
    return r;
}

/// Dense row-major matrix, sized for small ambient dimensions.
struct Mat {
    size_t rows = 0, cols = 0;
    Vec data;

    Mat() = default;
    Mat(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(size_t i, size_t j) { return data[i * cols + j]; }
    double operator()(size_t i, size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(size_t i) const {
        return {data.data() + i * cols, cols};
    }

    Vec col(size_t j) const {
        Vec c(rows);
        for (size_t i = 0; i < rows; ++i) c[i] = (*this)(i, j);
        return c;
    }

    static Mat identity(size_t n) {
        Mat m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Vec matvec(const Mat& m, std::span<const double> x) {
    assert(x.size() == m.cols);
    Vec y(m.rows, 0.0);
    for (size_t i = 0; i < m.rows; ++i) y[i] = dot(m.row(i), x);
    return y;
}

// y = Mᵀ x
inline Vec matvec_t(const Mat& m, std::span<const double> x) {
    assert(x.size() == m.rows);
    Vec y(m.cols, 0.0);
    for (size_t i = 0; i < m.rows; ++i)
        for (size_t j = 0; j < m.cols; ++j) y[j] += m(i, j) * x[i];
    return y;
}

/// Modified Gram-Schmidt on the columns; throws if rank-deficient.
inline Mat orthonormalized_columns(Mat m) {
    for (size_t j = 0; j < m.cols; ++j) {
        for (size_t k = 0; k < j; ++k) {
            double proj = 0.0;
            for (size_t i = 0; i < m.rows; ++i) proj += m(i, k) * m(i, j);
            for (size_t i = 0; i < m.rows; ++i) m(i, j) -= proj * m(i, k);
        }
        double n = 0.0;
        for (size_t i = 0; i < m.rows; ++i) n += m(i, j) * m(i, j);
        n = std::sqrt(n);
        if (n < 1e-12) throw std::invalid_argument("orthonormalized_columns: rank deficient");
        for (size_t i = 0; i < m.rows; ++i) m(i, j) /= n;
    }
    return m;
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with matching eigenvector columns.
inline void jacobi_eigensym(Mat a, Vec& eigenvalues, Mat& eigenvectors) {
    const size_t n = a.rows;
    assert(a.cols == n);
    Mat v = Mat::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double sign = theta >= 0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (a(order[j], order[j]) > a(order[i], order[i])) std::swap(order[i], order[j]);
    eigenvalues.assign(n, 0.0);
    eigenvectors = Mat(n, n);
    for (size_t j = 0; j < n; ++j) {
        eigenvalues[j] = a(order[j], order[j]);
        for (size_t i = 0; i < n; ++i) eigenvectors(i, j) = v(i, order[j]);
    }
}

}  // namespace singul
