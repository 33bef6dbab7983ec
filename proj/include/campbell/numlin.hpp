#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace campbell {

using cplx = std::complex<double>;

// Dense row-major matrix.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw invalid_argument("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const { return data_; }

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;
using ComplexVector = std::vector<cplx>;

inline ComplexMatrix to_complex(const RealMatrix& a) {
    ComplexMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
    return c;
}

template <class T>
double frobenius_norm(const Matrix<T>& a) {
    double s = 0.0;
    for (const auto& v : a.data()) s += std::norm(cplx(v));
    return std::sqrt(s);
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows()) throw invalid_argument("matrix product shape mismatch");
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x) {
    if (a.cols() != x.size()) throw invalid_argument("matrix-vector shape mismatch");
    ComplexVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline double norm2(const ComplexVector& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

// a + s*b, same shapes required.
template <class T, class S>
Matrix<T> axpy(const Matrix<T>& a, S s, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw invalid_argument("shape mismatch in axpy");
    Matrix<T> c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += s * b(i, j);
    return c;
}

struct EigenDecomposition {
    ComplexVector eigenvalues;
    std::vector<ComplexVector> eigenvectors;  // unit 2-norm, empty when not requested
    std::vector<double> residuals;            // ||A v - lambda v||, empty when not requested
    double norm = 0.0;                        // ||A||_F
};

struct EigOptions {
    bool vectors = true;
};

namespace detail {

inline double eps() { return std::numeric_limits<double>::epsilon(); }

// Householder reduction to upper Hessenberg form; Q accumulates the transform.
inline void hessenberg(ComplexMatrix& h, ComplexMatrix& q) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    ComplexVector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const cplx x0 = h(k + 1, k);
        const cplx phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : cplx(1.0);
        const cplx alpha = -phase * xnorm;
        std::fill(v.begin(), v.end(), cplx{});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) continue;
        for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;

        // H <- (I - 2vv^H) H
        for (std::size_t j = 0; j < n; ++j) {
            cplx s{};
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
            s *= 2.0;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
        }
        // H <- H (I - 2vv^H), Q <- Q (I - 2vv^H)
        for (std::size_t i = 0; i < n; ++i) {
            cplx s{}, t{};
            for (std::size_t j = k + 1; j < n; ++j) {
                s += h(i, j) * v[j];
                t += q(i, j) * v[j];
            }
            s *= 2.0;
            t *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) {
                h(i, j) -= s * std::conj(v[j]);
                q(i, j) -= t * std::conj(v[j]);
            }
        }
        h(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = cplx{};
    }
}

struct Givens {
    double c;
    cplx s;
};

// Rotation G with G [a; b] = [r; 0], G = [c s; -conj(s) c].
inline Givens make_givens(cplx a, cplx b) {
    const double ab = std::abs(b);
    if (ab == 0.0) return {1.0, cplx{}};
    const double aa = std::abs(a);
    if (aa == 0.0) return {0.0, std::conj(b) / ab};
    const double r = std::hypot(aa, ab);
    const cplx phase = a / aa;
    return {aa / r, phase * std::conj(b) / r};
}

// Shifted QR on an upper Hessenberg matrix until it is upper triangular.
inline void schur(ComplexMatrix& h, ComplexMatrix& q) {
    const std::size_t n = h.rows();
    if (n == 0) return;
    const double hnorm = std::max(frobenius_norm(h), std::numeric_limits<double>::min());
    const std::size_t max_sweeps = 100 * n;
    std::size_t sweeps = 0;
    std::vector<Givens> rot(n);

    std::size_t hi = n - 1;
    int iter = 0;
    while (hi > 0) {
        std::size_t l = hi;
        while (l > 0) {
            const double sub = std::abs(h(l, l - 1));
            double scale = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (scale == 0.0) scale = hnorm;
            if (sub <= eps() * scale) {
                h(l, l - 1) = cplx{};
                break;
            }
            --l;
        }
        if (l == hi) {
            --hi;
            iter = 0;
            continue;
        }
        if (++sweeps > max_sweeps)
            throw numerical_error("QR iteration did not converge at eigenvalue index " + std::to_string(hi));
        ++iter;

        cplx mu;
        if (iter % 11 == 10) {
            // exceptional shift to break cycles
            mu = h(hi, hi) + std::abs(h(hi, hi - 1).real()) + std::abs(h(hi - 1, hi - 1).imag());
        } else {
            const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const cplx tr2 = 0.5 * (a + d);
            const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
            const cplx m1 = tr2 + disc, m2 = tr2 - disc;
            mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
        }

        for (std::size_t k = l; k <= hi; ++k) h(k, k) -= mu;
        for (std::size_t k = l; k < hi; ++k) {
            const Givens g = make_givens(h(k, k), h(k + 1, k));
            rot[k] = g;
            for (std::size_t j = k; j < n; ++j) {
                const cplx x = h(k, j), y = h(k + 1, j);
                h(k, j) = g.c * x + g.s * y;
                h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
            }
            h(k + 1, k) = cplx{};
        }
        for (std::size_t k = l; k < hi; ++k) {
            const Givens g = rot[k];
            for (std::size_t i = 0; i <= k + 1; ++i) {
                const cplx x = h(i, k), y = h(i, k + 1);
                h(i, k) = g.c * x + std::conj(g.s) * y;
                h(i, k + 1) = -g.s * x + g.c * y;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const cplx x = q(i, k), y = q(i, k + 1);
                q(i, k) = g.c * x + std::conj(g.s) * y;
                q(i, k + 1) = -g.s * x + g.c * y;
            }
        }
        for (std::size_t k = l; k <= hi; ++k) h(k, k) += mu;
    }
}

// Inverse iteration on the triangular factor for the k-th diagonal entry.
inline ComplexVector triangular_eigenvector(const ComplexMatrix& t, std::size_t k, double tnorm) {
    const double tiny = std::max(tnorm, 1.0) * eps();
    const cplx shift = t(k, k) + cplx(16.0 * tiny, 16.0 * tiny);
    ComplexVector y(t.rows(), cplx{});
    for (std::size_t i = 0; i <= k; ++i) y[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
        double yn = 0.0;
        for (std::size_t i = 0; i <= k; ++i) yn = std::max(yn, std::abs(y[i]));
        for (std::size_t i = 0; i <= k; ++i) y[i] /= yn;
        for (std::size_t ii = k + 1; ii-- > 0;) {
            cplx s = y[ii];
            for (std::size_t j = ii + 1; j <= k; ++j) s -= t(ii, j) * y[j];
            cplx d = t(ii, ii) - shift;
            if (std::abs(d) < tiny) d = tiny;
            y[ii] = s / d;
        }
    }
    return y;
}

}  // namespace detail

// All eigenvalues (and optionally eigenvectors) of a dense complex matrix.
inline EigenDecomposition eig_dense(const ComplexMatrix& a, EigOptions opt = {}) {
    if (!a.square()) throw invalid_argument("eig_dense: matrix is not square");
    const std::size_t n = a.rows();
    EigenDecomposition out;
    out.norm = frobenius_norm(a);
    for (const auto& v : a.data())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw invalid_argument("eig_dense: non-finite matrix entry");
    if (n == 0) return out;

    ComplexMatrix h = a;
    ComplexMatrix q = ComplexMatrix::identity(n);
    detail::hessenberg(h, q);
    detail::schur(h, q);

    out.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = h(i, i);
    if (!opt.vectors) return out;

    const double tnorm = frobenius_norm(h);
    out.eigenvectors.reserve(n);
    out.residuals.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const ComplexVector y = detail::triangular_eigenvector(h, k, tnorm);
        ComplexVector v = q * y;
        const double vn = norm2(v);
        for (auto& x : v) x /= vn;
        ComplexVector r = a * v;
        for (std::size_t i = 0; i < n; ++i) r[i] -= out.eigenvalues[k] * v[i];
        out.residuals.push_back(norm2(r));
        out.eigenvectors.push_back(std::move(v));
    }
    return out;
}

inline EigenDecomposition eig_dense(const RealMatrix& a, EigOptions opt = {}) {
    return eig_dense(to_complex(a), opt);
}

// Solves A X = B by LU with partial pivoting.
inline ComplexMatrix solve(ComplexMatrix a, ComplexMatrix b) {
    if (!a.square() || a.rows() != b.rows()) throw invalid_argument("solve: shape mismatch");
    const std::size_t n = a.rows();
    const double scale = std::max(frobenius_norm(a), std::numeric_limits<double>::min());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (std::abs(a(p, k)) <= 1e3 * detail::eps() * scale) throw numerical_error("solve: singular matrix");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(p, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = a(i, k) / a(k, k);
            if (f == cplx{}) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t ii = n; ii-- > 0;) {
            cplx s = b(ii, j);
            for (std::size_t k = ii + 1; k < n; ++k) s -= a(ii, k) * b(k, j);
            b(ii, j) = s / a(ii, ii);
        }
    return b;
}

// Companion form [[0, I], [-M^-1 K, -M^-1 C]] of lambda^2 M + lambda C + K.
inline ComplexMatrix qep_linearize(const ComplexMatrix& m, const ComplexMatrix& c, const ComplexMatrix& k) {
    const std::size_t n = m.rows();
    if (!m.square() || c.rows() != n || c.cols() != n || k.rows() != n || k.cols() != n)
        throw invalid_argument("qep_linearize: M, C, K must be square and of equal size");
    ComplexMatrix mk = k, mc = c;
    if (m != ComplexMatrix::identity(n)) {
        mk = solve(m, k);
        mc = solve(m, c);
    }
    ComplexMatrix a(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, n + i) = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            a(n + i, j) = -mk(i, j);
            a(n + i, n + j) = -mc(i, j);
        }
    }
    return a;
}

inline ComplexMatrix qep_linearize(const RealMatrix& m, const RealMatrix& c, const RealMatrix& k) {
    return qep_linearize(to_complex(m), to_complex(c), to_complex(k));
}

}  // namespace campbell
