#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "numlin.hpp"

namespace campbell {

// Perturbation scales: damping, stiffness detuning, circulatory.
struct Scales {
    double delta = 0.0;
    double kappa = 0.0;
    double nu = 0.0;

    bool operator==(const Scales&) const = default;
};

// The weakly anisotropic rotor
//   x'' + (2 Omega G + delta D) x' + (P + Omega^2 G^2 + kappa K + nu N) x = 0
// with 2n coordinates and doublet frequencies omegas.
struct RotorModel {
    std::size_t n = 0;
    std::vector<double> omegas;
    RealMatrix D, K, N;
    Scales scales;

    double omega(std::size_t s) const { return omegas.at(s - 1); }
};

// Entries (2s-1, 2t-1), (2s-1, 2t), (2s, 2t-1), (2s, 2t) of a 2n x 2n matrix (1-based).
struct Block2x2 {
    double m11 = 0, m12 = 0, m21 = 0, m22 = 0;
    std::size_t s = 0, t = 0;

    double trace() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }
};

inline RealMatrix gyro_matrix(std::size_t n) {
    if (n == 0) throw invalid_argument("gyro_matrix: n must be positive");
    RealMatrix g(2 * n, 2 * n);
    for (std::size_t s = 1; s <= n; ++s) {
        g(2 * s - 2, 2 * s - 1) = -double(s);
        g(2 * s - 1, 2 * s - 2) = double(s);
    }
    return g;
}

inline void check_omegas(const std::vector<double>& omegas) {
    if (omegas.empty()) throw invalid_argument("omegas: at least one frequency required");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!std::isfinite(omegas[i]) || omegas[i] <= 0.0)
            throw invalid_argument("omegas: frequencies must be positive and finite");
        if (i > 0 && omegas[i] <= omegas[i - 1])
            throw invalid_argument("omegas: frequencies must be strictly increasing");
    }
}

inline RealMatrix stiffness_matrix(const std::vector<double>& omegas) {
    check_omegas(omegas);
    const std::size_t n = omegas.size();
    RealMatrix p(2 * n, 2 * n);
    for (std::size_t s = 0; s < n; ++s) {
        p(2 * s, 2 * s) = omegas[s] * omegas[s];
        p(2 * s + 1, 2 * s + 1) = omegas[s] * omegas[s];
    }
    return p;
}

// Indices s where omega_{s+1} - omega_s < omega_s / s.
inline std::vector<std::size_t> gap_condition_violations(const std::vector<double>& omegas) {
    std::vector<std::size_t> bad;
    for (std::size_t s = 1; s < omegas.size(); ++s)
        if (omegas[s] - omegas[s - 1] < omegas[s - 1] / double(s)) bad.push_back(s);
    return bad;
}

// Throws invalid_argument on a broken invariant. Symmetry is checked exactly.
inline void validate(const RotorModel& m) {
    check_omegas(m.omegas);
    if (m.n != m.omegas.size()) throw invalid_argument("model: n does not match omegas");
    const std::size_t d = 2 * m.n;
    auto shape = [&](const RealMatrix& a, const char* name) {
        if (a.rows() != d || a.cols() != d)
            throw invalid_argument(std::string("model: ") + name + " must be 2n x 2n");
        for (double v : a.data())
            if (!std::isfinite(v)) throw invalid_argument(std::string("model: ") + name + " has non-finite entries");
    };
    shape(m.D, "D");
    shape(m.K, "K");
    shape(m.N, "N");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            if (m.D(i, j) != m.D(j, i)) throw invalid_argument("model: D is not symmetric");
            if (m.K(i, j) != m.K(j, i)) throw invalid_argument("model: K is not symmetric");
            if (m.N(i, j) != -m.N(j, i)) throw invalid_argument("model: N is not antisymmetric");
        }
    for (double v : {m.scales.delta, m.scales.kappa, m.scales.nu})
        if (!std::isfinite(v)) throw invalid_argument("model: scales must be finite");
}

inline Block2x2 block(const RealMatrix& m, std::size_t s, std::size_t t) {
    const std::size_t n = m.rows() / 2;
    if (s < 1 || t < 1 || s > n || t > n) throw invalid_argument("block: index out of range");
    return {m(2 * s - 2, 2 * t - 2), m(2 * s - 2, 2 * t - 1), m(2 * s - 1, 2 * t - 2), m(2 * s - 1, 2 * t - 1), s, t};
}

struct Pencil {
    RealMatrix C, K_full;
};

inline Pencil pencil_at(const RotorModel& m, double omega, const Scales& sc) {
    const RealMatrix g = gyro_matrix(m.n);
    const RealMatrix g2 = g * g;
    RealMatrix c = axpy(RealMatrix(2 * m.n, 2 * m.n), 2.0 * omega, g);
    c = axpy(c, sc.delta, m.D);
    RealMatrix k = axpy(stiffness_matrix(m.omegas), omega * omega, g2);
    k = axpy(k, sc.kappa, m.K);
    k = axpy(k, sc.nu, m.N);
    return {std::move(c), std::move(k)};
}

inline Pencil pencil_at(const RotorModel& m, double omega) { return pencil_at(m, omega, m.scales); }

// Companion matrix of the pencil at speed omega.
inline ComplexMatrix companion(const RotorModel& m, double omega, const Scales& sc) {
    const Pencil p = pencil_at(m, omega, sc);
    return qep_linearize(RealMatrix::identity(2 * m.n), p.C, p.K_full);
}

inline RotorModel unperturbed_model(const std::vector<double>& omegas) {
    check_omegas(omegas);
    const std::size_t d = 2 * omegas.size();
    return {omegas.size(), omegas, RealMatrix(d, d), RealMatrix(d, d), RealMatrix(d, d), {}};
}

// Mass m on springs k1, k2 = k1 + kappa with dampers mu1, mu2 and follower force beta,
// written in rotating coordinates and divided by m.
inline RotorModel shaft_model(double m, double k1, double kappa, double mu1, double mu2, double beta) {
    if (!(m > 0.0) || !(k1 > 0.0)) throw invalid_argument("shaft_model: m and k1 must be positive");
    RotorModel r = unperturbed_model({std::sqrt(k1 / m)});
    r.D = {{mu1 / m, 0.0}, {0.0, mu2 / m}};
    r.K = {{0.0, 0.0}, {0.0, 1.0 / m}};
    r.N = {{0.0, 1.0}, {-1.0, 0.0}};
    r.scales = {1.0, kappa, beta / m};
    return r;
}

// Six degrees of freedom, omegas (1, 3, 6).
inline RotorModel example_6dof() {
    RotorModel r = unperturbed_model({1.0, 3.0, 6.0});
    r.K = {{1, 2, 1, 2, 0, 0},   //
           {2, 1, 3, 4, 0, 0},   //
           {1, 3, -3, 0, 0, 0},  //
           {2, 4, 0, -2.5, 0, 0},
           {0, 0, 0, 0, 4, 0},   //
           {0, 0, 0, 0, 0, 2}};
    r.D = {{-1, 2, 1, 7, 2, -2},  //
           {2, 3, -2, -4, 3, 1},  //
           {1, -2, 1, 8, 2, 1},   //
           {7, -4, 8, 3, -2, 3},  //
           {2, 3, 2, -2, 5, 5},   //
           {-2, 1, 1, 3, 5, 6}};
    r.N = {{0, -1, 1, -1, -3, 8},  //
           {1, 0, 2, 3, 2, 4},     //
           {-1, -2, 0, 7, 1, 3},   //
           {1, -3, -7, 0, 8, 2},   //
           {3, -2, -1, -8, 0, 2},  //
           {-8, -4, -3, -2, -2, 0}};
    r.scales = {0.1, 0.2, 0.2};
    return r;
}

}  // namespace campbell
