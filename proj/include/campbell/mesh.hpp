#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "numlin.hpp"

namespace campbell {

// Analytic branch lambda(Omega) = i (alpha omega_s + eps s Omega). Its Krein signature is alpha.
struct Branch {
    int s = 1;
    int alpha = 1;
    int eps = 1;

    bool operator==(const Branch&) const = default;

    // Enumeration order: s ascending, then alpha = +1 first, then eps = +1 first.
    int order() const { return (s - 1) * 4 + (alpha > 0 ? 0 : 2) + (eps > 0 ? 0 : 1); }
};

enum class Regime { subcritical, supercritical, critical };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::subcritical: return "subcritical";
        case Regime::supercritical: return "supercritical";
        case Regime::critical: return "critical";
    }
    return "?";
}

struct Node {
    std::size_t id = 0;
    double omega_speed = 0.0;  // Omega_0
    double omega0 = 0.0;       // frequency, branches meet at i omega0
    Branch a, b;               // a.order() < b.order()
    int sig_product = 1;       // alpha * beta
    Regime regime = Regime::subcritical;
    bool clustered = false;
};

inline cplx branch_value(const Branch& b, double omega_s, double omega) {
    if (!(omega_s > 0.0)) throw invalid_argument("branch_value: omega_s must be positive");
    return {0.0, b.alpha * omega_s + b.eps * b.s * omega};
}

inline std::vector<Branch> all_branches(std::size_t n) {
    std::vector<Branch> out;
    for (int s = 1; s <= int(n); ++s)
        for (int alpha : {1, -1})
            for (int eps : {1, -1}) out.push_back({s, alpha, eps});
    return out;
}

inline std::pair<ComplexVector, ComplexVector> doublet_eigenvectors(std::size_t s, std::size_t n) {
    if (s < 1 || s > n) throw invalid_argument("doublet_eigenvectors: index out of range");
    ComplexVector up(2 * n), um(2 * n);
    up[2 * s - 2] = cplx(0.0, -1.0);
    up[2 * s - 1] = 1.0;
    um[2 * s - 2] = cplx(0.0, 1.0);
    um[2 * s - 1] = 1.0;
    return {up, um};
}

// Eigenvector of a branch in the 2n coordinates: u+ for eps = +1, conj(u+) for eps = -1.
inline ComplexVector branch_eigenvector(const Branch& b, std::size_t n) {
    auto [up, um] = doublet_eigenvectors(std::size_t(b.s), n);
    return b.eps > 0 ? up : um;
}

inline std::vector<double> critical_speeds(const std::vector<double>& omegas) {
    check_omegas(omegas);
    std::vector<double> out;
    for (std::size_t s = 0; s < omegas.size(); ++s) out.push_back(omegas[s] / double(s + 1));
    return out;
}

inline double lowest_critical_speed(const std::vector<double>& omegas) {
    const auto cs = critical_speeds(omegas);
    return *std::min_element(cs.begin(), cs.end());
}

// Crossing point of two branches; false when they are parallel.
inline bool crossing_of(const Branch& a, const Branch& b, const std::vector<double>& omegas, double& omega_speed,
                        double& omega0) {
    const int den = b.eps * b.s - a.eps * a.s;
    if (den == 0) return false;
    const double ws = omegas.at(a.s - 1), wt = omegas.at(b.s - 1);
    omega_speed = (a.alpha * ws - b.alpha * wt) / double(den);
    omega0 = a.alpha * ws + a.eps * a.s * omega_speed;
    return true;
}

inline Node make_node(Branch a, Branch b, const std::vector<double>& omegas) {
    if (b.order() < a.order()) std::swap(a, b);
    Node nd;
    nd.a = a;
    nd.b = b;
    if (!crossing_of(a, b, omegas, nd.omega_speed, nd.omega0)) throw invalid_argument("make_node: parallel branches");
    nd.sig_product = a.alpha * b.alpha;
    const double tol = 1e-12 * (1.0 + omegas.back());
    if (std::abs(nd.omega0) <= tol) {
        nd.omega0 = 0.0;
        nd.regime = Regime::critical;
    } else {
        nd.regime = std::abs(nd.omega_speed) < lowest_critical_speed(omegas) ? Regime::subcritical
                                                                            : Regime::supercritical;
    }
    return nd;
}

struct SpeedRange {
    double lo = 0.0, hi = 0.0;
};

// All crossings with Omega_0 in [lo, hi], sorted by (Omega_0, omega0, branch order).
// With include_negative_frequency = false only the half-mesh omega0 >= 0 is kept.
inline std::vector<Node> enumerate_nodes(const std::vector<double>& omegas, SpeedRange range,
                                         bool include_negative_frequency) {
    check_omegas(omegas);
    if (!std::isfinite(range.lo) || !std::isfinite(range.hi)) throw invalid_argument("enumerate_nodes: range must be finite");
    const auto br = all_branches(omegas.size());
    const double tol = 1e-12 * (1.0 + omegas.back());
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < br.size(); ++i)
        for (std::size_t j = i + 1; j < br.size(); ++j) {
            double w, f;
            if (!crossing_of(br[i], br[j], omegas, w, f)) continue;
            if (w < range.lo - tol || w > range.hi + tol) continue;
            if (!include_negative_frequency && f < -tol) continue;
            nodes.push_back(make_node(br[i], br[j], omegas));
        }
    std::sort(nodes.begin(), nodes.end(), [](const Node& x, const Node& y) {
        return std::make_tuple(x.omega_speed, x.omega0, x.a.order(), x.b.order()) <
               std::make_tuple(y.omega_speed, y.omega0, y.a.order(), y.b.order());
    });
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i].id = i;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (i == j) continue;
            if (std::abs(nodes[i].omega_speed - nodes[j].omega_speed) <= tol &&
                std::abs(nodes[i].omega0 - nodes[j].omega0) <= tol)
                nodes[i].clustered = true;
        }
    }
    return nodes;
}

// i [a, a] with a = (x, lambda x + Omega G x) and [a, b] = conj(b)^T J_2n a,
// J_2n = [[0, -I], [I, 0]]. Real for Hamiltonian eigenpairs.
inline double indefinite_product(const RotorModel& m, double omega, cplx lambda, const ComplexVector& x) {
    const std::size_t d = 2 * m.n;
    if (x.size() != d) throw invalid_argument("indefinite_product: eigenvector must have 2n entries");
    const ComplexMatrix g = to_complex(gyro_matrix(m.n));
    ComplexVector y = g * x;
    for (std::size_t i = 0; i < d; ++i) y[i] = lambda * x[i] + omega * y[i];
    // J a = (-y, x); conj(a)^T J a = -conj(x).y + conj(y).x
    cplx v{};
    for (std::size_t i = 0; i < d; ++i) v += -std::conj(x[i]) * y[i] + std::conj(y[i]) * x[i];
    return (cplx(0.0, 1.0) * v).real();
}

inline int krein_signature(const RotorModel& m, double omega, cplx lambda, const ComplexVector& x) {
    if (m.scales.delta != 0.0 || m.scales.kappa != 0.0 || m.scales.nu != 0.0)
        throw invalid_argument("krein_signature: model must be unperturbed (delta = kappa = nu = 0)");
    double an = 0.0;
    for (const auto& v : x) an += std::norm(v);
    an *= 1.0 + std::norm(lambda) + omega * omega * double(m.n * m.n);
    const double v = indefinite_product(m, omega, lambda, x);
    if (!(std::abs(v) > 1e-10 * an))
        throw numerical_error("krein_signature: indefinite product is numerically zero");
    return v > 0 ? 1 : -1;
}

}  // namespace campbell
