#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "error.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "numlin.hpp"

namespace campbell {

// 2x2 real matrix [[a11, a12], [a21, a22]].
struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
};

inline Mat2 sign_matrix_I(int eps, int sigma) { return {double(eps), 0.0, 0.0, double(sigma)}; }
inline Mat2 sign_matrix_J(int eps, int sigma) { return {0.0, -double(sigma), double(eps), 0.0}; }

// tr(M S)
inline double trace_product(const Block2x2& m, const Mat2& s) {
    return m.m11 * s.a11 + m.m12 * s.a21 + m.m21 * s.a12 + m.m22 * s.a22;
}

// Local data of a node: coefficients A1, A2, B1, B2 at fixed scales, plus the stiffness traces.
struct NodeExpansion {
    Node node;
    Scales scales;
    int s = 0, t = 0, alpha = 0, beta = 0, eps = 0, sigma = 0;
    double omega_s = 0, omega_t = 0;
    cplx A1, A2, B1, B2;
    double trK_ss = 0, trK_tt = 0;
    double trK_st_J = 0, trK_st_I = 0;
    Mat2 I_es, J_es;
};

inline NodeExpansion expansion_coefficients(const Node& node, const RotorModel& m, const Scales& sc) {
    NodeExpansion e;
    e.node = node;
    e.scales = sc;
    e.s = node.a.s;
    e.t = node.b.s;
    e.alpha = node.a.alpha;
    e.beta = node.b.alpha;
    e.eps = node.a.eps;
    e.sigma = node.b.eps;
    e.omega_s = m.omega(std::size_t(e.s));
    e.omega_t = m.omega(std::size_t(e.t));
    e.I_es = sign_matrix_I(e.eps, e.sigma);
    e.J_es = sign_matrix_J(e.eps, e.sigma);

    const std::size_t s = std::size_t(e.s), t = std::size_t(e.t);
    const Block2x2 Dss = block(m.D, s, s), Dtt = block(m.D, t, t), Dst = block(m.D, s, t);
    const Block2x2 Kss = block(m.K, s, s), Ktt = block(m.K, t, t), Kst = block(m.K, s, t);
    const Block2x2 Nss = block(m.N, s, s), Ntt = block(m.N, t, t), Nst = block(m.N, s, t);
    const cplx lambda0(0.0, node.omega0);
    const cplx i(0.0, 1.0);

    e.trK_ss = Kss.trace();
    e.trK_tt = Ktt.trace();
    e.trK_st_J = trace_product(Kst, e.J_es);
    e.trK_st_I = trace_product(Kst, e.I_es);

    e.A1 = sc.delta * lambda0 * Dss.trace() + sc.kappa * e.trK_ss + double(e.eps) * 2.0 * i * sc.nu * Nss.m12;
    e.A2 = e.sigma * sc.nu * trace_product(Nst, e.I_es) +
           i * (sc.delta * lambda0 * trace_product(Dst, e.J_es) + sc.kappa * e.trK_st_J);
    e.B1 = sc.delta * lambda0 * Dtt.trace() + sc.kappa * e.trK_tt + double(e.sigma) * 2.0 * i * sc.nu * Ntt.m12;
    e.B2 = e.sigma * sc.nu * trace_product(Nst, e.J_es) -
           i * (sc.delta * lambda0 * trace_product(Dst, e.I_es) + sc.kappa * e.trK_st_I);
    return e;
}

inline NodeExpansion expansion_coefficients(const Node& node, const RotorModel& m) {
    return expansion_coefficients(node, m, m.scales);
}

// c = Re c + i Im c as a function of the speed offset and the scales.
inline cplx c_coefficient(const Node& node, const RotorModel& m, double d_omega, const Scales& sc) {
    const NodeExpansion e = expansion_coefficients(node, m, sc);
    const double a = e.alpha, b = e.beta, ws = e.omega_s, wt = e.omega_t;
    const double s = e.s, t = e.t, ep = e.eps, sg = e.sigma, k = sc.kappa;
    const double imA1 = e.A1.imag(), imB1 = e.B1.imag(), reA2 = e.A2.real(), reB2 = e.B2.real();

    const double im_c = (a * wt * imA1 - b * ws * imB1) / (8 * ws * wt) * (s * ep - t * sg) * d_omega +
                        k * (a * ws * e.trK_tt - b * wt * e.trK_ss) * (a * ws * imB1 - b * wt * imA1) /
                            (32 * ws * ws * wt * wt) -
                        a * b * k * (reA2 * e.trK_st_J - reB2 * e.trK_st_I) / (8 * ws * wt);

    const double lin = (t * sg - s * ep) / 2 * d_omega + k * (b * ws * e.trK_tt - a * wt * e.trK_ss) / (8 * ws * wt);
    const double imb = a * ws * imB1 - b * wt * imA1;
    const double re_c = lin * lin +
                        a * b * (e.trK_st_J * e.trK_st_J + e.trK_st_I * e.trK_st_I) / (16 * ws * wt) * k * k -
                        (imb * imb + 4 * a * b * ws * wt * (reA2 * reA2 + reB2 * reB2)) / (64 * ws * ws * wt * wt);
    return {re_c, im_c};
}

// The part of lambda that does not depend on c.
inline cplx expansion_base(const NodeExpansion& e, double d_omega) {
    const double re = -(e.A1.imag() / (e.alpha * e.omega_s) + e.B1.imag() / (e.beta * e.omega_t)) / 8;
    const double im = e.node.omega0 + d_omega / 2 * (e.s * e.eps + e.t * e.sigma) +
                      e.scales.kappa / 8 * (e.trK_ss / (e.alpha * e.omega_s) + e.trK_tt / (e.beta * e.omega_t));
    return {re, im};
}

// base + i sqrt(c) and base - i sqrt(c), written through the real square roots
// sqrt((|c| -+ Re c)/2); the sign of Im c ties the Re and Im offsets together.
inline std::pair<cplx, cplx> split_by_c(cplx base, cplx c) {
    const double ac = std::abs(c);
    const double re_root = std::sqrt(std::max(0.0, (ac - c.real()) / 2));
    const double im_root = std::sqrt(std::max(0.0, (ac + c.real()) / 2));
    const double sg = c.imag() < 0 ? -1.0 : 1.0;
    return {cplx(base.real() - sg * re_root, base.imag() + im_root),
            cplx(base.real() + sg * re_root, base.imag() - im_root)};
}

inline std::pair<cplx, cplx> eigen_approx(const Node& node, const RotorModel& m, double omega, const Scales& sc) {
    const NodeExpansion e = expansion_coefficients(node, m, sc);
    const double dw = omega - node.omega_speed;
    return split_by_c(expansion_base(e, dw), c_coefficient(node, m, dw, sc));
}

inline std::pair<cplx, cplx> eigen_approx(const Node& node, const RotorModel& m, double omega) {
    return eigen_approx(node, m, omega, m.scales);
}

struct ReducedPencil {
    std::array<std::array<cplx, 2>, 2> Q{}, R{};
};

inline ReducedPencil reduced_pencil(const Node& node, const RotorModel& m, double omega, const Scales& sc) {
    const std::size_t dim = 2 * m.n;
    const ComplexVector u[2] = {branch_eigenvector(node.a, m.n), branch_eigenvector(node.b, m.n)};
    const cplx lambda0(0.0, node.omega0);
    const double w0 = node.omega_speed;
    const RealMatrix g = gyro_matrix(m.n);
    const ComplexMatrix G = to_complex(g), G2 = to_complex(g * g);
    ComplexMatrix dl(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            dl(i, j) = sc.delta * lambda0 * m.D(i, j) + sc.kappa * m.K(i, j) + sc.nu * m.N(i, j);

    auto form = [&](const ComplexVector& x, const ComplexMatrix& a, const ComplexVector& y) {
        const ComplexVector ay = a * y;
        cplx v{};
        for (std::size_t i = 0; i < dim; ++i) v += std::conj(x[i]) * ay[i];
        return v;
    };
    auto dot = [&](const ComplexVector& x, const ComplexVector& y) {
        cplx v{};
        for (std::size_t i = 0; i < dim; ++i) v += std::conj(x[i]) * y[i];
        return v;
    };

    ReducedPencil p;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            p.Q[i][j] = 2.0 * lambda0 * dot(u[i], u[j]) + 2.0 * w0 * form(u[i], G, u[j]);
            p.R[i][j] = (2.0 * lambda0 * form(u[i], G, u[j]) + 2.0 * w0 * form(u[i], G2, u[j])) * (omega - w0) +
                        form(u[i], dl, u[j]);
        }
    return p;
}

inline ReducedPencil reduced_pencil(const Node& node, const RotorModel& m, double omega) {
    return reduced_pencil(node, m, omega, m.scales);
}

// Roots of det(R + mu Q) = 0 shifted by lambda0.
inline std::pair<cplx, cplx> pencil_roots(const ReducedPencil& p, cplx lambda0) {
    const auto& Q = p.Q;
    const auto& R = p.R;
    const cplx a = Q[0][0] * Q[1][1] - Q[0][1] * Q[1][0];
    const cplx b = Q[0][0] * R[1][1] + Q[1][1] * R[0][0] - Q[0][1] * R[1][0] - Q[1][0] * R[0][1];
    const cplx c = R[0][0] * R[1][1] - R[0][1] * R[1][0];
    double qn = 0.0;
    for (const auto& row : Q)
        for (const auto& v : row) qn += std::norm(v);
    if (!(std::abs(a) > 1e-14 * qn)) throw numerical_error("pencil_roots: Q is singular");
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    const cplx q = std::abs(b + disc) >= std::abs(b - disc) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == cplx{}) return {lambda0, lambda0};
    return {lambda0 + q / a, lambda0 + c / q};
}

enum class ConeOrientation { near_vertical, near_horizontal };

// Hamiltonian cone at a node: Re c = rcoo dO^2 + 2 rcok dO k + rckk k^2 with dO = Omega - Omega0,
// axis Im lambda = omega0 + omega_slope dO + kappa_slope k.
struct MacKayCone {
    double apex_omega = 0, apex_kappa = 0, apex_frequency = 0;
    double kappa_slope = 0, omega_slope = 0;
    double rc_oo = 0, rc_ok = 0, rc_kk = 0;
    ConeOrientation orientation = ConeOrientation::near_vertical;
    bool membrane = false;  // attached plane (the axis plane) exists for mixed signature

    double re_c(double d_omega, double kappa) const {
        return rc_oo * d_omega * d_omega + 2 * rc_ok * d_omega * kappa + rc_kk * kappa * kappa;
    }
    double axis(double d_omega, double kappa) const {
        return apex_frequency + omega_slope * d_omega + kappa_slope * kappa;
    }
};

inline void require_hamiltonian(const RotorModel& m, const char* who) {
    if (m.scales.delta != 0.0 || m.scales.nu != 0.0)
        throw invalid_argument(std::string(who) + ": requires delta = nu = 0");
}

inline MacKayCone mackay_cone(const Node& node, const RotorModel& m) {
    require_hamiltonian(m, "mackay_cone");
    const NodeExpansion e = expansion_coefficients(node, m, {0.0, 1.0, 0.0});
    MacKayCone c;
    c.apex_omega = node.omega_speed;
    c.apex_frequency = node.omega0;
    c.kappa_slope = (e.trK_ss / (e.alpha * e.omega_s) + e.trK_tt / (e.beta * e.omega_t)) / 8;
    c.omega_slope = (e.s * e.eps + e.t * e.sigma) / 2.0;
    const double p = (e.t * e.sigma - e.s * e.eps) / 2.0;
    const double q = (e.beta * e.omega_s * e.trK_tt - e.alpha * e.omega_t * e.trK_ss) / (8 * e.omega_s * e.omega_t);
    const double r = e.alpha * e.beta * (e.trK_st_J * e.trK_st_J + e.trK_st_I * e.trK_st_I) /
                     (16 * e.omega_s * e.omega_t);
    c.rc_oo = p * p;
    c.rc_ok = p * q;
    c.rc_kk = q * q + r;
    c.orientation = node.sig_product > 0 ? ConeOrientation::near_vertical : ConeOrientation::near_horizontal;
    c.membrane = node.sig_product < 0;
    return c;
}

// Line a dO + b k = 0 through the node in the (Omega, kappa) plane.
struct NodeLine {
    double a = 0, b = 0;

    // kappa per unit speed offset; infinite for a vertical line.
    double slope() const {
        return b == 0.0 ? std::numeric_limits<double>::infinity() : -a / b;
    }
};

struct InstabilityBoundary {
    std::array<NodeLine, 2> lines;
    MacKayCone cone;

    // Strictly inside the sector Re c < 0.
    bool inside(double d_omega, double kappa) const { return cone.re_c(d_omega, kappa) < 0.0; }
};

inline InstabilityBoundary instability_boundary(const Node& node, const RotorModel& m) {
    require_hamiltonian(m, "instability_boundary");
    if (node.sig_product > 0) throw invalid_argument("instability_boundary: node has definite signature");
    const NodeExpansion e = expansion_coefficients(node, m, {0.0, 1.0, 0.0});
    const Block2x2 kst = block(m.K, std::size_t(e.s), std::size_t(e.t));
    const double ep = e.eps, sg = e.sigma;
    const double root = 2 * std::sqrt((std::pow(ep * kst.m11 + sg * kst.m22, 2) + std::pow(ep * kst.m12 - sg * kst.m21, 2)) /
                                      (-e.alpha * e.beta * e.omega_s * e.omega_t));
    const double base = e.trK_tt / (e.beta * e.omega_t) - e.trK_ss / (e.alpha * e.omega_s);
    InstabilityBoundary out;
    out.cone = mackay_cone(node, m);
    const double num = 4 * (e.s * ep - e.t * sg);
    // kappa (base +- root) = num dO
    out.lines[0] = {num, -(base + root)};
    out.lines[1] = {num, -(base - root)};
    return out;
}

}  // namespace campbell
