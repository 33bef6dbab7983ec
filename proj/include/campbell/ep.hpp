#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "perturb.hpp"

namespace campbell {

// U, D, N of the exceptional-point formulas; renamed to keep D and N for the matrices.
struct Discriminants {
    double U = 0, D_disc = 0, N_disc = 0;
};

enum class UnfoldingClass {
    im_coffee_filter_re_viaduct,
    im_viaduct_re_coffee_filter,
    im_cross_re_separate,
    im_separate_re_cross,
};

inline const char* to_string(UnfoldingClass c) {
    switch (c) {
        case UnfoldingClass::im_coffee_filter_re_viaduct: return "IM_COFFEE_FILTER_RE_VIADUCT";
        case UnfoldingClass::im_viaduct_re_coffee_filter: return "IM_VIADUCT_RE_COFFEE_FILTER";
        case UnfoldingClass::im_cross_re_separate: return "IM_CROSS_RE_SEPARATE";
        case UnfoldingClass::im_separate_re_cross: return "IM_SEPARATE_RE_CROSS";
    }
    return "?";
}

struct ExceptionalPointPair {
    double omega_ep_plus = std::numeric_limits<double>::quiet_NaN();
    double omega_ep_minus = std::numeric_limits<double>::quiet_NaN();
    double kappa_ep_plus = std::numeric_limits<double>::quiet_NaN();
    double kappa_ep_minus = std::numeric_limits<double>::quiet_NaN();
    bool exists = false;
    Discriminants disc;
};

namespace detail {

struct EpTerms {
    NodeExpansion e;
    double Y = 0;     // alpha w_s Im B1 - beta w_t Im A1
    double numU = 0;  // Re A2 tr(K_st J) - Re B2 tr(K_st I)
    double kpart = 0; // alpha beta (tr(K_st J)^2 + tr(K_st I)^2) / (4 w_s w_t)
    double npart = 0; // alpha beta (Re A2^2 + Re B2^2) / (4 w_s w_t)
};

inline EpTerms ep_terms(const Node& node, const RotorModel& m, double delta, double nu) {
    EpTerms t;
    t.e = expansion_coefficients(node, m, {delta, 0.0, nu});
    const auto& e = t.e;
    t.Y = e.alpha * e.omega_s * e.B1.imag() - e.beta * e.omega_t * e.A1.imag();
    t.numU = e.A2.real() * e.trK_st_J - e.B2.real() * e.trK_st_I;
    const double ab = e.alpha * e.beta, w = 4 * e.omega_s * e.omega_t;
    t.kpart = ab * (e.trK_st_J * e.trK_st_J + e.trK_st_I * e.trK_st_I) / w;
    t.npart = ab * (std::norm(e.A2.real()) + std::norm(e.B2.real())) / w;
    return t;
}

}  // namespace detail

// Literal values; when the denominator of U vanishes, U and D_disc are infinite.
inline Discriminants discriminants(const Node& node, const RotorModel& m, double delta, double nu) {
    const auto t = detail::ep_terms(node, m, delta, nu);
    const auto& e = t.e;
    Discriminants d;
    const double y4 = t.Y / (4 * e.omega_s * e.omega_t);
    d.N_disc = y4 * y4 + t.npart;
    if (t.Y == 0.0) {
        d.U = t.numU == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                            : std::copysign(std::numeric_limits<double>::infinity(), t.numU);
        d.D_disc = t.numU == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
    } else {
        d.U = t.numU / t.Y;
        d.D_disc = d.U * d.U + t.kpart;
    }
    return d;
}

inline ExceptionalPointPair exceptional_points(const Node& node, const RotorModel& m, double delta, double nu) {
    if (delta == 0.0 && nu == 0.0) throw invalid_argument("exceptional_points: delta and nu are both zero");
    const auto t = detail::ep_terms(node, m, delta, nu);
    const auto& e = t.e;
    ExceptionalPointPair p;
    p.disc = discriminants(node, m, delta, nu);
    const double D = p.disc.D_disc, N = p.disc.N_disc;
    if (std::isnan(D)) throw degenerate_case("exceptional_points: U is 0/0 (degenerate node)");
    const double dscale = std::isfinite(D) ? p.disc.U * p.disc.U + std::abs(t.kpart) : 1.0;
    if (std::abs(D) <= 1e-12 * dscale) throw degenerate_case("exceptional_points: D_disc = 0 (degenerate node)");
    const double den_speed = e.t * e.sigma - e.s * e.eps;
    if (std::isinf(D)) {
        // limit of vanishing U denominator: kappa_EP -> 0 and U sqrt(N/D) -> sign(U) sqrt(N)
        p.exists = N > 0;
        if (!p.exists) return p;
        const double off = std::copysign(std::sqrt(N), p.disc.U) / den_speed;
        p.omega_ep_plus = node.omega_speed + off;
        p.omega_ep_minus = node.omega_speed - off;
        p.kappa_ep_plus = 0.0;
        p.kappa_ep_minus = -0.0;
        return p;
    }
    const double ratio = N / D;
    p.exists = ratio > 0;
    if (!p.exists) return p;
    const double root = std::sqrt(ratio);
    const double ws = e.omega_s, wt = e.omega_t;
    const double off = (4 * ws * wt * p.disc.U - e.beta * ws * e.trK_tt + e.alpha * wt * e.trK_ss) /
                       (4 * ws * wt * den_speed) * root;
    p.omega_ep_plus = node.omega_speed + off;
    p.omega_ep_minus = node.omega_speed - off;
    p.kappa_ep_plus = root;
    p.kappa_ep_minus = -root;
    return p;
}

inline UnfoldingClass classify_unfolding(const Node& node, const RotorModel& m, double delta, double nu) {
    if (delta == 0.0 && nu == 0.0) throw invalid_argument("classify_unfolding: zero perturbation");
    if (node.sig_product > 0) return UnfoldingClass::im_coffee_filter_re_viaduct;
    const auto t = detail::ep_terms(node, m, delta, nu);
    const Discriminants d = discriminants(node, m, delta, nu);
    if (std::isnan(d.D_disc)) throw degenerate_case("classify_unfolding: U is 0/0");
    const double y4 = t.Y / (4 * t.e.omega_s * t.e.omega_t);
    const double nscale = y4 * y4 + std::abs(t.npart);
    if (std::abs(d.N_disc) <= 1e-12 * nscale) throw degenerate_case("classify_unfolding: N_disc = 0");
    if (std::isfinite(d.D_disc) && std::abs(d.D_disc) <= 1e-12 * (d.U * d.U + std::abs(t.kpart)))
        throw degenerate_case("classify_unfolding: D_disc = 0");
    const bool dpos = d.D_disc > 0, npos = d.N_disc > 0;
    if (dpos && npos) return UnfoldingClass::im_coffee_filter_re_viaduct;
    if (!dpos && !npos) return UnfoldingClass::im_viaduct_re_coffee_filter;
    return npos ? UnfoldingClass::im_cross_re_separate : UnfoldingClass::im_separate_re_cross;
}

enum class CutKind { imaginary_parts_coincide, real_parts_coincide };

// The line Im c = 0 through the node, a dO + b k = 0, split at the exceptional points.
struct BranchCut {
    NodeLine line;
    ExceptionalPointPair ep;
    CutKind segment = CutKind::imaginary_parts_coincide;  // between the EPs (or the whole line if none)
    CutKind outer = CutKind::real_parts_coincide;          // beyond the EPs

    // Unit direction along the line in (dO, k).
    std::array<double, 2> direction() const {
        const double l = std::hypot(line.a, line.b);
        return {-line.b / l, line.a / l};
    }
};

inline BranchCut branch_cut_line(const Node& node, const RotorModel& m, double delta, double nu) {
    if (delta == 0.0 && nu == 0.0) throw invalid_argument("branch_cut_line: delta and nu are both zero");
    const double ca = c_coefficient(node, m, 1.0, {delta, 0.0, nu}).imag();
    const double cb = c_coefficient(node, m, 0.0, {delta, 1.0, nu}).imag();
    const double scale = std::abs(c_coefficient(node, m, 1.0, {delta, 1.0, nu}));
    if (std::hypot(ca, cb) <= 1e-14 * std::max(scale, 1e-300)) throw degenerate_case("branch_cut_line: Im c vanishes identically");
    BranchCut b;
    b.line = {ca, cb};
    const double re_apex = c_coefficient(node, m, 0.0, {delta, 0.0, nu}).real();
    b.segment = re_apex < 0 ? CutKind::imaginary_parts_coincide : CutKind::real_parts_coincide;
    b.outer = re_apex < 0 ? CutKind::real_parts_coincide : CutKind::imaginary_parts_coincide;
    try {
        b.ep = exceptional_points(node, m, delta, nu);
    } catch (const degenerate_case&) {
        b.ep = {};
    }
    if (!b.ep.exists) b.outer = b.segment;
    return b;
}

inline Node standstill_node(std::size_t s, const std::vector<double>& omegas) {
    if (s < 1 || s > omegas.size()) throw invalid_argument("standstill_node: index out of range");
    return make_node({int(s), 1, 1}, {int(s), 1, -1}, omegas);
}

enum class AxisMode { pure_nu, pure_delta };

namespace detail {

// Eigenvalues (larger first) of a symmetric 2x2 block.
inline std::array<double, 2> sym_eigs(const Block2x2& b) {
    const double h = b.trace() / 2, r = std::hypot((b.m11 - b.m22) / 2, b.m12);
    return {h + r, h - r};
}

}  // namespace detail

// Exceptional points of the standstill doublet s under a purely circulatory (pure_nu, uses
// model nu) or purely dissipative (pure_delta, uses model delta) perturbation.
inline ExceptionalPointPair axis_node_ep(std::size_t s, const RotorModel& m, AxisMode mode) {
    const Block2x2 kss = block(m.K, s, s), dss = block(m.D, s, s);
    const double n12 = m.N(2 * s - 2, 2 * s - 1);
    ExceptionalPointPair p;
    p.exists = true;
    if (mode == AxisMode::pure_nu) {
        const auto rho = detail::sym_eigs(kss);
        if (rho[0] - rho[1] <= 1e-14 * (std::abs(rho[0]) + std::abs(rho[1])))
            throw numerical_error("axis_node_ep: isotropic K_ss block, exceptional points at infinity");
        p.omega_ep_plus = p.omega_ep_minus = 0.0;
        p.kappa_ep_plus = 2 * m.scales.nu * n12 / (rho[0] - rho[1]);
        p.kappa_ep_minus = -p.kappa_ep_plus;
    } else {
        const auto mu = detail::sym_eigs(dss);
        p.kappa_ep_plus = p.kappa_ep_minus = 0.0;
        p.omega_ep_plus = m.scales.delta * (mu[0] - mu[1]) / (4.0 * double(s));
        p.omega_ep_minus = -p.omega_ep_plus;
    }
    return p;
}

enum class AsymptoticCase { nu_cross, nu_avoid, nu_at_ep, delta_cut, delta_avoid, delta_at_ep };

inline const char* to_string(AsymptoticCase c) {
    switch (c) {
        case AsymptoticCase::nu_cross: return "nu_cross";
        case AsymptoticCase::nu_avoid: return "nu_avoid";
        case AsymptoticCase::nu_at_ep: return "nu_at_ep";
        case AsymptoticCase::delta_cut: return "delta_cut";
        case AsymptoticCase::delta_avoid: return "delta_avoid";
        case AsymptoticCase::delta_at_ep: return "delta_at_ep";
    }
    return "?";
}

// Leading terms near a standstill doublet. The nu cases are expansions in Omega at fixed kappa,
// the delta cases expansions in kappa at fixed Omega. Pairs are ordered so that entry 0 of re
// and entry 0 of im belong to the same eigenvalue.
struct AsymptoticValue {
    std::array<double, 2> re{};
    std::array<double, 2> im{};
    bool has_im = false;
};

struct AxisAsymptotics {
    AsymptoticCase which = AsymptoticCase::nu_cross;
    std::size_t s = 1;
    double omega_s = 0, delta = 0, nu = 0;
    double n12 = 0;          // n_{2s-1,2s}
    double rho_gap = 0;      // rho1(K_ss) - rho2(K_ss)
    double trK = 0, trD = 0;
    double gamma = 0;        // 2 tr(K_ss D_ss) - tr K_ss tr D_ss
    double kappa_ep = 0;     // pure-nu exceptional point, positive branch
    double omega_ep = 0;     // pure-delta exceptional point, positive branch
    double re_offset = 0;    // -delta tr D_ss / 4

    AsymptoticValue evaluate(double omega, double kappa) const {
        AsymptoticValue v;
        const double sd = double(s);
        auto regime = [](bool ok) {
            if (!ok) throw invalid_argument("axis_node_asymptotics: parameters outside the case's regime");
        };
        switch (which) {
            case AsymptoticCase::nu_cross: {
                regime(kappa * kappa > kappa_ep * kappa_ep);
                const double r = 2 * nu * sd * n12 / (rho_gap * std::sqrt(kappa * kappa - kappa_ep * kappa_ep)) * omega;
                v.re = {r, -r};
                break;
            }
            case AsymptoticCase::nu_avoid: {
                regime(kappa * kappa < kappa_ep * kappa_ep);
                const double r = rho_gap / (4 * omega_s) * std::sqrt(kappa_ep * kappa_ep - kappa * kappa);
                v.re = {r, -r};
                break;
            }
            case AsymptoticCase::nu_at_ep: {
                const double r = 0.5 * std::sqrt(std::abs(2 * nu * sd * n12 * omega / omega_s));
                v.re = {r, -r};
                break;
            }
            case AsymptoticCase::delta_cut: {
                regime(omega * omega > omega_ep * omega_ep);
                const double w = std::sqrt(omega * omega - omega_ep * omega_ep);
                const double x = gamma * delta * kappa / (16 * sd * omega_s * w);
                v.im = {omega_s + sd * w, omega_s - sd * w};
                v.re = {re_offset - x, re_offset + x};
                v.has_im = true;
                break;
            }
            case AsymptoticCase::delta_avoid: {
                regime(omega * omega < omega_ep * omega_ep);
                const double w = std::sqrt(omega_ep * omega_ep - omega * omega);
                const double x = gamma * delta * kappa / (16 * sd * omega_s * w);
                const double im0 = omega_s + trK / (4 * omega_s) * kappa;
                v.re = {re_offset - sd * w, re_offset + sd * w};
                v.im = {im0 + x, im0 - x};
                v.has_im = true;
                break;
            }
            case AsymptoticCase::delta_at_ep: {
                // magnitude 1/4 sqrt(|delta kappa gamma| / omega_s); Re and Im offsets share
                // their sign when delta kappa gamma < 0 and are opposite otherwise
                const double hk = gamma * delta * kappa;
                const double r = 0.25 * std::sqrt(std::abs(hk) / omega_s);
                const double sg = hk > 0 ? -1.0 : 1.0;
                const double im0 = omega_s + trK / (4 * omega_s) * kappa;
                v.re = {re_offset + sg * r, re_offset - sg * r};
                v.im = {im0 + r, im0 - r};
                v.has_im = true;
                break;
            }
        }
        return v;
    }
};

inline AxisAsymptotics axis_node_asymptotics(std::size_t s, const RotorModel& m, AsymptoticCase which) {
    const Block2x2 kss = block(m.K, s, s), dss = block(m.D, s, s);
    AxisAsymptotics a;
    a.which = which;
    a.s = s;
    a.omega_s = m.omega(s);
    a.delta = m.scales.delta;
    a.nu = m.scales.nu;
    a.n12 = m.N(2 * s - 2, 2 * s - 1);
    const auto rho = detail::sym_eigs(kss);
    a.rho_gap = rho[0] - rho[1];
    a.trK = kss.trace();
    a.trD = dss.trace();
    a.gamma = 2 * (kss.m11 * dss.m11 + kss.m12 * dss.m21 + kss.m21 * dss.m12 + kss.m22 * dss.m22) - a.trK * a.trD;
    a.re_offset = -a.delta * a.trD / 4;
    const bool nu_case = which == AsymptoticCase::nu_cross || which == AsymptoticCase::nu_avoid ||
                         which == AsymptoticCase::nu_at_ep;
    if (nu_case) {
        if (m.scales.delta != 0.0 || m.scales.nu == 0.0)
            throw invalid_argument("axis_node_asymptotics: nu cases need delta = 0 and nu != 0");
        a.kappa_ep = axis_node_ep(s, m, AxisMode::pure_nu).kappa_ep_plus;
    } else {
        if (m.scales.nu != 0.0 || m.scales.delta == 0.0)
            throw invalid_argument("axis_node_asymptotics: delta cases need nu = 0 and delta != 0");
        a.omega_ep = axis_node_ep(s, m, AxisMode::pure_delta).omega_ep_plus;
    }
    return a;
}

}  // namespace campbell
