#include <gtest/gtest.h>

#include <random>

#include "campbell/campbell.hpp"

using namespace campbell;

namespace {

Node find_node(const std::vector<double>& omegas, Branch a, Branch b) {
    for (const auto& n : enumerate_nodes(omegas, {-10, 10}, true))
        if ((n.a == a && n.b == b) || (n.a == b && n.b == a)) return n;
    throw std::runtime_error("node not found");
}

// Two-mode model with omega = (1, 3) and a single coupling entry per matrix, for the mixed node
// (1,-,+) & (2,+,-) at Omega0 = 4/3.
RotorModel mixed_model(double k13, double k14, double n13, double nu) {
    RotorModel m = unperturbed_model({1, 3});
    m.K(0, 2) = m.K(2, 0) = k13;
    m.K(0, 3) = m.K(3, 0) = k14;
    m.N(0, 1) = 1;
    m.N(1, 0) = -1;
    m.N(0, 2) = n13;
    m.N(2, 0) = -n13;
    m.scales = {0.0, 0.0, nu};
    return m;
}

const Branch kMixedA{1, -1, 1}, kMixedB{2, 1, -1};

// Nodes of the 6-DOF example in [0, 2.5] on the upper half-mesh, without the degenerate ones.
std::vector<Node> regular_nodes(const RotorModel& m, double delta, double nu) {
    std::vector<Node> out;
    for (const auto& n : enumerate_nodes(m.omegas, {0, 2.5}, false)) {
        try {
            exceptional_points(n, m, delta, nu);
            out.push_back(n);
        } catch (const degenerate_case&) {
        }
    }
    return out;
}

}  // namespace

TEST(Discriminants, DefiniteNodesArePositive) {
    const RotorModel m = example_6dof();
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto& n : enumerate_nodes(m.omegas, {0, 2.5}, false)) {
        if (n.sig_product < 0) continue;
        for (int k = 0; k < 20; ++k) {
            const Discriminants d = discriminants(n, m, u(rng), u(rng));
            // nodes with no K_st coupling and no circulatory/damping split have D_disc = 0 identically
            if (std::isnan(d.D_disc) || d.D_disc == 0.0) continue;
            EXPECT_GT(d.D_disc, 0.0) << "node " << n.id;
            EXPECT_GE(d.N_disc, 0.0) << "node " << n.id;
        }
    }
}

TEST(ExceptionalPoints, CVanishesAndPairIsSymmetric) {
    const RotorModel m = example_6dof();
    const double delta = 0.1, nu = 0.2;
    const auto nodes = regular_nodes(m, delta, nu);
    ASSERT_GT(nodes.size(), 5u);
    for (const auto& n : nodes) {
        const auto ep = exceptional_points(n, m, delta, nu);
        if (n.sig_product > 0) {
            EXPECT_TRUE(ep.exists) << "node " << n.id;
        }
        if (!ep.exists) continue;
        EXPECT_EQ(ep.kappa_ep_plus, -ep.kappa_ep_minus);
        EXPECT_DOUBLE_EQ(ep.omega_ep_plus - n.omega_speed, n.omega_speed - ep.omega_ep_minus);
        const double scale = std::max({delta, nu, std::abs(ep.kappa_ep_plus), std::abs(ep.omega_ep_plus - n.omega_speed)});
        for (int sgn : {1, -1}) {
            const double w = sgn > 0 ? ep.omega_ep_plus : ep.omega_ep_minus;
            const double k = sgn > 0 ? ep.kappa_ep_plus : ep.kappa_ep_minus;
            const cplx c = c_coefficient(n, m, w - n.omega_speed, {delta, k, nu});
            EXPECT_LE(std::abs(c), 1e-10 * scale * scale) << "node " << n.id;
            auto [p, q] = eigen_approx(n, m, w, {delta, k, nu});
            EXPECT_LE(std::abs(p - q), 1e-4 * scale) << "node " << n.id;
        }
    }
}

TEST(ExceptionalPoints, MixedNodeWithoutEps) {
    // CROSS construction: N_disc > 0 and D_disc < 0, so no real exceptional points
    const RotorModel m = mixed_model(1, 0, 0, 0.01);
    const Node n = find_node(m.omegas, kMixedA, kMixedB);
    const auto ep = exceptional_points(n, m, 0.0, 0.01);
    EXPECT_LT(ep.disc.N_disc / ep.disc.D_disc, 0.0);
    EXPECT_FALSE(ep.exists);
    EXPECT_TRUE(std::isnan(ep.omega_ep_plus));
}

TEST(ExceptionalPoints, Rejections) {
    const RotorModel m = example_6dof();
    const Node n = find_node(m.omegas, {1, 1, 1}, {2, 1, -1});
    EXPECT_THROW(exceptional_points(n, m, 0.0, 0.0), invalid_argument);
    RotorModel z = unperturbed_model({1, 3});
    const Node nz = find_node(z.omegas, {1, 1, 1}, {2, 1, -1});
    EXPECT_THROW(exceptional_points(nz, z, 0.1, 0.2), degenerate_case);
}

namespace {

// (l1 - l2)^2 of the two exact eigenvalues nearest the first-order pair; analytic near an EP.
cplx squared_gap(const RotorModel& m, const Node& n, double w, double k, double delta, double nu) {
    auto ev = eig_dense(companion(m, w, {delta, k, nu}), {.vectors = false}).eigenvalues;
    auto [p, q] = eigen_approx(n, m, w, {delta, k, nu});
    const cplx mid = (p + q) / 2.0;
    std::sort(ev.begin(), ev.end(), [&](cplx x, cplx y) { return std::abs(x - mid) < std::abs(y - mid); });
    return (ev[0] - ev[1]) * (ev[0] - ev[1]);
}

// Newton on the squared gap with a forward-difference Jacobian, started at the prediction.
std::array<double, 2> exact_ep(const RotorModel& m, const Node& n, double w, double k, double delta, double nu) {
    for (int it = 0; it < 60; ++it) {
        const cplx f = squared_gap(m, n, w, k, delta, nu);
        const double h = 1e-7;
        const cplx fw = (squared_gap(m, n, w + h, k, delta, nu) - f) / h;
        const cplx fk = (squared_gap(m, n, w, k + h, delta, nu) - f) / h;
        const double det = fw.real() * fk.imag() - fk.real() * fw.imag();
        const double dw = (fk.imag() * f.real() - fk.real() * f.imag()) / det;
        const double dk = (-fw.imag() * f.real() + fw.real() * f.imag()) / det;
        w -= dw;
        k -= dk;
        if (std::hypot(dw, dk) < 1e-14) break;
    }
    return {w, k};
}

// Frobenius norm of delta lambda0 D + kappa K + nu N on the coordinates of modes s and t.
double local_size(const RotorModel& m, const Node& n, double k, double delta, double nu) {
    std::vector<std::size_t> idx;
    for (int s : {n.a.s, n.b.s})
        for (std::size_t c : {std::size_t(2 * s - 2), std::size_t(2 * s - 1)})
            if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
    double sum = 0;
    for (auto i : idx)
        for (auto j : idx) sum += std::norm(delta * cplx(0, n.omega0) * m.D(i, j) + k * m.K(i, j) + nu * m.N(i, j));
    return std::sqrt(sum);
}

}  // namespace

TEST(ExceptionalPoints, ExactSpectrumCoalescesNearPrediction) {
    const RotorModel m = example_6dof();
    for (const auto& n : enumerate_nodes(m.omegas, {0, 2.5}, false)) {
        if (n.sig_product < 0 || n.regime == Regime::critical) continue;
        ExceptionalPointPair ep;
        try {
            ep = exceptional_points(n, m, 0.1, 0.2);
        } catch (const degenerate_case&) {
            continue;
        }
        ASSERT_TRUE(ep.exists);
        for (int sgn : {1, -1}) {
            const double w0 = sgn > 0 ? ep.omega_ep_plus : ep.omega_ep_minus;
            const double k0 = sgn > 0 ? ep.kappa_ep_plus : ep.kappa_ep_minus;
            const auto [w, k] = exact_ep(m, n, w0, k0, 0.1, 0.2);
            const double eps = local_size(m, n, k, 0.1, 0.2);
            EXPECT_LT(std::sqrt(std::abs(squared_gap(m, n, w, k, 0.1, 0.2))), 0.05 * eps) << "node " << n.id;
            EXPECT_LE(std::hypot(w - w0, k - k0), eps * eps) << "node " << n.id;
        }
    }
}

TEST(ExceptionalPoints, PredictionErrorIsQuadratic) {
    const RotorModel m = example_6dof();
    const Node n = find_node(m.omegas, {1, 1, 1}, {2, 1, -1});
    for (int sgn : {1, -1}) {
        std::vector<double> dist;
        for (double h : {0.5, 0.25, 0.125}) {
            const auto ep = exceptional_points(n, m, 0.1 * h, 0.2 * h);
            const double w0 = sgn > 0 ? ep.omega_ep_plus : ep.omega_ep_minus;
            const double k0 = sgn > 0 ? ep.kappa_ep_plus : ep.kappa_ep_minus;
            const auto [w, k] = exact_ep(m, n, w0, k0, 0.1 * h, 0.2 * h);
            dist.push_back(std::hypot(w - w0, k - k0));
        }
        EXPECT_GE(std::log2(dist.front() / dist.back()) / 2, 1.8) << "sign " << sgn;
    }
}

TEST(AxisNodeEp, PureDeltaExample) {
    RotorModel m = example_6dof();
    m.scales = {0.1, 0.0, 0.0};
    const auto p = axis_node_ep(1, m, AxisMode::pure_delta);
    EXPECT_NEAR(p.omega_ep_plus, 0.1 * std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(p.omega_ep_minus, -0.1 * std::sqrt(2.0), 1e-15);
    EXPECT_EQ(p.kappa_ep_plus, 0.0);
    const auto g = exceptional_points(standstill_node(1, m.omegas), m, 0.1, 0.0);
    ASSERT_TRUE(g.exists);
    EXPECT_NEAR(std::max(g.omega_ep_plus, g.omega_ep_minus), p.omega_ep_plus, 1e-10);
    EXPECT_NEAR(std::abs(g.kappa_ep_plus), 0.0, 1e-10);
}

TEST(AxisNodeEp, GeneralFormulaSpecialisesAtStandstill) {
    RotorModel m = example_6dof();
    for (std::size_t s = 1; s <= 3; ++s) {
        m.scales = {0.0, 0.0, 0.2};
        const auto a = axis_node_ep(s, m, AxisMode::pure_nu);
        const auto g = exceptional_points(standstill_node(s, m.omegas), m, 0.0, 0.2);
        ASSERT_TRUE(g.exists);
        EXPECT_NEAR(std::abs(g.kappa_ep_plus), std::abs(a.kappa_ep_plus), 1e-10) << "s=" << s;
        EXPECT_NEAR(g.omega_ep_plus, 0.0, 1e-10) << "s=" << s;
        m.scales = {0.1, 0.0, 0.0};
        const auto b = axis_node_ep(s, m, AxisMode::pure_delta);
        const auto h = exceptional_points(standstill_node(s, m.omegas), m, 0.1, 0.0);
        ASSERT_TRUE(h.exists);
        EXPECT_NEAR(std::abs(h.omega_ep_plus), std::abs(b.omega_ep_plus), 1e-10) << "s=" << s;
        EXPECT_NEAR(h.kappa_ep_plus, 0.0, 1e-10) << "s=" << s;
    }
}

TEST(AxisNodeEp, IsotropicBlockHasNoFiniteEp) {
    RotorModel m = unperturbed_model({1, 3});
    m.K(0, 0) = m.K(1, 1) = 2.0;
    m.N(0, 1) = 1;
    m.N(1, 0) = -1;
    m.scales = {0, 0, 0.1};
    EXPECT_THROW(axis_node_ep(1, m, AxisMode::pure_nu), numerical_error);
}

TEST(BranchCut, CoincidenceOnEachSide) {
    const RotorModel m = example_6dof();
    const double delta = 0.1, nu = 0.2;
    for (const auto& n : regular_nodes(m, delta, nu)) {
        BranchCut cut;
        try {
            cut = branch_cut_line(n, m, delta, nu);
        } catch (const degenerate_case&) {
            continue;
        }
        if (!cut.ep.exists) continue;
        const Scales base{delta, 0, nu};
        // the EPs lie on the line
        for (int sgn : {1, -1}) {
            const double dw = (sgn > 0 ? cut.ep.omega_ep_plus : cut.ep.omega_ep_minus) - n.omega_speed;
            const double k = sgn > 0 ? cut.ep.kappa_ep_plus : cut.ep.kappa_ep_minus;
            EXPECT_NEAR(cut.line.a * dw + cut.line.b * k, 0.0, 1e-10 * (std::abs(cut.line.a) + std::abs(cut.line.b)));
        }
        const double dwp = cut.ep.omega_ep_plus - n.omega_speed, kp = cut.ep.kappa_ep_plus;
        for (double t : {0.0, 0.3, -0.6, 1.5, -2.0, 3.0}) {
            const double dw = t * dwp, k = t * kp;
            Scales sc = base;
            sc.kappa = k;
            const cplx c = c_coefficient(n, m, dw, sc);
            auto [p, q] = eigen_approx(n, m, n.omega_speed + dw, sc);
            const bool between = std::abs(t) < 1.0;
            const CutKind kind = between ? cut.segment : cut.outer;
            const double tol = 1e-9 * (std::abs(p) + 1);
            if (kind == CutKind::imaginary_parts_coincide) {
                EXPECT_LE(c.real(), 1e-14) << "node " << n.id << " t=" << t;
                EXPECT_NEAR(p.imag(), q.imag(), tol) << "node " << n.id << " t=" << t;
                if (t != 0.0 || c.real() < 0) {
                    EXPECT_GT(std::abs(p.real() - q.real()), tol);
                }
            } else {
                EXPECT_GE(c.real(), -1e-14) << "node " << n.id << " t=" << t;
                EXPECT_NEAR(p.real(), q.real(), tol) << "node " << n.id << " t=" << t;
                EXPECT_GT(std::abs(p.imag() - q.imag()), tol);
            }
        }
        // off the line neither part coincides
        const auto dir = cut.direction();
        const double off = 0.01;
        auto [p, q] = eigen_approx(n, m, n.omega_speed + 0.5 * dwp - off * dir[1],
                                   {delta, 0.5 * kp + off * dir[0], nu});
        EXPECT_GT(std::abs(p.real() - q.real()), 1e-9);
        EXPECT_GT(std::abs(p.imag() - q.imag()), 1e-9);
    }
}

TEST(BranchCut, DegenerateLineRejected) {
    const RotorModel m = example_6dof();
    const Node n = find_node(m.omegas, {1, 1, 1}, {2, 1, -1});
    EXPECT_THROW(branch_cut_line(n, m, 0, 0), invalid_argument);
    RotorModel z = unperturbed_model({1, 3});
    z.K(0, 2) = z.K(2, 0) = 1;
    EXPECT_THROW(branch_cut_line(find_node(z.omegas, {1, 1, 1}, {2, 1, -1}), z, 0.1, 0.1), degenerate_case);
}

TEST(ClassifyUnfolding, DefiniteIsAlwaysCoffeeFilter) {
    const RotorModel m = example_6dof();
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto& n : enumerate_nodes(m.omegas, {0, 2.5}, false)) {
        if (n.sig_product < 0) continue;
        for (int k = 0; k < 10; ++k)
            EXPECT_EQ(classify_unfolding(n, m, u(rng), u(rng)), UnfoldingClass::im_coffee_filter_re_viaduct);
    }
    EXPECT_THROW(classify_unfolding(enumerate_nodes(m.omegas, {0, 1}, false)[0], m, 0, 0), invalid_argument);
}

TEST(ClassifyUnfolding, MixedScenarios) {
    struct Case {
        double k13, k14, n13;
        UnfoldingClass want;
    };
    const Case cases[] = {
        {1, 0, 0, UnfoldingClass::im_cross_re_separate},
        {1, 0, 2, UnfoldingClass::im_viaduct_re_coffee_filter},
        {0, 1, 2, UnfoldingClass::im_separate_re_cross},
    };
    for (const auto& c : cases) {
        const RotorModel m = mixed_model(c.k13, c.k14, c.n13, 0.01);
        const Node n = find_node(m.omegas, kMixedA, kMixedB);
        EXPECT_EQ(classify_unfolding(n, m, 0.0, 0.01), c.want) << to_string(c.want);
    }
}

TEST(ClassifyUnfolding, ScaleInvariant) {
    const RotorModel m = example_6dof();
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1, 1), g(0.1, 10);
    for (const auto& n : enumerate_nodes(m.omegas, {0, 2.5}, false))
        for (int k = 0; k < 10; ++k) {
            const double d = u(rng), v = u(rng), s = g(rng);
            UnfoldingClass a, b;
            try {
                a = classify_unfolding(n, m, d, v);
                b = classify_unfolding(n, m, s * d, s * v);
            } catch (const degenerate_case&) {
                continue;
            }
            EXPECT_EQ(a, b) << "node " << n.id;
        }
}

TEST(ClassifyUnfolding, TagsSpelledOut) {
    EXPECT_STREQ(to_string(UnfoldingClass::im_coffee_filter_re_viaduct), "IM_COFFEE_FILTER_RE_VIADUCT");
    EXPECT_STREQ(to_string(UnfoldingClass::im_separate_re_cross), "IM_SEPARATE_RE_CROSS");
}

namespace {

struct Slopes {
    double re = 0, im = 0;
    double rel_re = 0;  // relative Re error at the smallest step
    double max_re = 0, max_im = 0;

    // the order shows in the slope unless the gap is already at roundoff level
    bool re_order(double want) const { return re >= want || max_re <= 1e-11; }
    bool im_order(double want) const { return im >= want || max_im <= 1e-11; }
};

// Log-log slopes of the gap between the asymptotic and the eigen_approx pair, matched by Re order
// (by the complex pair when the case also predicts Im).
Slopes asymptotic_slopes(const RotorModel& m, std::size_t s, AsymptoticCase which, bool vary_omega, double fixed,
                         const std::vector<double>& hs) {
    const AxisAsymptotics a = axis_node_asymptotics(s, m, which);
    const Node n = standstill_node(s, m.omegas);
    std::vector<double> er, ei;
    Slopes out;
    for (double h : hs) {
        const double w = vary_omega ? h : fixed, k = vary_omega ? fixed : h;
        const AsymptoticValue v = a.evaluate(w, k);
        auto [p, q] = eigen_approx(n, m, w, {m.scales.delta, k, m.scales.nu});
        const cplx x0(v.re[0], v.im[0]), x1(v.re[1], v.im[1]);
        bool swap = p.real() > q.real() ? v.re[0] < v.re[1] : v.re[0] > v.re[1];
        if (v.has_im) swap = std::abs(p - x1) + std::abs(q - x0) < std::abs(p - x0) + std::abs(q - x1);
        if (swap) std::swap(p, q);
        er.push_back(std::max(std::abs(p.real() - v.re[0]), std::abs(q.real() - v.re[1])));
        if (v.has_im) ei.push_back(std::max(std::abs(p.imag() - v.im[0]), std::abs(q.imag() - v.im[1])));
        out.rel_re = er.back() / std::max(std::abs(p.real() - q.real()) / 2, 1e-300);
    }
    out.max_re = *std::max_element(er.begin(), er.end());
    if (!ei.empty()) out.max_im = *std::max_element(ei.begin(), ei.end());
    const double lh = std::log(hs.front() / hs.back());
    out.re = std::log(er.front() / er.back()) / lh;
    if (!ei.empty()) out.im = std::log(ei.front() / ei.back()) / lh;
    return out;
}

}  // namespace

TEST(AxisAsymptotics, DeltaOffsetAndGamma) {
    RotorModel m = example_6dof();
    m.scales = {0.1, 0.0, 0.0};
    const AxisAsymptotics a = axis_node_asymptotics(1, m, AsymptoticCase::delta_cut);
    EXPECT_DOUBLE_EQ(a.re_offset, -0.1 * 2 / 4);
    // K11 = [[1,2],[2,1]], D11 = [[-1,2],[2,3]]: tr(K D) = -1+4+4+3 = 10
    EXPECT_DOUBLE_EQ(a.gamma, 2 * 10 - 2 * 2);
    EXPECT_THROW(a.evaluate(0.5 * a.omega_ep, 0.01), invalid_argument);
    EXPECT_THROW(axis_node_asymptotics(1, m, AsymptoticCase::nu_cross), invalid_argument);
}

TEST(AxisAsymptotics, NuCasesMatchExpansion) {
    RotorModel m = example_6dof();
    m.scales = {0.0, 0.0, 0.05};
    const std::vector<double> hs{1e-3, 5e-4, 2.5e-4};
    for (std::size_t s = 1; s <= 3; ++s) {
        const double kep = std::abs(axis_node_asymptotics(s, m, AsymptoticCase::nu_cross).kappa_ep);
        // crossing: linear in Omega with an O(Omega^3) remainder
        const Slopes c = asymptotic_slopes(m, s, AsymptoticCase::nu_cross, true, 2 * kep, hs);
        EXPECT_TRUE(c.re_order(2.8)) << "s=" << s;
        EXPECT_LE(c.rel_re, 1e-2) << "s=" << s;
        // avoided crossing: O(Omega^2)
        EXPECT_TRUE(asymptotic_slopes(m, s, AsymptoticCase::nu_avoid, true, 0.5 * kep, hs).re_order(1.8)) << "s=" << s;
        // touching: square root with an O(Omega^{3/2}) remainder
        const Slopes t = asymptotic_slopes(m, s, AsymptoticCase::nu_at_ep, true, kep, hs);
        EXPECT_TRUE(t.re_order(1.3)) << "s=" << s;
        EXPECT_LE(t.rel_re, 0.1) << "s=" << s;
    }
}

TEST(AxisAsymptotics, DeltaCasesMatchExpansion) {
    RotorModel m = example_6dof();
    m.scales = {0.05, 0.0, 0.0};
    const std::vector<double> hs{1e-3, 5e-4, 2.5e-4};
    for (std::size_t s = 1; s <= 3; ++s) {
        const double oep = std::abs(axis_node_asymptotics(s, m, AsymptoticCase::delta_cut).omega_ep);
        const Slopes c = asymptotic_slopes(m, s, AsymptoticCase::delta_cut, false, 2 * oep, hs);
        EXPECT_TRUE(c.re_order(1.8)) << "s=" << s;
        EXPECT_TRUE(c.im_order(0.9)) << "s=" << s;
        const Slopes a = asymptotic_slopes(m, s, AsymptoticCase::delta_avoid, false, 0.5 * oep, hs);
        EXPECT_TRUE(a.re_order(1.8)) << "s=" << s;
        EXPECT_TRUE(a.im_order(1.8)) << "s=" << s;
        const Slopes e = asymptotic_slopes(m, s, AsymptoticCase::delta_at_ep, false, oep, hs);
        EXPECT_TRUE(e.re_order(1.3)) << "s=" << s;
        EXPECT_TRUE(e.im_order(1.3)) << "s=" << s;
    }
}
