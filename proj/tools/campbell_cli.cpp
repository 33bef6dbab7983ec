#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "campbell/campbell.hpp"

using namespace campbell;

namespace {

// exit codes
constexpr int ok = 0;
constexpr int usage_error = 1;
constexpr int numerical_failure = 2;

struct Range {
    double lo = 0.0, hi = 0.0;
    int steps = 1;
    bool lo_set = false, hi_set = false;
};

struct RunConfig {
    std::string command;
    std::string model = "6dof";
    Range omega{0.0, 2.5, 201};
    Range kappa{-0.5, 0.5, 101};
    std::optional<double> delta, kappa_scale, nu;
    long long node = -1;
    std::string out;
    std::string format = "csv";
    bool all_frequencies = false;
    // shaft
    double mass = 1.0, k1 = 4.0, mu1 = 0.0, mu2 = 0.0, beta = 0.2;
    // string
    double d = 0.3, mu = 0.0;
    int n_max = 6;
};

std::vector<double> linspace(const Range& r, const char* name) {
    if (r.steps < 1) throw invalid_argument(std::string(name) + " steps must be at least 1");
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
        throw invalid_argument(std::string(name) + " range needs finite min <= max");
    if (r.steps == 1) return {r.lo};
    if (r.lo == r.hi) throw invalid_argument(std::string(name) + " range is a single point; use steps 1");
    std::vector<double> g(std::size_t(r.steps));
    for (int i = 0; i < r.steps; ++i) g[std::size_t(i)] = r.lo + (r.hi - r.lo) * i / (r.steps - 1);
    g.back() = r.hi;
    return g;
}

RotorModel load(const RunConfig& c) {
    RotorModel m;
    if (c.model == "6dof")
        m = example_6dof();
    else if (c.model == "shaft")
        m = shaft_model(c.mass, c.k1, 0.0, c.mu1, c.mu2, c.beta);
    else
        m = load_model(c.model);
    if (c.delta) m.scales.delta = *c.delta;
    if (c.kappa_scale) m.scales.kappa = *c.kappa_scale;
    if (c.nu) m.scales.nu = *c.nu;
    validate(m);
    for (std::size_t s : gap_condition_violations(m.omegas))
        std::cerr << "warning: gap condition fails between modes " << s << " and " << s + 1
                  << "; sub/supercritical labels are not guaranteed\n";
    return m;
}

std::string branch_label(const Branch& b) {
    return std::to_string(b.s) + (b.alpha > 0 ? "+" : "-") + (b.eps > 0 ? "+" : "-");
}

std::vector<Node> catalogue(const RunConfig& c, const RotorModel& m) {
    if (c.omega.lo > c.omega.hi) throw invalid_argument("omega range needs min <= max");
    return enumerate_nodes(m.omegas, {c.omega.lo, c.omega.hi}, c.all_frequencies);
}

Node pick_node(const RunConfig& c, const RotorModel& m) {
    const auto nodes = catalogue(c, m);
    if (c.node < 0 || std::size_t(c.node) >= nodes.size())
        throw invalid_argument("unknown node id " + std::to_string(c.node) + " (" + std::to_string(nodes.size()) +
                               " nodes in the speed window)");
    const Node& n = nodes[std::size_t(c.node)];
    if (n.clustered)
        std::cerr << "warning: node " << n.id << " is clustered; the two-branch theory is applied to this pair only\n";
    return n;
}

Table cmd_mesh(const RunConfig& c) {
    const RotorModel m = load(c);
    Table t{"mesh", {"Omega", "s", "alpha", "eps", "Im_lambda"}, {}};
    for (double w : linspace(c.omega, "omega"))
        for (const Branch& b : all_branches(m.n))
            t.add({w, (long long)b.s, (long long)b.alpha, (long long)b.eps, branch_value(b, m.omega(std::size_t(b.s)), w).imag()});
    return t;
}

Table cmd_nodes(const RunConfig& c) {
    const RotorModel m = load(c);
    Table t{"nodes",
            {"node_id", "Omega0", "omega0", "branch_a", "branch_b", "sig_product", "regime", "clustered"},
            {}};
    for (const Node& n : catalogue(c, m))
        t.add({(long long)n.id, n.omega_speed, n.omega0, branch_label(n.a), branch_label(n.b), (long long)n.sig_product,
               std::string(to_string(n.regime)), n.clustered});
    return t;
}

Table cmd_local(const RunConfig& c) {
    const RotorModel m = load(c);
    const Node n = pick_node(c, m);
    const NodeExpansion e = expansion_coefficients(n, m);
    const cplx c0 = c_coefficient(n, m, 0.0, m.scales);
    Table t{"local",
            {"node_id", "Omega0", "omega0", "s", "t", "alpha", "beta", "eps", "sigma", "Re_A1", "Im_A1", "Re_A2", "Im_A2",
             "Re_B1", "Im_B1", "Re_B2", "Im_B2", "trK_ss", "trK_tt", "trK_st_J", "trK_st_I", "Re_c", "Im_c"},
            {}};
    t.add({(long long)n.id, n.omega_speed, n.omega0, (long long)e.s, (long long)e.t, (long long)e.alpha, (long long)e.beta,
           (long long)e.eps, (long long)e.sigma, e.A1.real(), e.A1.imag(), e.A2.real(), e.A2.imag(), e.B1.real(), e.B1.imag(),
           e.B2.real(), e.B2.imag(), e.trK_ss, e.trK_tt, e.trK_st_J, e.trK_st_I, c0.real(), c0.imag()});
    return t;
}

Table cmd_surface(const RunConfig& c) {
    const RotorModel m = load(c);
    const Node n = pick_node(c, m);
    const double w = 5.0 * std::max({std::abs(m.scales.kappa), std::abs(m.scales.delta * n.omega0), std::abs(m.scales.nu)});
    Range om{n.omega_speed - w, n.omega_speed + w, c.omega.steps};
    Range ka{-w, w, c.kappa.steps};
    if (c.kappa.lo_set) ka.lo = c.kappa.lo;
    if (c.kappa.hi_set) ka.hi = c.kappa.hi;
    if (om.lo == om.hi && om.steps > 1)
        throw invalid_argument("surface window is empty: all scales are zero");
    const auto wg = linspace(om, "omega"), kg = linspace(ka, "kappa");
    double neighbour = std::numeric_limits<double>::infinity();
    for (const Node& o : enumerate_nodes(m.omegas, {n.omega_speed - 2 * w - 1, n.omega_speed + 2 * w + 1}, true))
        if (o.omega_speed != n.omega_speed || o.omega0 != n.omega0)
            neighbour = std::min(neighbour, std::hypot(o.omega_speed - n.omega_speed, o.omega0 - n.omega0));
    if (w > 0.5 * neighbour)
        std::cerr << "advisory: speed offsets up to " << w << " exceed half the distance to the nearest other node ("
                  << neighbour << "); the local expansion may be inaccurate there\n";
    const double radius = node_search_radius(n, m);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Table t{"surface",
            {"Omega", "kappa", "branch", "Re_lambda_approx", "Im_lambda_approx", "Re_lambda_exact", "Im_lambda_exact"},
            {}};
    for (double k : kg)
        for (double om_ : wg) {
            const Scales sc{m.scales.delta, k, m.scales.nu};
            const auto [p, q] = eigen_approx(n, m, om_, sc);
            cplx x{nan, nan}, y{nan, nan};
            try {
                std::tie(x, y) = nearest_pair(exact_spectrum(m, om_, sc).eigenvalues, cplx(0.0, n.omega0), radius);
                if (std::abs(p - y) + std::abs(q - x) < std::abs(p - x) + std::abs(q - y)) std::swap(x, y);
            } catch (const numerical_error&) {
                // perturbation too large for the local pair; leave the exact columns empty
            }
            t.add({om_, k, std::string("+"), p.real(), p.imag(), x.real(), x.imag()});
            t.add({om_, k, std::string("-"), q.real(), q.imag(), y.real(), y.imag()});
        }
    return t;
}

Table cmd_ep_atlas(const RunConfig& c) {
    const RotorModel m = load(c);
    if (m.scales.delta == 0.0 && m.scales.nu == 0.0) throw invalid_argument("ep-atlas needs delta or nu nonzero");
    Table t{"ep-atlas",
            {"node_id", "Omega0", "omega0", "sig_product", "Omega_EP_plus", "kappa_EP_plus", "Omega_EP_minus",
             "kappa_EP_minus", "exists", "class"},
            {}};
    for (const Node& n : catalogue(c, m)) {
        ExceptionalPointPair p;
        std::string cls = "DEGENERATE";
        try {
            p = exceptional_points(n, m, m.scales.delta, m.scales.nu);
        } catch (const numerical_error&) {
            p = {};
        }
        try {
            cls = to_string(classify_unfolding(n, m, m.scales.delta, m.scales.nu));
        } catch (const numerical_error&) {
            // zero discriminant: the class stays DEGENERATE
        }
        t.add({(long long)n.id, n.omega_speed, n.omega0, (long long)n.sig_product, p.omega_ep_plus, p.kappa_ep_plus,
               p.omega_ep_minus, p.kappa_ep_minus, p.exists, cls});
    }
    return t;
}

Table cmd_string_atlas(const RunConfig& c) {
    const double lo = c.omega.lo_set ? c.omega.lo : -1.0, hi = c.omega.hi_set ? c.omega.hi : 1.0;
    Table t{"string-atlas",
            {"n", "m", "eps", "delta", "Omega0", "omega0", "Omega_EP", "kappa_EP", "Re_lambda_EP", "Im_lambda_EP_plus",
             "Im_lambda_EP_minus"},
            {}};
    // one row per crossing: the listed point is the + exceptional point, its partner sits at
    // (2 Omega0 - Omega_EP, -kappa_EP)
    for (const StringEp& e : butterfly_atlas(c.d, c.mu, c.n_max, {lo, hi})) {
        const auto& x = e.crossing;
        t.add({(long long)x.n, (long long)x.m, (long long)x.eps, (long long)x.delta, x.omega_speed, x.omega0,
               e.omega_ep_plus, e.kappa_ep_plus, e.re_lambda_ep, e.im_lambda_ep_plus, e.im_lambda_ep_minus});
    }
    return t;
}

Table cmd_shaft(const RunConfig& c) {
    const auto wg = linspace(c.omega, "omega"), kg = linspace(c.kappa, "kappa");
    Table t{"shaft", {"Omega", "kappa", "track_id", "Re_lambda", "Im_lambda"}, {}};
    for (double k : kg) {
        const RotorModel m = shaft_model(c.mass, c.k1, k, c.mu1, c.mu2, c.beta);
        for (const SpectrumSample& s : sweep(m, wg))
            for (std::size_t j = 0; j < s.eigenvalues.size(); ++j)
                t.add({s.omega, k, (long long)s.track_ids[j], s.eigenvalues[j].real(), s.eigenvalues[j].imag()});
    }
    return t;
}

double pair_distance(std::pair<cplx, cplx> x, std::pair<cplx, cplx> y) {
    const double d1 = std::max(std::abs(x.first - y.first), std::abs(x.second - y.second));
    const double d2 = std::max(std::abs(x.first - y.second), std::abs(x.second - y.first));
    return std::min(d1, d2);
}

Table cmd_verify(const RunConfig& c, bool& all_passed) {
    const RotorModel m = load(c);
    const Scales& sc = m.scales;
    const double smax = std::max({std::abs(sc.delta), std::abs(sc.kappa), std::abs(sc.nu)});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Table t{"verify", {"suite", "node_id", "Omega0", "omega0", "sig_product", "measured", "threshold", "status"}, {}};
    all_passed = true;
    if (smax == 0.0) {
        t.add({std::string("convergence"), -1LL, nan, nan, 0LL, nan, 1.8, std::string("skipped: zero perturbation")});
        t.add({std::string("two_path"), -1LL, nan, nan, 0LL, nan, 1e-10, std::string("skipped: zero perturbation")});
        return t;
    }
    const auto nodes = catalogue(c, m);
    const Direction dir{sc.kappa / smax, sc.delta / smax, sc.nu / smax, 1.0};
    const std::vector<double> hs{0.04, 0.02, 0.01, 0.005};
    for (const Node& n : nodes) {
        const Cell id = (long long)n.id, sp = (long long)n.sig_product;
        if (n.clustered) {
            t.add({std::string("convergence"), id, n.omega_speed, n.omega0, sp, nan, 1.8, std::string("skipped: clustered node")});
            continue;
        }
        try {
            const ErrorReport r = convergence_order(n, m, dir, hs);
            const bool pass = r.fitted_slope >= 1.8;
            all_passed = all_passed && pass;
            t.add({std::string("convergence"), id, n.omega_speed, n.omega0, sp, r.fitted_slope, 1.8,
                   std::string(pass ? "pass" : "fail")});
        } catch (const numerical_error& e) {
            t.add({std::string("convergence"), id, n.omega_speed, n.omega0, sp, nan, 1.8, std::string("skipped: ") + e.what()});
        }
    }
    std::mt19937 rng(20240101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const Node& n : nodes) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Scales s{sc.delta * u(rng), sc.kappa * u(rng), sc.nu * u(rng)};
            const double w = n.omega_speed + smax * u(rng);
            const auto a = eigen_approx(n, m, w, s);
            const auto b = pencil_roots(reduced_pencil(n, m, w, s), cplx(0.0, n.omega0));
            const double scale = std::max(std::abs(a.first), std::abs(a.second)) + 1.0;
            worst = std::max(worst, pair_distance(a, b) / scale);
        }
        const bool pass = worst <= 1e-10;
        all_passed = all_passed && pass;
        t.add({std::string("two_path"), (long long)n.id, n.omega_speed, n.omega0, (long long)n.sig_product, worst, 1e-10,
               std::string(pass ? "pass" : "fail")});
    }
    return t;
}

void emit(const RunConfig& c, const Table& t) {
    auto write = [&](std::ostream& os) {
        if (c.format == "json")
            write_json(os, t);
        else
            write_csv(os, t);
    };
    if (c.out.empty() || c.out == "-") {
        write(std::cout);
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot open output file " + c.out);
    write(f);
    f.close();
    if (!f) throw std::ios_base::failure("failed writing output file " + c.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Campbell diagrams of weakly anisotropic rotors"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig c;

    app.add_option("--model", c.model, "bundled model (6dof, shaft) or model JSON path");
    app.add_option("--omega-min", c.omega.lo, "lower speed bound")->each([&](const std::string&) { c.omega.lo_set = true; });
    app.add_option("--omega-max", c.omega.hi, "upper speed bound")->each([&](const std::string&) { c.omega.hi_set = true; });
    app.add_option("--omega-steps", c.omega.steps, "speed samples");
    app.add_option("--kappa-min", c.kappa.lo, "lower kappa bound")->each([&](const std::string&) { c.kappa.lo_set = true; });
    app.add_option("--kappa-max", c.kappa.hi, "upper kappa bound")->each([&](const std::string&) { c.kappa.hi_set = true; });
    app.add_option("--kappa-steps", c.kappa.steps, "kappa samples");
    app.add_option("--delta", c.delta, "damping scale");
    app.add_option("--kappa", c.kappa_scale, "stiffness detuning scale");
    app.add_option("--nu", c.nu, "circulatory scale");
    app.add_option("--node", c.node, "node id from the nodes listing of the same speed window");
    app.add_option("--out", c.out, "output file, stdout when omitted");
    app.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--all-frequencies", c.all_frequencies, "also list nodes with negative frequency");
    app.add_option("--mass", c.mass, "shaft mass");
    app.add_option("--k1", c.k1, "shaft spring stiffness");
    app.add_option("--mu1", c.mu1, "shaft damping, first axis");
    app.add_option("--mu2", c.mu2, "shaft damping, second axis");
    app.add_option("--beta", c.beta, "shaft follower force");
    app.add_option("--d", c.d, "string damping");
    app.add_option("--mu", c.mu, "string friction");
    app.add_option("--n-max", c.n_max, "largest string mode number");

    app.add_subcommand("mesh", "analytic branches of the unperturbed mesh");
    app.add_subcommand("nodes", "crossings with signature and regime");
    app.add_subcommand("local", "expansion coefficients at one node")->add_option("node_id", c.node);
    app.add_subcommand("surface", "approximate and exact eigenvalues on an (Omega, kappa) grid near a node")
        ->add_option("node_id", c.node);
    app.add_subcommand("ep-atlas", "exceptional points of every node");
    app.add_subcommand("string-atlas", "exceptional points of the rotating string crossings");
    app.add_subcommand("shaft", "tracked spectrum of the rotating shaft over (Omega, kappa)");
    app.add_subcommand("verify", "convergence and two-path agreement suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage_error;
    }
    c.command = app.get_subcommands().front()->get_name();

    try {
        Table t;
        bool passed = true;
        if (c.command == "mesh") t = cmd_mesh(c);
        else if (c.command == "nodes") t = cmd_nodes(c);
        else if (c.command == "local") t = cmd_local(c);
        else if (c.command == "surface") t = cmd_surface(c);
        else if (c.command == "ep-atlas") t = cmd_ep_atlas(c);
        else if (c.command == "string-atlas") t = cmd_string_atlas(c);
        else if (c.command == "shaft") t = cmd_shaft(c);
        else t = cmd_verify(c, passed);
        emit(c, t);
        return passed ? ok : numerical_failure;
    } catch (const campbell::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical_failure;
    }
}
