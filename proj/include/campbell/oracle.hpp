#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "error.hpp"
#include "mesh.hpp"
#include "model.hpp"
#include "numlin.hpp"
#include "perturb.hpp"

namespace campbell {

struct SpectrumSample {
    double omega = 0.0;
    Scales scales;
    ComplexVector eigenvalues;   // sorted by (Re, Im)
    std::vector<int> track_ids;  // track label of each eigenvalue
};

inline bool lex_less(const cplx& a, const cplx& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

inline SpectrumSample exact_spectrum(const RotorModel& m, double omega, const Scales& sc) {
    SpectrumSample s;
    s.omega = omega;
    s.scales = sc;
    s.eigenvalues = eig_dense(companion(m, omega, sc), {.vectors = false}).eigenvalues;
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), lex_less);
    s.track_ids.resize(s.eigenvalues.size());
    std::iota(s.track_ids.begin(), s.track_ids.end(), 0);
    return s;
}

inline SpectrumSample exact_spectrum(const RotorModel& m, double omega) { return exact_spectrum(m, omega, m.scales); }

// Minimum-cost assignment for a square cost matrix; result[row] = column.
inline std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> result(n);
    for (std::size_t j = 1; j <= n; ++j) result[p[j] - 1] = j - 1;
    return result;
}

// Largest displacement in the optimal matching of two equally sized multisets.
inline double multiset_distance(const ComplexVector& a, const ComplexVector& b) {
    if (a.size() != b.size()) throw invalid_argument("multiset_distance: sizes differ");
    std::vector<std::vector<double>> cost(a.size(), std::vector<double>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) cost[i][j] = std::abs(a[i] - b[j]);
    const auto assign = hungarian(cost);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, cost[i][assign[i]]);
    return d;
}

// Exact spectra along a sorted speed grid with continuity labels. Tracks follow a linear
// prediction from the two previous samples; greedy nearest matching falls back to the optimal
// assignment when a greedy step moves further than half the expected motion.
inline std::vector<SpectrumSample> sweep(const RotorModel& m, const std::vector<double>& grid,
                                         std::optional<Scales> overrides = std::nullopt) {
    if (grid.empty()) throw invalid_argument("sweep: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw invalid_argument("sweep: grid must be strictly increasing");
    const Scales sc = overrides.value_or(m.scales);
    std::vector<SpectrumSample> out;
    out.reserve(grid.size());
    out.push_back(exact_spectrum(m, grid[0], sc));
    const std::size_t k = out[0].eigenvalues.size();
    std::vector<cplx> prev(k), prev2;
    for (std::size_t j = 0; j < k; ++j) prev[std::size_t(out[0].track_ids[j])] = out[0].eigenvalues[j];

    for (std::size_t g = 1; g < grid.size(); ++g) {
        SpectrumSample s = exact_spectrum(m, grid[g], sc);
        const double step = grid[g] - grid[g - 1];
        std::vector<cplx> pred = prev;
        double motion = step * double(m.n);
        if (!prev2.empty()) {
            const double ratio = step / (grid[g - 1] - grid[g - 2]);
            for (std::size_t i = 0; i < k; ++i) {
                pred[i] = prev[i] + ratio * (prev[i] - prev2[i]);
                motion = std::max(motion, std::abs(pred[i] - prev[i]));
            }
        }
        std::vector<std::size_t> assign(k);
        std::vector<bool> taken(k, false);
        double worst = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t best = k;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                if (taken[j]) continue;
                const double dd = std::abs(s.eigenvalues[j] - pred[i]);
                if (dd < bd - 1e-12) {
                    bd = dd;
                    best = j;
                }
            }
            taken[best] = true;
            assign[i] = best;
            worst = std::max(worst, bd);
        }
        if (worst > 0.5 * motion) {
            std::vector<std::vector<double>> cost(k, std::vector<double>(k));
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) cost[i][j] = std::abs(s.eigenvalues[j] - pred[i]);
            assign = hungarian(cost);
        }
        prev2 = prev;
        for (std::size_t i = 0; i < k; ++i) {
            s.track_ids[assign[i]] = int(i);
            prev[i] = s.eigenvalues[assign[i]];
        }
        out.push_back(std::move(s));
    }
    return out;
}

// Half the distance from omega0 to the nearest other branch frequency at the node speed.
inline double node_search_radius(const Node& node, const RotorModel& m) {
    double best = std::numeric_limits<double>::infinity();
    for (const Branch& b : all_branches(m.n)) {
        const double f = branch_value(b, m.omega(std::size_t(b.s)), node.omega_speed).imag();
        const double d = std::abs(f - node.omega0);
        if (d > 1e-9 * (1.0 + std::abs(node.omega0))) best = std::min(best, d);
    }
    return 0.5 * best;
}

// The two eigenvalues closest to i omega0 within the search radius.
inline std::pair<cplx, cplx> nearest_pair(const ComplexVector& eigs, cplx target, double radius) {
    std::vector<std::size_t> idx(eigs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(eigs[a] - target) < std::abs(eigs[b] - target); });
    if (eigs.size() < 2 || std::abs(eigs[idx[1]] - target) >= radius)
        throw numerical_error("fewer than two exact eigenvalues inside the node search radius");
    return {eigs[idx[0]], eigs[idx[1]]};
}

inline double hausdorff2(std::pair<cplx, cplx> a, std::pair<cplx, cplx> b) {
    auto d = [](cplx x, std::pair<cplx, cplx> set) { return std::min(std::abs(x - set.first), std::abs(x - set.second)); };
    return std::max({d(a.first, b), d(a.second, b), d(b.first, a), d(b.second, a)});
}

inline double approx_error(const Node& node, const RotorModel& m, double omega, const Scales& sc) {
    const auto approx = eigen_approx(node, m, omega, sc);
    const auto exact = exact_spectrum(m, omega, sc);
    const auto near = nearest_pair(exact.eigenvalues, cplx(0.0, node.omega0), node_search_radius(node, m));
    return hausdorff2(approx, near);
}

// Joint scaling direction: scales and speed offset are h times these.
struct Direction {
    double kappa = 0, delta = 0, nu = 0, d_omega = 0;
};

struct ErrorReport {
    std::size_t node_id = 0;
    std::vector<double> h_values;
    std::vector<double> errors;
    double fitted_slope = 0.0;
    std::size_t points_used = 0;
};

inline ErrorReport convergence_order(const Node& node, const RotorModel& m, Direction dir, const std::vector<double>& h_list) {
    if (h_list.size() < 3) throw invalid_argument("convergence_order: need at least three h values");
    for (std::size_t i = 0; i < h_list.size(); ++i)
        if (!(h_list[i] > 0.0) || (i > 0 && !(h_list[i] < h_list[i - 1])))
            throw invalid_argument("convergence_order: h values must be positive and decreasing");
    ErrorReport r;
    r.node_id = node.id;
    r.h_values = h_list;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double h : h_list) {
        const Scales sc{dir.delta * h, dir.kappa * h, dir.nu * h};
        const double e = approx_error(node, m, node.omega_speed + dir.d_omega * h, sc);
        r.errors.push_back(e);
        if (e < 1e-13) continue;
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++r.points_used;
    }
    if (r.points_used < 2) throw numerical_error("convergence_order: errors below 1e-13, fit rejected");
    const double np = double(r.points_used);
    r.fitted_slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    return r;
}

}  // namespace campbell
