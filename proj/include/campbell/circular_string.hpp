#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "error.hpp"
#include "numlin.hpp"
#include "perturb.hpp"

namespace campbell {

// Rotating string through an eyelet, nondimensional: damping d, spring k, friction mu.
struct StringParams {
    double d = 0.0;
    double k = 0.0;
    double mu = 0.0;
};

// Crossing of the branches i n (1 + eps Omega) and i m (1 + delta Omega).
struct StringCrossing {
    int n = 1, m = 1;
    int eps = 1, delta = -1;
    double omega_speed = 0.0;  // Omega_0
    double omega0 = 0.0;

    bool definite() const { return n * m > 0; }
};

inline StringCrossing string_crossing(int n, int eps, int m, int delta) {
    if (n == 0 || m == 0) throw invalid_argument("string_crossing: n and m must be nonzero");
    if (std::abs(eps) != 1 || std::abs(delta) != 1) throw invalid_argument("string_crossing: signs must be +-1");
    const int den = m * delta - n * eps;
    if (den == 0) throw invalid_argument("string_crossing: parallel branches");
    StringCrossing c{n, m, eps, delta, double(n - m) / den, double(n * m * (delta - eps)) / den};
    return c;
}

inline cplx string_c(const StringCrossing& x, const StringParams& p, double omega) {
    using std::numbers::pi;
    const double n = x.n, m = x.m, e = x.eps, dl = x.delta, w0 = x.omega0;
    const double dw = omega - x.omega_speed;
    const double im_c = p.k * (2 * p.d * w0 - e * p.mu * (n - m)) / (16 * pi * pi * n * m) -
                        2 * (e * (n + m) / 2 * dw + (m - n) / (8 * pi * n * m) * p.k) *
                            (e / (4 * pi) * p.mu - p.d * (m - n) / (8 * pi * n * m) * w0);
    const double lin = (e * n - dl * m) / 2 * dw + (m - n) / (8 * pi * n * m) * p.k;
    const double re_c = lin * lin + p.k * p.k / (16 * pi * pi * n * m) -
                        std::pow(p.d * (m + n) * w0, 2) / (64 * pi * pi * n * n * m * m);
    return {re_c, im_c};
}

inline cplx string_base(const StringCrossing& x, const StringParams& p, double omega) {
    using std::numbers::pi;
    const double n = x.n, m = x.m;
    const double re = -p.d * (n + m) / (8 * pi * n * m) * x.omega0;
    const double im = x.omega0 + x.eps * (n - m) / 2 * (omega - x.omega_speed) + (n + m) / (8 * pi * n * m) * p.k;
    return {re, im};
}

inline std::pair<cplx, cplx> string_eigen_approx(const StringCrossing& x, const StringParams& p, double omega) {
    if (x.omega0 == 0.0) throw invalid_argument("string_eigen_approx: zero-frequency crossing");
    return split_by_c(string_base(x, p, omega), string_c(x, p, omega));
}

struct StringEp {
    StringCrossing crossing;
    StringParams params;  // d and mu; k unused
    bool exists = false;
    bool merged = false;  // d = 0: both points sit at (Omega_0, 0)
    double omega_ep_plus = std::numeric_limits<double>::quiet_NaN();
    double omega_ep_minus = std::numeric_limits<double>::quiet_NaN();
    double kappa_ep_plus = std::numeric_limits<double>::quiet_NaN();
    double kappa_ep_minus = std::numeric_limits<double>::quiet_NaN();
    NodeLine cut;  // Im c = 0 through (Omega_0, 0): a dO + b k = 0
    double re_lambda_ep = std::numeric_limits<double>::quiet_NaN();
    double im_lambda_ep_plus = std::numeric_limits<double>::quiet_NaN();
    double im_lambda_ep_minus = std::numeric_limits<double>::quiet_NaN();
};

inline StringEp string_ep(const StringCrossing& x, double d, double mu) {
    using std::numbers::pi;
    if (d == 0.0 && mu == 0.0) throw invalid_argument("string_ep: d and mu are both zero");
    if (x.omega0 == 0.0) throw invalid_argument("string_ep: zero-frequency crossing");
    StringEp r;
    r.crossing = x;
    r.params = {d, 0.0, mu};
    const double n = x.n, m = x.m, e = x.eps, w0 = x.omega0;

    // Im c = a dO + b k; both coefficients read off the c expression
    const double bfac = e / (4 * pi) * mu - d * (m - n) / (8 * pi * n * m) * w0;
    r.cut.a = -e * (n + m) * bfac;
    r.cut.b = (2 * d * w0 - e * mu * (n - m)) / (16 * pi * pi * n * m) - (m - n) / (4 * pi * n * m) * bfac;

    const double rad = n * m * (mu * mu * n * m + d * d * w0 * w0);
    r.merged = d == 0.0;
    r.exists = rad > 0.0;
    if (!r.exists) return r;
    const double root = std::sqrt(rad);
    const double off = e / (8 * pi * n * m) * (m + n) * d * d * w0 * w0 / root;
    const double kap = d * w0 * (2 * e * mu * n * m - d * (m - n) * w0) / (2 * root);
    r.omega_ep_plus = x.omega_speed + off;
    r.omega_ep_minus = x.omega_speed - off;
    r.kappa_ep_plus = kap;
    r.kappa_ep_minus = -kap;

    const StringParams pp{d, r.kappa_ep_plus, mu}, pm{d, r.kappa_ep_minus, mu};
    r.re_lambda_ep = string_base(x, pp, r.omega_ep_plus).real();
    r.im_lambda_ep_plus = string_base(x, pp, r.omega_ep_plus).imag();
    r.im_lambda_ep_minus = string_base(x, pm, r.omega_ep_minus).imag();
    return r;
}

// Exceptional points of every definite crossing with 1 <= n, m <= n_max and delta = -eps whose
// Omega_0 lies in the open window. Negative (n, m) pairs are conjugates with the same projections
// and are not listed.
inline std::vector<StringEp> butterfly_atlas(double d, double mu, int n_max, SpeedRange window) {
    if (n_max < 1) throw invalid_argument("butterfly_atlas: n_max must be at least 1");
    if (window.lo < -1.0 || window.hi > 1.0 || !(window.lo < window.hi))
        throw invalid_argument("butterfly_atlas: window must lie inside (-1, 1)");
    std::vector<StringEp> out;
    for (int n = 1; n <= n_max; ++n)
        for (int m = n; m <= n_max; ++m)
            for (int eps : {1, -1}) {
                if (n == m && eps < 0) continue;
                const StringCrossing x = string_crossing(n, eps, m, -eps);
                if (!(x.omega_speed > window.lo && x.omega_speed < window.hi)) continue;
                out.push_back(string_ep(x, d, mu));
            }
    return out;
}

}  // namespace campbell
