#ifndef PERCMOD_HYPERGEOMETRIC_HPP
#define PERCMOD_HYPERGEOMETRIC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>

#include <percmod/config.hpp>
#include <percmod/errors.hpp>

namespace percmod::hyp
{

using cplx = std::complex<double>;

struct Value {
    cplx value;
    double abs_err = 0.0;
};

enum class Route { series, pfaff, one_minus_x, inverse_one_minus_x, ode };

namespace detail
{

inline constexpr double eps = std::numeric_limits<double>::epsilon();

inline bool is_nonpositive_integer(double v)
{
    return v <= 0.0 && v == std::floor(v);
}

// c - a - b within this distance of an integer is treated as the logarithmic case.
inline bool near_integer(double v)
{
    return std::abs(v - std::round(v)) < 1e-9;
}

inline double inv_gamma(double v)
{
    return is_nonpositive_integer(v) ? 0.0 : 1.0 / std::tgamma(v);
}

inline void check_c(double c)
{
    if (is_nonpositive_integer(c)) {
        throw domain_error("2F1: c must not be a nonpositive integer");
    }
}

// sum_{n >= start} (a)_n (b)_n / ((c)_n n!) x^(n - start), for start in {0, 1}.
inline Value power_series(double a, double b, double c, cplx x, const EvalConfig &cfg, int start = 0)
{
    check_c(c);
    cplx term = 1.0;
    if (start == 1) {
        term = a * b / c;
    }
    cplx sum = term;
    double mag = std::abs(term);
    for (int n = start; n < cfg.max_terms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        mag += std::abs(term);
        if (term == 0.0) {
            return {sum, mag * eps};
        }
        // Once the ratio has settled below 1 the remaining tail is bounded by a geometric series.
        const double ratio = std::abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2.0))) * std::abs(x);
        if (ratio < 1.0 && n > 2) {
            const double tail = std::abs(term) * ratio / (1.0 - ratio);
            if (tail <= eps * std::abs(sum) || tail < 1e-300) {
                return {sum, tail + 4.0 * eps * mag};
            }
        }
    }
    throw precision_error("2F1 power series did not converge within max_terms", std::abs(term));
}

struct Args {
    double a, b, c;
    cplx x;
    cplx omx;      // 1 - x, supplied separately when it is known more accurately
    cplx log_omx;  // log(1 - x) on the branch matching the approach direction
};

inline Value eval(const Args &p, const EvalConfig &cfg, int tail_start);

// F(a,b;c;x) = A1 F(a,b;a+b-c+1;1-x) + A2 (1-x)^(c-a-b) F(c-a,c-b;c-a-b+1;1-x)
inline Value connection(const Args &p, const EvalConfig &cfg)
{
    const double s = p.c - p.a - p.b;
    if (near_integer(s)) {
        throw domain_error("2F1: integer c-a-b (logarithmic connection case) is not supported");
    }
    const double gc = std::tgamma(p.c);
    const double a1 = gc * std::tgamma(s) * inv_gamma(p.c - p.a) * inv_gamma(p.c - p.b);
    const double a2 = gc * std::tgamma(-s) * inv_gamma(p.a) * inv_gamma(p.b);
    Value out{0.0, 0.0};
    if (a1 != 0.0) {
        const auto f1 = power_series(p.a, p.b, 1.0 - s, p.omx, cfg);
        out.value += a1 * f1.value;
        out.abs_err += std::abs(a1) * f1.abs_err;
    }
    if (a2 != 0.0) {
        const auto f2 = power_series(p.c - p.a, p.c - p.b, 1.0 + s, p.omx, cfg);
        const cplx w = std::exp(s * p.log_omx);
        out.value += a2 * w * f2.value;
        out.abs_err += std::abs(a2 * w) * f2.abs_err;
    }
    out.abs_err += 8.0 * eps * std::abs(out.value);
    return out;
}

// Pfaff: F(a,b;c;x) = (1-x)^(-a) F(a,c-b;c;x/(x-1)).
inline Value pfaff(const Args &p, const EvalConfig &cfg, bool then_connect)
{
    Args q;
    q.a = p.a;
    q.b = p.c - p.b;
    q.c = p.c;
    q.x = -p.x / p.omx;
    q.omx = 1.0 / p.omx;
    q.log_omx = -p.log_omx;
    const auto inner = then_connect ? connection(q, cfg) : power_series(q.a, q.b, q.c, q.x, cfg);
    const cplx pre = std::exp(-p.a * p.log_omx);
    return {pre * inner.value, std::abs(pre) * inner.abs_err + 4.0 * eps * std::abs(pre * inner.value)};
}

// Taylor steps of the hypergeometric ODE x(1-x)F'' + (c-(a+b+1)x)F' - abF = 0 from x0 to x1.
inline Value ode_continue(const Args &p, const EvalConfig &cfg)
{
    const cplx dir = p.x / std::abs(p.x);
    // Start on a ray at angle pi/3 on the side of the target, so the straight path
    // stays well away from the singular point x = 1. On the cut the side is fixed
    // by the approach direction.
    const bool below = p.x.imag() < 0.0 || (p.x.imag() == 0.0 && p.log_omx.imag() > 0.0);
    cplx x0 = std::polar(0.6, below ? -std::numbers::pi / 3 : std::numbers::pi / 3);
    if (p.x.imag() == 0.0 && p.x.real() < 1.0 && p.log_omx.imag() == 0.0) {
        x0 = 0.6 * dir;
    }
    auto f = power_series(p.a, p.b, p.c, x0, cfg);
    auto fp = power_series(p.a + 1, p.b + 1, p.c + 1, x0, cfg);
    cplx F = f.value;
    cplx dF = fp.value * (p.a * p.b / p.c);
    double err = f.abs_err + std::abs(p.a * p.b / p.c) * fp.abs_err;
    const double ab1 = p.a + p.b + 1.0;
    while (std::abs(p.x - x0) > 0.0) {
        const double radius = std::min(std::abs(x0), std::abs(1.0 - x0));
        cplx h = p.x - x0;
        const double step = 0.5 * radius;
        if (std::abs(h) > step) {
            h *= step / std::abs(h);
        }
        const cplx q0 = x0 * (1.0 - x0);
        cplx u0 = F, u1 = dF;
        cplx val = u0 + u1 * h;
        cplx der = u1;
        cplx hp = h;  // h^(n+1) for the derivative accumulation
        double mag = std::abs(val);
        for (int n = 0; n < cfg.max_terms; ++n) {
            const cplx u2 = -(((1.0 - 2.0 * x0) * double(n) + p.c - ab1 * x0) * double(n + 1) * u1
                              + (-double(n) * (n - 1) - ab1 * n - p.a * p.b) * u0)
                            / (q0 * double((n + 2) * (n + 1)));
            der += double(n + 2) * u2 * hp;
            hp *= h;
            const cplx t = u2 * hp;
            val += t;
            mag += std::abs(t);
            u0 = u1;
            u1 = u2;
            if (std::abs(t) <= eps * std::abs(val) && std::abs(u2 * hp) * double(n + 2) <= eps * std::abs(der) * std::abs(h)) {
                break;
            }
            if (n + 1 == cfg.max_terms) {
                throw precision_error("2F1 ODE continuation did not converge", std::abs(t));
            }
        }
        F = val;
        dF = der;
        err += 4.0 * eps * mag;
        x0 += h;
    }
    return {F, err};
}

inline Route choose_route(const Args &p)
{
    const bool on_cut = p.log_omx.imag() != 0.0 && p.x.imag() == 0.0 && p.omx.real() < 0.0;
    struct Candidate {
        double modulus;
        Route route;
        bool usable;
    };
    const Candidate candidates[] = {
        {std::abs(p.x), Route::series, !on_cut},
        {std::abs(p.omx), Route::one_minus_x, !near_integer(p.c - p.a - p.b)},
        {std::abs(p.x / p.omx), Route::pfaff, !on_cut},
        {1.0 / std::abs(p.omx), Route::inverse_one_minus_x, !near_integer(p.b - p.a)},
    };
    double best = std::numeric_limits<double>::infinity();
    Route route = Route::ode;
    for (const auto &k : candidates) {
        if (k.usable && k.modulus < best) {
            best = k.modulus;
            route = k.route;
        }
    }
    // Series in a variable of modulus up to 0.9 converge in a few hundred terms;
    // beyond that, continue the ODE solution from a point where the series is fast.
    return best < 0.9 ? route : Route::ode;
}

inline Value eval(const Args &p, const EvalConfig &cfg, int tail_start)
{
    check_c(p.c);
    switch (choose_route(p)) {
        case Route::series:
            return power_series(p.a, p.b, p.c, p.x, cfg, tail_start);
        case Route::one_minus_x: {
            auto v = connection(p, cfg);
            if (tail_start == 1) {
                v.value = (v.value - 1.0) / p.x;
                v.abs_err /= std::abs(p.x);
            }
            return v;
        }
        case Route::pfaff:
        case Route::inverse_one_minus_x:
        case Route::ode: {
            const auto r = choose_route(p);
            auto v = r == Route::ode ? ode_continue(p, cfg) : pfaff(p, cfg, r == Route::inverse_one_minus_x);
            if (tail_start == 1) {
                v.value = (v.value - 1.0) / p.x;
                v.abs_err /= std::abs(p.x);
            }
            return v;
        }
    }
    throw domain_error("2F1: no evaluation route");
}

inline Args make_args(double a, double b, double c, cplx x, std::optional<cplx> one_minus_x, bool from_below)
{
    Args p{a, b, c, x, one_minus_x ? *one_minus_x : 1.0 - x, 0.0};
    const bool on_cut = p.x.imag() == 0.0 && p.omx.imag() == 0.0 && p.omx.real() <= 0.0;
    if (on_cut && p.omx.real() == 0.0) {
        if (c - a - b > 0.0) {
            return p;  // caller handles x = 1 through the Gauss summation theorem
        }
        throw divergence_error("2F1 diverges at x = 1 when c - a - b <= 0");
    }
    if (on_cut) {
        if (!from_below) {
            throw branch_error("2F1 evaluated on the branch cut [1, inf); set from_below for the limit x - i0");
        }
        p.log_omx = cplx(std::log(-p.omx.real()), std::numbers::pi);
    } else {
        p.log_omx = std::log(p.omx);
    }
    return p;
}

} // namespace detail

// Gauss hypergeometric function 2F1(a, b; c; x) for complex x with real parameters.
// `one_minus_x`, when given, is used in place of 1 - x so that points very close
// to x = 1 keep full relative accuracy. On the cut x in (1, inf) the value is the
// limit from below (x - i0) if from_below is set, otherwise branch_error.
inline Value gauss_2f1_value(double a, double b, double c, cplx x, const EvalConfig &cfg = default_config(),
                             bool from_below = false, std::optional<cplx> one_minus_x = std::nullopt)
{
    const auto p = detail::make_args(a, b, c, x, one_minus_x, from_below);
    if (p.omx == 0.0) {
        const double v = std::tgamma(c) * std::tgamma(c - a - b) * detail::inv_gamma(c - a) * detail::inv_gamma(c - b);
        return {v, 8.0 * detail::eps * std::abs(v)};
    }
    return detail::eval(p, cfg, 0);
}

inline cplx gauss_2f1(double a, double b, double c, cplx x, const EvalConfig &cfg = default_config(),
                      bool from_below = false, std::optional<cplx> one_minus_x = std::nullopt)
{
    return gauss_2f1_value(a, b, c, x, cfg, from_below, one_minus_x).value;
}

// (2F1(a, b; c; x) - 1) / x without cancellation for small |x|.
inline Value gauss_2f1_tail_value(double a, double b, double c, cplx x, const EvalConfig &cfg = default_config(),
                                  bool from_below = false, std::optional<cplx> one_minus_x = std::nullopt)
{
    if (x == 0.0) {
        return {a * b / c, 0.0};
    }
    const auto p = detail::make_args(a, b, c, x, one_minus_x, from_below);
    if (p.omx == 0.0) {
        auto v = gauss_2f1_value(a, b, c, x, cfg, from_below, one_minus_x);
        v.value = (v.value - 1.0) / x;
        return v;
    }
    return detail::eval(p, cfg, 1);
}

inline cplx gauss_2f1_tail(double a, double b, double c, cplx x, const EvalConfig &cfg = default_config(),
                           bool from_below = false, std::optional<cplx> one_minus_x = std::nullopt)
{
    return gauss_2f1_tail_value(a, b, c, x, cfg, from_below, one_minus_x).value;
}

} // namespace percmod::hyp

#endif
