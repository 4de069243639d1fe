#ifndef PERCMOD_CROSSING_HPP
#define PERCMOD_CROSSING_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <percmod/analytic.hpp>
#include <percmod/config.hpp>
#include <percmod/errors.hpp>
#include <percmod/hypergeometric.hpp>
#include <percmod/quadrature.hpp>
#include <percmod/qseries.hpp>

namespace percmod::crossing
{

using analytic::cplx;
using analytic::HalfPlanePoint;
using namespace std::complex_literals;

inline constexpr double pi = std::numbers::pi;
inline const double sqrt3 = std::sqrt(3.0);
inline const double four_sqrt3_pi = 4.0 * std::sqrt(3.0) * std::numbers::pi;

enum class Engine { closed_form, quadrature, ode, series };

inline std::string to_string(Engine e)
{
    switch (e) {
    case Engine::closed_form:
        return "closed_form";
    case Engine::quadrature:
        return "quadrature";
    case Engine::ode:
        return "ode";
    case Engine::series:
        return "series";
    }
    return "unknown";
}

struct CrossingValue {
    cplx value;
    double abs_err = 0.0;
    Engine engine = Engine::closed_form;
};

// Anchor points 0 <= alpha < 1 <= beta on the real axis. The closed boundary is
// admitted so that the one-sided limits alpha -> 0+, beta -> 1+ can be evaluated.
struct AnchorPair {
    double alpha;
    double beta;

    AnchorPair(double a, double b) : alpha(a), beta(b)
    {
        if (!(alpha >= 0.0 && alpha < 1.0 && beta >= 1.0 && std::isfinite(beta))) {
            throw domain_error("AnchorPair: need 0 <= alpha < 1 <= beta");
        }
    }
};

struct AspectRatio {
    double r;

    explicit AspectRatio(double r_) : r(r_)
    {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw domain_error("AspectRatio: r must be positive and finite");
        }
    }
};

// Distance the 2F1 argument must keep from 1 before the densities are declared divergent.
inline constexpr double default_divergence_margin = 1e-12;

namespace detail
{

inline constexpr double eps = std::numeric_limits<double>::epsilon();

// T(x) = (2F1(1, 4/3; 5/3; x) - 1) / x
inline hyp::Value tail_T(cplx x, cplx one_minus_x, const EvalConfig &cfg)
{
    return hyp::gauss_2f1_tail_value(1.0, 4.0 / 3.0, 5.0 / 3.0, x, cfg, false, one_minus_x);
}

inline hyp::Value full_F(cplx x, cplx one_minus_x, const EvalConfig &cfg)
{
    return hyp::gauss_2f1_value(1.0, 4.0 / 3.0, 5.0 / 3.0, x, cfg, false, one_minus_x);
}

// The densities at beta = 1 as functions of a complex cross-ratio x, in forms
// that stay accurate at both ends of (0, 1).
inline CrossingValue bbar_unit(cplx x, cplx omx, const EvalConfig &cfg)
{
    const auto F = full_F(x, omx, cfg);
    const cplx v = ((1.0 + x) * F.value + 2.0) / (four_sqrt3_pi * omx);
    const double err = std::abs((1.0 + x) / (four_sqrt3_pi * omx)) * F.abs_err + 8.0 * eps * std::abs(v);
    return {v, err, Engine::closed_form};
}

inline CrossingValue nu_unit(cplx x, cplx omx, const EvalConfig &cfg)
{
    const auto T = tail_T(x, omx, cfg);
    const cplx one_minus_x2 = omx * (1.0 + x);
    const cplx denom = four_sqrt3_pi * omx * omx;
    const cplx v = x * (2.0 + x - one_minus_x2 * T.value) / denom;
    const double err = std::abs(x * one_minus_x2 / denom) * T.abs_err + 8.0 * eps * std::abs(v);
    return {v, err, Engine::closed_form};
}

// Argument y = 1 - alpha / beta; `one_minus_y` is alpha / beta.
inline CrossingValue b_unit(cplx y, cplx one_minus_y, const EvalConfig &cfg)
{
    const auto T = tail_T(y, one_minus_y, cfg);
    const cplx v = ((2.0 - y) * T.value - 1.0) / four_sqrt3_pi;
    const double err = std::abs((2.0 - y) / four_sqrt3_pi) * T.abs_err + 8.0 * eps * std::abs(v);
    return {v, err, Engine::closed_form};
}

inline CrossingValue scaled(CrossingValue v, double factor)
{
    v.value *= factor;
    v.abs_err *= std::abs(factor);
    return v;
}

} // namespace detail

// pi_h^b(alpha, beta): regular as alpha -> beta, divergent as alpha / beta -> 0.
inline CrossingValue pi_h_b(const AnchorPair &a, const EvalConfig &cfg = default_config(),
                            double margin = default_divergence_margin)
{
    const double ratio = a.alpha / a.beta;
    if (ratio <= margin) {
        throw divergence_error("pi_h_b: 2F1(1, 4/3; 5/3; 1 - alpha/beta) diverges as alpha/beta -> 0");
    }
    return detail::scaled(detail::b_unit(1.0 - ratio, ratio, cfg), 1.0 / (a.beta * a.beta));
}

// pi_h^bbar(alpha, beta) = beta^{-2} pi_h^bbar(alpha / beta, 1)
inline CrossingValue pi_h_bbar(const AnchorPair &a, const EvalConfig &cfg = default_config(),
                               double margin = default_divergence_margin)
{
    const double ratio = a.alpha / a.beta;
    if (1.0 - ratio <= margin) {
        throw divergence_error("pi_h_bbar: diverges as alpha/beta -> 1");
    }
    return detail::scaled(detail::bbar_unit(ratio, 1.0 - ratio, cfg), 1.0 / (a.beta * a.beta));
}

inline CrossingValue nu_h(const AnchorPair &a, const EvalConfig &cfg = default_config(),
                          double margin = default_divergence_margin)
{
    const double ratio = a.alpha / a.beta;
    if (1.0 - ratio <= margin) {
        throw divergence_error("nu_h: diverges as alpha/beta -> 1");
    }
    return detail::scaled(detail::nu_unit(ratio, 1.0 - ratio, cfg), 1.0 / (a.beta * a.beta));
}

// Evaluation routes for the half-plane functions p_bbar, p_b, n.
//  prop22       : linear in phi with coefficients rational in lambda and g
//  substitution : the anchor densities at (lambda(z), 1) on the principal 2F1 branch
//  automatic    : substitution where lambda keeps the principal branch valid and the
//                 formula is well conditioned, prop22 elsewhere
enum class Route { automatic, prop22, substitution };

namespace detail
{

struct LambdaData {
    cplx lam;
    cplx oml;
};

inline LambdaData lambda_data(cplx z, const EvalConfig &cfg, const char *who)
{
    analytic::detail::require_upper(z, who);
    LambdaData d{analytic::lambda_num(z, cfg), analytic::one_minus_lambda_num(z, cfg)};
    if (d.oml == 0.0) {
        throw divergence_error(std::string(who) + ": lambda(z) = 1 is a pole");
    }
    return d;
}

// 1 / (4 sqrt3 pi g^2) (1 + lambda) / (1 - lambda), the coefficient of phi.
inline cplx phi_coefficient(cplx z, const LambdaData &d, const EvalConfig &cfg)
{
    const cplx g = analytic::g_num(z, cfg);
    return (1.0 + d.lam) / (four_sqrt3_pi * g * g * d.oml);
}

inline bool substitution_preferred(cplx z, const LambdaData &d, bool is_b)
{
    if (!analytic::detail::in_principal_region(z, 1e-6)) {
        return false;
    }
    // Near the cusp -1 (|lambda| large) the two terms of pi_h^b cancel to all digits.
    return !(is_b && std::abs(d.lam) > 2.0);
}

inline void require_principal(cplx z, const char *who)
{
    if (!analytic::detail::in_principal_region(z)) {
        throw branch_error(std::string(who)
                           + ": substitution route needs |Re z| < 1 and |z -+ 1/2| > 1/2 for the principal branch");
    }
}

} // namespace detail

inline cplx p_bbar(cplx z, Route route = Route::automatic, const EvalConfig &cfg = default_config())
{
    const auto d = detail::lambda_data(z, cfg, "p_bbar");
    if (route == Route::substitution || (route == Route::automatic && detail::substitution_preferred(z, d, false))) {
        detail::require_principal(z, "p_bbar");
        return detail::bbar_unit(d.lam, d.oml, cfg).value;
    }
    return detail::phi_coefficient(z, d, cfg) * analytic::phi_num(z, cfg) + 1.0 / (2.0 * sqrt3 * pi * d.oml);
}

inline cplx p_b(cplx z, Route route = Route::automatic, const EvalConfig &cfg = default_config())
{
    const auto d = detail::lambda_data(z, cfg, "p_b");
    if (route == Route::substitution || (route == Route::automatic && detail::substitution_preferred(z, d, true))) {
        detail::require_principal(z, "p_b");
        return detail::b_unit(d.oml, d.lam, cfg).value;
    }
    const double C = analytic::constants().C;
    return detail::phi_coefficient(z, d, cfg) * (C - analytic::phi_num(z, cfg)) - 1.0 / (2.0 * sqrt3 * pi * d.oml);
}

inline cplx n_func(cplx z, Route route = Route::automatic, const EvalConfig &cfg = default_config())
{
    const auto d = detail::lambda_data(z, cfg, "n_func");
    if (route == Route::substitution || (route == Route::automatic && detail::substitution_preferred(z, d, false))) {
        detail::require_principal(z, "n_func");
        return detail::nu_unit(d.lam, d.oml, cfg).value;
    }
    return -detail::phi_coefficient(z, d, cfg) * analytic::phi_num(z, cfg)
           + (1.0 + 2.0 * d.lam) / (four_sqrt3_pi * d.oml * d.oml);
}

namespace detail
{

// Beyond this height the integrands are replaced by their termwise-integrated q-expansions.
inline constexpr double t_max = 12.0;

// int_T^inf sum c_e e^{-2 pi e t} dt
inline double series_tail(const analytic::detail::DoubleSeries &s, double T)
{
    double sum = 0.0;
    for (auto it = s.terms.rbegin(); it != s.terms.rend(); ++it) {
        const double e = it->first;
        sum += it->second * std::exp(-2.0 * pi * e * T) / (2.0 * pi * e);
    }
    return sum;
}

inline const analytic::detail::DoubleSeries &eta4_tail_series()
{
    static const auto s = analytic::detail::to_double_series(qseries::eta4_qexp(qseries::QExponent(6)));
    return s;
}

inline const analytic::detail::DoubleSeries &f2_tail_series()
{
    static const auto s = analytic::detail::to_double_series(qseries::f2_qexp(qseries::QExponent(6)));
    return s;
}

template <class F>
CrossingValue imaginary_axis_integral(F &&integrand, const analytic::detail::DoubleSeries &tail, double r,
                                      const EvalConfig &cfg)
{
    // Omitted tail terms start at q^6 with q = e^{-2 pi t_max}: far below rounding.
    if (r >= t_max) {
        const double v = series_tail(tail, r);
        return {v, 4.0 * eps * std::abs(v), Engine::series};
    }
    const auto q = quad::integrate(integrand, r, t_max, 0.1 * cfg.target_abs_tol, 1e-13);
    const double v = q.value + series_tail(tail, t_max);
    return {v, q.abs_err + 4.0 * eps * std::abs(v), Engine::quadrature};
}

} // namespace detail

// Pi_h(r) = 4 sqrt3 C int_r^inf eta(it)^4 dt
inline CrossingValue pi_h(const AspectRatio &ar, const EvalConfig &cfg = default_config())
{
    const double pref = 4.0 * sqrt3 * analytic::constants().C;
    auto integrand = [&cfg](double t) { return analytic::eta4_num(cplx(0.0, t), cfg).real(); };
    return detail::scaled(detail::imaginary_axis_integral(integrand, detail::eta4_tail_series(), ar.r, cfg), pref);
}

// Pi_hbarv(r) = 8 sqrt3 int_r^inf f2(it) dt
inline CrossingValue pi_hbarv(const AspectRatio &ar, const EvalConfig &cfg = default_config())
{
    auto integrand = [&cfg](double t) { return analytic::f2_num(cplx(0.0, t), cfg).real(); };
    return detail::scaled(detail::imaginary_axis_integral(integrand, detail::f2_tail_series(), ar.r, cfg),
                          8.0 * sqrt3);
}

// log(1 / (1 - lambda(ir))), accurate for lambda near 0 and near 1.
inline double log_inv_one_minus_lambda(double r, const EvalConfig &cfg = default_config())
{
    const cplx z(0.0, r);
    const double lam = analytic::lambda_num(z, cfg).real();
    if (lam < 0.5) {
        return -std::log1p(-lam);
    }
    return -std::log(analytic::one_minus_lambda_num(z, cfg).real());
}

// N_h = Pi_h - Pi_hbarv / 2 + (sqrt3 / 4 pi) log(1 / (1 - lambda))
inline CrossingValue n_h(const AspectRatio &ar, const EvalConfig &cfg = default_config())
{
    const auto ph = pi_h(ar, cfg);
    const auto pv = pi_hbarv(ar, cfg);
    const double log_term = sqrt3 / (4.0 * pi) * log_inv_one_minus_lambda(ar.r, cfg);
    const cplx v = ph.value - 0.5 * pv.value + log_term;
    return {v, ph.abs_err + 0.5 * pv.abs_err + 4.0 * detail::eps * std::abs(log_term),
            ph.engine == Engine::series && pv.engine == Engine::series ? Engine::series : Engine::quadrature};
}

// r with lambda(ir) = target, by bisection in log r on [1e-3, 1e3]; lambda(ir)
// decreases strictly from 1 to 0 along the imaginary axis.
inline double r_of_lambda(double target, const EvalConfig &cfg = default_config())
{
    if (!(target > 0.0 && target < 1.0)) {
        throw domain_error("r_of_lambda: target must lie in (0, 1)");
    }
    // Compare in whichever of lambda, 1 - lambda is small, to keep relative precision.
    auto above = [&](double r) {
        const cplx z(0.0, r);
        if (target < 0.5) {
            return analytic::lambda_num(z, cfg).real() > target;
        }
        return analytic::one_minus_lambda_num(z, cfg).real() < 1.0 - target;
    };
    double lo = std::log(1e-3);
    double hi = std::log(1e3);
    if (!above(std::exp(lo)) || above(std::exp(hi))) {
        throw precision_error("r_of_lambda: target outside the bracket [1e-3, 1e3]", 0.0);
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (above(std::exp(mid)) ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

struct DoubleIntegralRow {
    std::string density;  // pi_h_bbar, pi_h_b, nu_h
    double lhs;           // from Pi_h, Pi_hbarv and lambda
    double lhs_err;
    double integral;      // double quadrature of the density
    double integral_err;
    double residual;
};

struct DoubleIntegralReport {
    double lambda;
    double r;
    std::vector<DoubleIntegralRow> rows;
};

namespace detail
{

// int_0^lambda int_1^inf density dbeta dalpha with beta = s^{-3}, alpha = lambda u^3.
// Both substitutions absorb the endpoint behaviour (beta^{-2} decay, alpha^{-2/3}
// growth of pi_h^b) so the integrands are bounded on [0, 1]^2.
template <class Unit>
quad::Estimate<double> anchored_double_integral(double lambda, Unit unit, double tol)
{
    auto outer = [&](double u) {
        const double alpha = lambda * u * u * u;
        auto inner = [&](double s) {
            const double s3 = s * s * s;
            // density(alpha, s^{-3}) * 3 s^{-4} = 3 s^2 unit(alpha s^3)
            return 3.0 * s * s * unit(alpha * s3);
        };
        const auto in = quad::integrate(inner, 0.0, 1.0, 0.01 * tol, 1e-12);
        return 3.0 * lambda * u * u * in.value;
    };
    return quad::integrate(outer, 0.0, 1.0, tol, 1e-12);
}

} // namespace detail

inline DoubleIntegralReport verify_double_integrals(double lambda_target, const EvalConfig &cfg = default_config())
{
    if (!(lambda_target > 0.0 && lambda_target < 1.0)) {
        throw domain_error("verify_double_integrals: lambda must lie in (0, 1)");
    }
    DoubleIntegralReport rep{lambda_target, r_of_lambda(lambda_target, cfg), {}};
    const AspectRatio ar(rep.r);
    const auto ph = pi_h(ar, cfg);
    const auto pv = pi_hbarv(ar, cfg);
    const double log_term = sqrt3 / (4.0 * pi) * std::log(1.0 / (1.0 - lambda_target));

    const double tol = 1e-9;
    auto bbar = [&cfg](double x) { return detail::bbar_unit(x, 1.0 - x, cfg).value.real(); };
    auto b = [&cfg](double x) { return detail::b_unit(1.0 - x, x, cfg).value.real(); };
    auto nu = [&cfg](double x) { return detail::nu_unit(x, 1.0 - x, cfg).value.real(); };

    auto add = [&](const std::string &name, double lhs, double lhs_err, const quad::Estimate<double> &q) {
        rep.rows.push_back({name, lhs, lhs_err, q.value, q.abs_err, std::abs(lhs - q.value)});
    };
    add("pi_h_bbar", 0.5 * pv.value.real(), 0.5 * pv.abs_err, detail::anchored_double_integral(lambda_target, bbar, tol));
    add("pi_h_b", ph.value.real() - 0.5 * pv.value.real(), ph.abs_err + 0.5 * pv.abs_err,
        detail::anchored_double_integral(lambda_target, b, tol));
    add("nu_h", -0.5 * pv.value.real() + log_term, 0.5 * pv.abs_err,
        detail::anchored_double_integral(lambda_target, nu, tol));
    return rep;
}

struct Theorem21Report {
    cplx z;
    double step;
    // Relative residuals of the identities for p_bbar, p_b and n, in that order.
    double residual_bbar;
    double residual_b;
    double residual_n;
};

// Checks lambda' p_bbar = 4 sqrt3 i (lambda f2 / lambda')',
//        lambda' p_b    = 4 sqrt3 C i (lambda eta^4 / lambda')' - 4 sqrt3 i (lambda f2 / lambda')',
//        lambda' n      = (sqrt3 / 4 pi) (lambda / (1 - lambda))' - 4 sqrt3 i (lambda f2 / lambda')'
// with central differences in z.
inline Theorem21Report verify_theorem21(cplx z, const EvalConfig &cfg = default_config())
{
    const auto d = detail::lambda_data(z, cfg, "verify_theorem21");
    if (std::abs(d.oml) < 1e-8) {
        throw domain_error("verify_theorem21: lambda(z) too close to 1");
    }
    const double h = 1e-4 * std::min(1.0, z.imag());
    auto diff = [h](auto &&f, cplx w) { return (f(w + h) - f(w - h)) / (2.0 * h); };

    auto lf2 = [&cfg](cplx w) {
        return analytic::lambda_num(w, cfg) * analytic::f2_num(w, cfg) / analytic::lambdaprime_num(w, cfg);
    };
    auto leta = [&cfg](cplx w) {
        return analytic::lambda_num(w, cfg) * analytic::eta4_num(w, cfg) / analytic::lambdaprime_num(w, cfg);
    };
    auto lrat = [&cfg](cplx w) { return analytic::lambda_num(w, cfg) / analytic::one_minus_lambda_num(w, cfg); };

    const cplx lp = analytic::lambdaprime_num(z, cfg);
    const cplx D_f2 = 4.0 * sqrt3 * 1i * diff(lf2, z);
    const cplx D_eta = 4.0 * sqrt3 * analytic::constants().C * 1i * diff(leta, z);
    const cplx D_rat = sqrt3 / (4.0 * pi) * diff(lrat, z);

    auto rel = [](cplx lhs, cplx rhs) { return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300); };
    Theorem21Report rep{z, h, 0.0, 0.0, 0.0};
    rep.residual_bbar = rel(lp * p_bbar(z, Route::automatic, cfg), D_f2);
    rep.residual_b = rel(lp * p_b(z, Route::automatic, cfg), D_eta - D_f2);
    rep.residual_n = rel(lp * n_func(z, Route::automatic, cfg), D_rat - D_f2);
    return rep;
}

} // namespace percmod::crossing

#endif
