#ifndef PERCMOD_ANALYTIC_HPP
#define PERCMOD_ANALYTIC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <percmod/config.hpp>
#include <percmod/errors.hpp>
#include <percmod/hypergeometric.hpp>
#include <percmod/quadrature.hpp>
#include <percmod/qseries.hpp>

namespace percmod::analytic
{

using cplx = std::complex<double>;
using namespace std::complex_literals;

inline constexpr double pi = std::numbers::pi;

struct HalfPlanePoint {
    double re = 0.0;
    double im = 1.0;

    HalfPlanePoint() = default;
    HalfPlanePoint(double re_, double im_) : re(re_), im(im_)
    {
        if (!(im > 0.0) || !std::isfinite(re) || !std::isfinite(im)) {
            throw domain_error("HalfPlanePoint: imaginary part must be positive and finite");
        }
    }
    explicit HalfPlanePoint(cplx z) : HalfPlanePoint(z.real(), z.imag())
    {
    }

    cplx value() const noexcept
    {
        return {re, im};
    }
};

struct Constants {
    // 2^{1/3} pi^2 / (3 Gamma(1/3)^3)
    double C;
    cplx chi_T2;
    cplx d_g1;
    cplx d_g2;
};

inline const Constants &constants()
{
    static const Constants k = [] {
        Constants c{};
        c.C = std::cbrt(2.0) * pi * pi / (3.0 * std::pow(std::tgamma(1.0 / 3.0), 3));
        c.chi_T2 = std::polar(1.0, 2.0 * pi / 3.0);
        c.d_g1 = 0.0;
        c.d_g2 = c.C * (std::polar(1.0, -2.0 * pi / 3.0) - 1.0);
        return c;
    }();
    return k;
}

namespace detail
{

inline void require_upper(cplx z, const char *who)
{
    if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw domain_error(std::string(who) + ": point must lie in the upper half-plane");
    }
}

// sum_{n >= 1} log(1 - q^n), q = e^{2 pi i w}
inline cplx log_euler_product(cplx w, const EvalConfig &cfg)
{
    const cplx q = std::exp(2.0i * pi * w);
    const double aq = std::abs(q);
    cplx qn = q;
    cplx sum = 0.0;
    for (int n = 1; n <= cfg.max_terms; ++n) {
        sum += std::log(1.0 - qn);
        // Remaining terms are bounded by a geometric tail of |q|^{n+1}. Summing to
        // rounding level costs a handful of terms and keeps high eta powers accurate.
        const double tail = std::abs(qn) * aq / (1.0 - aq);
        if (tail < std::min(0.05 * cfg.target_abs_tol, 1e-17)) {
            return sum;
        }
        qn *= q;
    }
    throw precision_error("dedekind_eta: q-product did not converge within max_terms",
                          std::abs(qn) / (1.0 - aq));
}

} // namespace detail

// log eta(z) on a branch continuous along the reduction; integer multiples are
// branch-independent, which is how every eta quotient below uses it.
inline cplx log_eta(cplx z, const EvalConfig &cfg = default_config())
{
    detail::require_upper(z, "dedekind_eta");
    cplx acc = 0.0;
    cplx w = z;
    if (w.imag() < cfg.min_im_for_direct_series) {
        // eta(w + n) = e^{i pi n / 12} eta(w), eta(w) = sqrt(i / w) eta(-1 / w)
        for (int step = 0; step < 200; ++step) {
            const double n = std::round(w.real());
            if (n != 0.0) {
                w -= n;
                acc += 1.0i * pi * n / 12.0;
            }
            if (std::norm(w) >= 1.0 - 1e-12) {
                break;
            }
            acc += 0.5 * std::log(1.0i / w);
            w = -1.0 / w;
        }
    }
    return acc + 2.0i * pi * w / 24.0 + detail::log_euler_product(w, cfg);
}

inline cplx dedekind_eta(cplx z, const EvalConfig &cfg = default_config())
{
    return std::exp(log_eta(z, cfg));
}

inline cplx dedekind_eta(const HalfPlanePoint &z, const EvalConfig &cfg = default_config())
{
    return dedekind_eta(z.value(), cfg);
}

// Numeric value of an eta quotient scalar * (2 pi i)^k * prod eta(s_j z)^{e_j}.
inline cplx eta_quotient_num(const qseries::EtaQuotient &eq, cplx z, const EvalConfig &cfg = default_config())
{
    cplx log_sum = 0.0;
    for (const auto &f : eq.factors()) {
        const double s = static_cast<double>(f.scale.numerator()) / static_cast<double>(f.scale.denominator());
        log_sum += static_cast<double>(f.exponent) * log_eta(s * z, cfg);
    }
    return static_cast<double>(eq.scalar()) * std::pow(cplx(0.0, 2.0 * pi), eq.pi_power()) * std::exp(log_sum);
}

inline cplx lambda_num(cplx z, const EvalConfig &cfg = default_config())
{
    static const auto q = qseries::quotients::lambda();
    return eta_quotient_num(q, z, cfg);
}

// 1 - lambda as its own quotient: accurate when lambda is close to 1.
inline cplx one_minus_lambda_num(cplx z, const EvalConfig &cfg = default_config())
{
    static const auto q = qseries::quotients::one_minus_lambda();
    return eta_quotient_num(q, z, cfg);
}

inline cplx lambdaprime_num(cplx z, const EvalConfig &cfg = default_config())
{
    static const auto q = qseries::quotients::lambda_prime();
    return eta_quotient_num(q, z, cfg);
}

inline cplx g_num(cplx z, const EvalConfig &cfg = default_config())
{
    static const auto q = qseries::quotients::g();
    return eta_quotient_num(q, z, cfg);
}

inline cplx eta4_num(cplx z, const EvalConfig &cfg = default_config())
{
    return std::exp(4.0 * log_eta(z, cfg));
}

inline cplx f3_num(cplx z, const EvalConfig &cfg = default_config())
{
    static const auto q = qseries::quotients::f3();
    return eta_quotient_num(q, z, cfg);
}

namespace detail
{

struct DoubleSeries {
    std::vector<std::pair<double, double>> terms; // (exponent, coefficient)
};

inline DoubleSeries to_double_series(const qseries::PuiseuxSeries &s)
{
    DoubleSeries out;
    for (const auto &[e, c] : s.terms()) {
        out.terms.emplace_back(e.to_double(), static_cast<double>(c));
    }
    return out;
}

inline cplx sum_double_series(const DoubleSeries &s, cplx z)
{
    cplx sum = 0.0;
    for (auto it = s.terms.rbegin(); it != s.terms.rend(); ++it) {
        sum += it->second * std::exp(2.0i * pi * it->first * z);
    }
    return sum;
}

// Truncation order for the cached q-expansions; at im z >= 0.5 the first
// omitted power is below e^{-50}.
inline const qseries::QExponent &cached_order()
{
    static const qseries::QExponent order(16);
    return order;
}

inline const DoubleSeries &phi_coefficients()
{
    static const DoubleSeries s = to_double_series(qseries::phi_qexp(cached_order()));
    return s;
}

inline const DoubleSeries &f2_coefficients()
{
    static const DoubleSeries s = to_double_series(qseries::f2_qexp(cached_order()));
    return s;
}

inline constexpr double series_min_im = 0.5;

inline void require_series_region(cplx z, const char *who)
{
    require_upper(z, who);
    if (z.imag() < series_min_im) {
        throw domain_error(std::string(who) + ": q-series evaluation needs im z >= 0.5");
    }
}

// Open region {|Re z| < 1, |z - 1/2| > 1/2, |z + 1/2| > 1/2}: lambda avoids
// [1, inf) and the principal-branch closed form of phi matches the q-series.
// The margin keeps rounding in lambda from flipping the side of the cut.
inline bool in_principal_region(cplx z, double margin = 0.0)
{
    return std::abs(z.real()) < 1.0 - margin && std::abs(z - 0.5) > 0.5 + margin &&
           std::abs(z + 0.5) > 0.5 + margin;
}

} // namespace detail

// phi = (1/3) sum (c_a / a) q^a from the exact expansion.
inline cplx phi_series(cplx z)
{
    detail::require_series_region(z, "phi_series");
    return detail::sum_double_series(detail::phi_coefficients(), z);
}

// 2^{-8/3} lambda^{2/3} 2F1(1/3, 2/3; 5/3; lambda) on the principal branch.
inline cplx phi_closed(cplx z, const EvalConfig &cfg = default_config())
{
    detail::require_upper(z, "phi_num");
    const cplx lam = lambda_num(z, cfg);
    const cplx oml = one_minus_lambda_num(z, cfg);
    if (lam.real() >= 1.0 && std::abs(lam.imag()) <= 1e-14 * std::abs(lam)) {
        throw branch_error("phi_num: lambda(z) lies on the cut [1, inf)");
    }
    const cplx hyp = hyp::gauss_2f1(1.0 / 3.0, 2.0 / 3.0, 5.0 / 3.0, lam, cfg, false, oml);
    return std::pow(2.0, -8.0 / 3.0) * std::pow(lam, 2.0 / 3.0) * hyp;
}

// phi(x + i y) = phi(x + i) + (2 pi / 3) int_y^1 f3(x + i t) dt along the vertical.
inline cplx phi_path(cplx z, const EvalConfig &cfg = default_config())
{
    detail::require_upper(z, "phi_path");
    const double x = z.real();
    const double y = z.imag();
    const cplx start = phi_series(cplx(x, 1.0));
    if (y == 1.0) {
        return start;
    }
    const auto r = quad::integrate([&](double t) { return f3_num(cplx(x, t), cfg); }, y, 1.0,
                                   0.1 * cfg.target_abs_tol, 1e-13);
    return start + (2.0 * pi / 3.0) * r.value;
}

// Series high in the half-plane, the closed form where its branch is the right
// one, and path integration elsewhere.
inline cplx phi_num(cplx z, const EvalConfig &cfg = default_config())
{
    detail::require_upper(z, "phi_num");
    if (z.imag() >= detail::series_min_im) {
        return phi_series(z);
    }
    if (detail::in_principal_region(z, 1e-6)) {
        return phi_closed(z, cfg);
    }
    return phi_path(z, cfg);
}

inline cplx f2_num(cplx z, const EvalConfig &cfg = default_config())
{
    return phi_num(z, cfg) * eta4_num(z, cfg);
}

// Truncated q-expansion of f2, for cross-checks.
inline cplx f2_series(cplx z)
{
    detail::require_series_region(z, "f2_series");
    return detail::sum_double_series(detail::f2_coefficients(), z);
}

namespace detail
{

inline cplx require_off_pole(cplx oml, const char *who)
{
    if (oml == 0.0) {
        throw divergence_error(std::string(who) + ": lambda(z) = 1 is a pole");
    }
    return oml;
}

} // namespace detail

// d/dz (lambda eta^4 / lambda') = eta^4 (1 + lambda) / (3 (1 - lambda))
inline cplx eta4_ratio_derivative_num(cplx z, const EvalConfig &cfg = default_config())
{
    const cplx lam = lambda_num(z, cfg);
    const cplx oml = detail::require_off_pole(one_minus_lambda_num(z, cfg), "eta4_ratio_derivative_num");
    return eta4_num(z, cfg) * (1.0 + lam) / (3.0 * oml);
}

// G = eta^4 (1 + lambda) / (3 lambda' (1 - lambda))
inline cplx G_num(cplx z, const EvalConfig &cfg = default_config())
{
    const cplx lam = lambda_num(z, cfg);
    const cplx oml = detail::require_off_pole(one_minus_lambda_num(z, cfg), "G_num");
    return eta4_num(z, cfg) * (1.0 + lam) / (3.0 * lambdaprime_num(z, cfg) * oml);
}

// F = lambda' eta^4 (1 + lambda) / (3 lambda (1 - lambda))
inline cplx F_num(cplx z, const EvalConfig &cfg = default_config())
{
    const cplx lam = lambda_num(z, cfg);
    const cplx oml = detail::require_off_pole(one_minus_lambda_num(z, cfg), "F_num");
    return lambdaprime_num(z, cfg) * eta4_num(z, cfg) * (1.0 + lam) / (3.0 * lam * oml);
}

} // namespace percmod::analytic

#endif
