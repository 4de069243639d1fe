#ifndef PERCMOD_QSERIES_HPP
#define PERCMOD_QSERIES_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <percmod/errors.hpp>
#include <percmod/puiseux_series.hpp>

namespace percmod::qseries
{

inline bool is_eta_scale(const SmallRational &s)
{
    return s == SmallRational(1, 2) || s == SmallRational(1) || s == SmallRational(2);
}

namespace detail
{

// prod_{n >= 1} (1 - q^(scale n)) truncated at rel_order.
inline PuiseuxSeries euler_product(const SmallRational &scale, const QExponent &rel_order)
{
    auto acc = PuiseuxSeries::constant(1).truncated(rel_order);
    for (std::int64_t n = 1;; ++n) {
        const QExponent e(scale * SmallRational(n));
        if (e >= rel_order) {
            break;
        }
        PuiseuxSeries factor(PuiseuxSeries::Terms{{QExponent(0), BigRational(1)}, {e, BigRational(-1)}},
                             std::nullopt);
        acc = (acc * factor).truncated(rel_order);
    }
    return acc;
}

} // namespace detail

// eta(scale z)^power = q^(scale power / 24) prod (1 - q^(scale n))^power.
inline PuiseuxSeries eta_power_qexp(const SmallRational &scale, std::int64_t power, const QExponent &order)
{
    if (!is_eta_scale(scale)) {
        throw series_error("eta_power_qexp: scale must be 1/2, 1 or 2");
    }
    const QExponent lead(scale * SmallRational(power, 24));
    if (order <= lead) {
        throw series_error("eta_power_qexp: order " + order.str() + " does not exceed the leading exponent "
                           + lead.str());
    }
    if (power == 0) {
        return PuiseuxSeries::constant(1).truncated(order);
    }
    const auto rel = order - lead;
    const auto unit = pow(detail::euler_product(scale, rel), power, rel);
    return detail::shifted(unit, lead);
}

struct EtaFactor {
    SmallRational scale;
    std::int64_t exponent;
};

// scalar * (2 pi i)^pi_power * prod_j eta(scale_j z)^exponent_j
class EtaQuotient
{
public:
    EtaQuotient(std::vector<EtaFactor> factors, BigRational scalar = BigRational(1), int pi_power = 0)
        : factors_(std::move(factors)), scalar_(std::move(scalar)), pi_power_(pi_power)
    {
        for (const auto &f : factors_) {
            if (!is_eta_scale(f.scale)) {
                throw series_error("EtaQuotient: scale must be 1/2, 1 or 2");
            }
        }
        if (scalar_ == 0) {
            throw series_error("EtaQuotient: zero scalar");
        }
    }

    const std::vector<EtaFactor> &factors() const noexcept
    {
        return factors_;
    }
    const BigRational &scalar() const noexcept
    {
        return scalar_;
    }
    int pi_power() const noexcept
    {
        return pi_power_;
    }

    QExponent leading_exponent() const
    {
        SmallRational sum(0);
        for (const auto &f : factors_) {
            sum += f.scale * SmallRational(f.exponent, 24);
        }
        return QExponent(sum);
    }

    PuiseuxSeries qexp(const QExponent &order) const
    {
        const auto lead = leading_exponent();
        if (order <= lead) {
            throw series_error("EtaQuotient::qexp: order does not exceed the leading exponent " + lead.str());
        }
        const auto rel = order - lead;
        auto unit = PuiseuxSeries::constant(1).truncated(rel);
        for (const auto &f : factors_) {
            if (f.exponent == 0) {
                continue;
            }
            unit = unit * pow(detail::euler_product(f.scale, rel), f.exponent, rel);
        }
        auto out = detail::shifted(unit, lead, scalar_);
        return out.with_pi_power(pi_power_);
    }

private:
    std::vector<EtaFactor> factors_;
    BigRational scalar_;
    int pi_power_;
};

namespace quotients
{

inline const SmallRational half(1, 2);

inline EtaQuotient lambda()
{
    return EtaQuotient({{half, 8}, {SmallRational(2), 16}, {SmallRational(1), -24}}, 16);
}
inline EtaQuotient one_minus_lambda()
{
    return EtaQuotient({{half, 16}, {SmallRational(2), 8}, {SmallRational(1), -24}});
}
// 16 pi i = 8 (2 pi i)
inline EtaQuotient lambda_prime()
{
    return EtaQuotient({{half, 16}, {SmallRational(2), 16}, {SmallRational(1), -28}}, 8, 1);
}
inline EtaQuotient g()
{
    return EtaQuotient({{half, 8}, {SmallRational(2), 8}, {SmallRational(1), -16}});
}
inline EtaQuotient eta4()
{
    return EtaQuotient({{SmallRational(1), 4}});
}
inline EtaQuotient f3()
{
    return EtaQuotient({{half, 8}, {SmallRational(2), 8}, {SmallRational(1), -12}});
}

} // namespace quotients

inline PuiseuxSeries lambda_qexp(const QExponent &order)
{
    return quotients::lambda().qexp(order);
}
// The second eta-quotient form of lambda, 1 - eta(z/2)^16 eta(2z)^8 / eta(z)^24.
inline PuiseuxSeries lambda_qexp_complement_form(const QExponent &order)
{
    return PuiseuxSeries::constant(1) - quotients::one_minus_lambda().qexp(order);
}
inline PuiseuxSeries lambdaprime_qexp(const QExponent &order)
{
    return quotients::lambda_prime().qexp(order);
}
inline PuiseuxSeries g_qexp(const QExponent &order)
{
    return quotients::g().qexp(order);
}
inline PuiseuxSeries eta4_qexp(const QExponent &order)
{
    return quotients::eta4().qexp(order);
}
inline PuiseuxSeries f3_qexp(const QExponent &order)
{
    return quotients::f3().qexp(order);
}

// phi = f2 / eta^4 by termwise integration of f3 = sum c_a q^a:
// phi = (1/3) sum (c_a / a) q^a. The 2 pi i of the prefactor cancels against
// the 1 / (2 pi i a) of the integral, so phi carries no pi power.
inline PuiseuxSeries phi_qexp(const QExponent &order)
{
    if (order <= QExponent(1, 3)) {
        throw series_error("phi_qexp: order must exceed 1/3");
    }
    const auto f3 = f3_qexp(order);
    PuiseuxSeries::Terms terms;
    for (const auto &[a, c] : f3.terms()) {
        terms.emplace(a, c / (3 * a.to_big()));
    }
    return PuiseuxSeries(std::move(terms), f3.truncation());
}

// f2 = eta^4 phi as a q-series.
inline PuiseuxSeries f2_qexp(const QExponent &order)
{
    const auto lead_eta = QExponent(1, 6);
    return eta4_qexp(order) * phi_qexp(order - lead_eta);
}

// sum_n (a)_n (b)_n / ((c)_n n!) inner^n, the Gauss series composed with inner.
inline PuiseuxSeries hypergeom_compose(const BigRational &a, const BigRational &b, const BigRational &c,
                                       const PuiseuxSeries &inner, const QExponent &order)
{
    if (c <= 0 && boost::multiprecision::denominator(c) == 1) {
        throw series_error("hypergeom_compose: c is a nonpositive integer");
    }
    if (inner.pi_power() != 0 || inner.two_power().numerator() != 0) {
        if (!inner.empty()) {
            throw series_error("hypergeom_compose: inner series must be a plain rational series");
        }
    }
    const auto trunc = min_order(order, inner.truncation());
    if (inner.empty()) {
        return PuiseuxSeries::constant(1).truncated(*trunc);
    }
    if (*inner.valuation() <= QExponent(0)) {
        throw series_error("hypergeom_compose: inner series must have positive leading exponent");
    }
    auto acc = PuiseuxSeries::constant(1).truncated(*trunc);
    auto power = PuiseuxSeries::constant(1);
    BigRational coeff = 1;
    for (std::int64_t n = 0;; ++n) {
        coeff *= (a + n) * (b + n) / ((c + n) * BigRational(n + 1));
        power = (power * inner).truncated(*trunc);
        if (power.empty() || coeff == 0) {
            break;
        }
        acc = acc + coeff * power;
    }
    return acc;
}

// Result of comparing two series for exact equality over their common range.
struct IdentityResult {
    std::string identity;
    bool pass = false;
    QExponent checked_below;                     // exponents < this were compared
    std::optional<QExponent> first_difference;   // lowest exponent where they differ
    std::string detail;
};

inline IdentityResult compare_series(const std::string &name, const PuiseuxSeries &lhs, const PuiseuxSeries &rhs,
                                     const QExponent &required_below)
{
    IdentityResult out;
    out.identity = name;
    const auto common = min_order(lhs.truncation(), rhs.truncation());
    out.checked_below = common ? *common : required_below;
    if (common && *common < required_below) {
        throw series_error(name + ": truncation order " + common->str() + " too small, need " + required_below.str());
    }
    const auto l = lhs.truncated(required_below);
    const auto r = rhs.truncated(required_below);
    out.checked_below = required_below;
    if (!l.empty() && !r.empty() && (l.pi_power() != r.pi_power() || l.two_power() != r.two_power())) {
        out.detail = "bookkeeping mismatch: pi_power " + std::to_string(l.pi_power()) + " vs "
                     + std::to_string(r.pi_power()) + ", two_power " + to_string(l.two_power()) + " vs "
                     + to_string(r.two_power());
        out.first_difference = std::min(*l.valuation(), *r.valuation());
        return out;
    }
    const auto diff = l - r;
    if (diff.empty()) {
        out.pass = true;
        return out;
    }
    out.first_difference = *diff.valuation();
    out.detail = "coefficients of q^" + out.first_difference->str() + " differ: "
                 + l.coefficient(*out.first_difference).str() + " vs " + r.coefficient(*out.first_difference).str();
    return out;
}

// Named identities, each checked through q^through inclusive.
inline const std::vector<std::string> &identity_names()
{
    static const std::vector<std::string> names{"lambda_double", "lambda_prime", "g_cubed",
                                                "eta4_lambda",   "f3_lambda",    "phi_hypergeom"};
    return names;
}

struct IdentitySides {
    PuiseuxSeries lhs;
    PuiseuxSeries rhs;
};

// The smallest exponent step above `through`, so that q^through itself is compared.
inline QExponent inclusive_order(const QExponent &through)
{
    return through + QExponent(1, QExponent::denominator_cap);
}

inline IdentitySides identity_sides(const std::string &name, const QExponent &through)
{
    const auto required = inclusive_order(through);
    const auto work = required + QExponent(1);
    const auto sixteen_pi_i = PuiseuxSeries::constant(8).with_pi_power(1);
    if (name == "lambda_double") {
        return {lambda_qexp(work), lambda_qexp_complement_form(work)};
    }
    if (name == "lambda_prime") {
        return {q_derivative(lambda_qexp(work)), lambdaprime_qexp(work)};
    }
    if (name == "g_cubed") {
        const auto lam = lambda_qexp(work);
        return {pow(g_qexp(work), 3), BigRational(1, 16) * lam * (PuiseuxSeries::constant(1) - lam)};
    }
    if (name == "eta4_lambda") {
        return {eta4_qexp(work) * sixteen_pi_i * pow(g_qexp(work), 2), lambdaprime_qexp(work)};
    }
    if (name == "f3_lambda") {
        return {f3_qexp(work) * sixteen_pi_i * g_qexp(work), lambdaprime_qexp(work)};
    }
    if (name == "phi_hypergeom") {
        const auto lam = lambda_qexp(work);
        const auto two_m83 = PuiseuxSeries::constant(1).with_two_power(SmallRational(-8, 3));
        const auto rhs = two_m83 * series_fractional_power(lam, SmallRational(2, 3))
                         * hypergeom_compose(BigRational(1, 3), BigRational(2, 3), BigRational(5, 3), lam, work);
        return {phi_qexp(work), rhs};
    }
    throw series_error("unknown identity '" + name + "'");
}

inline IdentityResult check_identity(const std::string &name, const QExponent &through)
{
    if (through < QExponent(1, 2)) {
        throw series_error(name + ": truncation order " + through.str() + " too small to include a leading term");
    }
    const auto sides = identity_sides(name, through);
    return compare_series(name, sides.lhs, sides.rhs, inclusive_order(through));
}

} // namespace percmod::qseries

#endif
