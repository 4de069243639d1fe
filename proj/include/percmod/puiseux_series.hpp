#ifndef PERCMOD_PUISEUX_SERIES_HPP
#define PERCMOD_PUISEUX_SERIES_HPP

#include <algorithm>
#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <percmod/errors.hpp>

namespace percmod::qseries
{

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using SmallRational = boost::rational<std::int64_t>;

inline std::string to_string(const SmallRational &r)
{
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Exponent of q = exp(2 pi i z). Every exponent that occurs in this library has a
// denominator dividing 48; anything else is a composition bug and is rejected.
class QExponent
{
public:
    static constexpr std::int64_t denominator_cap = 48;

    QExponent() = default;
    QExponent(std::int64_t n) : value_(n) {}
    QExponent(std::int64_t n, std::int64_t d) : value_(make(n, d))
    {
        check();
    }
    explicit QExponent(const SmallRational &r) : value_(r)
    {
        check();
    }

    std::int64_t num() const noexcept
    {
        return value_.numerator();
    }
    std::int64_t den() const noexcept
    {
        return value_.denominator();
    }
    const SmallRational &value() const noexcept
    {
        return value_;
    }
    double to_double() const noexcept
    {
        return static_cast<double>(num()) / static_cast<double>(den());
    }
    BigRational to_big() const
    {
        return BigRational(num(), den());
    }
    std::string str() const
    {
        return den() == 1 ? std::to_string(num()) : to_string(value_);
    }

    friend bool operator==(const QExponent &a, const QExponent &b) noexcept
    {
        return a.value_ == b.value_;
    }
    friend std::strong_ordering operator<=>(const QExponent &a, const QExponent &b) noexcept
    {
        if (a.value_ < b.value_) {
            return std::strong_ordering::less;
        }
        if (a.value_ == b.value_) {
            return std::strong_ordering::equal;
        }
        return std::strong_ordering::greater;
    }

    friend QExponent operator+(const QExponent &a, const QExponent &b)
    {
        return QExponent(a.value_ + b.value_);
    }
    friend QExponent operator-(const QExponent &a, const QExponent &b)
    {
        return QExponent(a.value_ - b.value_);
    }
    friend QExponent operator-(const QExponent &a)
    {
        return QExponent(-a.value_);
    }
    friend QExponent operator*(const QExponent &a, const SmallRational &p)
    {
        return QExponent(a.value_ * p);
    }

private:
    static SmallRational make(std::int64_t n, std::int64_t d)
    {
        if (d == 0) {
            throw series_error("QExponent: zero denominator");
        }
        return SmallRational(n, d);
    }
    void check() const
    {
        if (denominator_cap % value_.denominator() != 0) {
            throw series_error("QExponent: denominator of " + to_string(value_) + " does not divide 48");
        }
    }

    SmallRational value_{0};
};

inline std::optional<QExponent> min_order(const std::optional<QExponent> &a, const std::optional<QExponent> &b)
{
    if (!a) {
        return b;
    }
    if (!b) {
        return a;
    }
    return std::min(*a, *b);
}

// Truncated formal series in q with rational exponents and exact rational
// coefficients. The represented function is
//
//     2^two_power * (2 pi i)^pi_power * sum_e c_e q^e + O(q^truncation).
//
// A missing truncation means the sum is exact (a polynomial). two_power is
// normalised into [0, 1); its integer part is folded into the coefficients.
class PuiseuxSeries
{
public:
    using Terms = std::map<QExponent, BigRational>;

    PuiseuxSeries() = default;
    PuiseuxSeries(Terms terms, std::optional<QExponent> truncation, int pi_power = 0,
                  SmallRational two_power = SmallRational(0))
        : terms_(std::move(terms)), truncation_(truncation), pi_power_(pi_power), two_power_(two_power)
    {
        normalize();
    }

    static PuiseuxSeries constant(const BigRational &c)
    {
        return monomial(c, QExponent(0));
    }
    static PuiseuxSeries monomial(const BigRational &c, const QExponent &e)
    {
        return PuiseuxSeries(Terms{{e, c}}, std::nullopt);
    }
    static PuiseuxSeries zero(std::optional<QExponent> truncation = std::nullopt)
    {
        return PuiseuxSeries(Terms{}, truncation);
    }

    const Terms &terms() const noexcept
    {
        return terms_;
    }
    const std::optional<QExponent> &truncation() const noexcept
    {
        return truncation_;
    }
    bool exact() const noexcept
    {
        return !truncation_.has_value();
    }
    int pi_power() const noexcept
    {
        return pi_power_;
    }
    const SmallRational &two_power() const noexcept
    {
        return two_power_;
    }
    bool empty() const noexcept
    {
        return terms_.empty();
    }
    bool is_exact_zero() const noexcept
    {
        return terms_.empty() && !truncation_;
    }

    // Lowest stored exponent.
    std::optional<QExponent> valuation() const
    {
        if (terms_.empty()) {
            return std::nullopt;
        }
        return terms_.begin()->first;
    }
    // Valuation, or the truncation order when nothing below it is known to be nonzero.
    std::optional<QExponent> effective_valuation() const
    {
        if (!terms_.empty()) {
            return terms_.begin()->first;
        }
        return truncation_;
    }
    const BigRational &leading_coefficient() const
    {
        if (terms_.empty()) {
            throw series_error("leading_coefficient of an empty series");
        }
        return terms_.begin()->second;
    }

    BigRational coefficient(const QExponent &e) const
    {
        if (truncation_ && e >= *truncation_) {
            throw series_error("coefficient of q^" + e.str() + " is beyond the truncation order " + truncation_->str());
        }
        auto it = terms_.find(e);
        return it == terms_.end() ? BigRational(0) : it->second;
    }

    PuiseuxSeries truncated(const QExponent &order) const
    {
        return PuiseuxSeries(terms_, min_order(truncation_, order), pi_power_, two_power_);
    }
    PuiseuxSeries with_pi_power(int k) const
    {
        return PuiseuxSeries(terms_, truncation_, k, two_power_);
    }
    PuiseuxSeries with_two_power(const SmallRational &t) const
    {
        return PuiseuxSeries(terms_, truncation_, pi_power_, t);
    }

    friend bool operator==(const PuiseuxSeries &, const PuiseuxSeries &) = default;

private:
    void normalize()
    {
        const auto whole = floor_of(two_power_);
        if (whole != 0) {
            two_power_ -= whole;
            BigRational factor = 1;
            const BigRational two = whole > 0 ? BigRational(2) : BigRational(1, 2);
            for (std::int64_t i = 0; i < (whole > 0 ? whole : -whole); ++i) {
                factor *= two;
            }
            for (auto &[e, c] : terms_) {
                c *= factor;
            }
        }
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->second == 0 || (truncation_ && it->first >= *truncation_)) {
                it = terms_.erase(it);
            } else {
                ++it;
            }
        }
    }
    static std::int64_t floor_of(const SmallRational &r)
    {
        auto q = r.numerator() / r.denominator();
        if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) {
            --q;
        }
        return q;
    }

    Terms terms_;
    std::optional<QExponent> truncation_;
    int pi_power_ = 0;
    SmallRational two_power_{0};
};

namespace detail
{

struct Bookkeeping {
    int pi_power;
    SmallRational two_power;
};

inline Bookkeeping additive_bookkeeping(const PuiseuxSeries &a, const PuiseuxSeries &b)
{
    if (a.empty()) {
        return {b.pi_power(), b.two_power()};
    }
    if (b.empty()) {
        return {a.pi_power(), a.two_power()};
    }
    if (a.pi_power() != b.pi_power()) {
        throw series_error("add/sub with mismatched pi_power " + std::to_string(a.pi_power()) + " vs "
                           + std::to_string(b.pi_power()));
    }
    if (a.two_power() != b.two_power()) {
        throw series_error("add/sub with mismatched two_power " + to_string(a.two_power()) + " vs "
                           + to_string(b.two_power()));
    }
    return {a.pi_power(), a.two_power()};
}

// Bare unit part w, where s = c q^e (1 + w). Exponents of w are relative to e.
inline PuiseuxSeries unit_tail(const PuiseuxSeries &s)
{
    const auto e = *s.valuation();
    const auto &c = s.leading_coefficient();
    PuiseuxSeries::Terms terms;
    for (auto it = std::next(s.terms().begin()); it != s.terms().end(); ++it) {
        terms.emplace(it->first - e, it->second / c);
    }
    std::optional<QExponent> trunc;
    if (s.truncation()) {
        trunc = *s.truncation() - e;
    }
    return PuiseuxSeries(std::move(terms), trunc);
}

inline PuiseuxSeries shifted(const PuiseuxSeries &s, const QExponent &by, const BigRational &scale = BigRational(1))
{
    PuiseuxSeries::Terms terms;
    for (const auto &[e, c] : s.terms()) {
        terms.emplace(e + by, c * scale);
    }
    std::optional<QExponent> trunc;
    if (s.truncation()) {
        trunc = *s.truncation() + by;
    }
    return PuiseuxSeries(std::move(terms), trunc, s.pi_power(), s.two_power());
}

inline std::optional<BigInt> integer_root(const BigInt &n, std::int64_t r)
{
    if (n < 0) {
        return std::nullopt;
    }
    if (n < 2) {
        return n;
    }
    BigInt lo = 1;
    BigInt hi = BigInt(1) << (static_cast<unsigned>(boost::multiprecision::msb(n)) / static_cast<unsigned>(r) + 2);
    while (lo < hi) {
        BigInt mid = (lo + hi + 1) / 2;
        if (boost::multiprecision::pow(mid, static_cast<unsigned>(r)) <= n) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    if (boost::multiprecision::pow(lo, static_cast<unsigned>(r)) == n) {
        return lo;
    }
    return std::nullopt;
}

inline BigRational rational_pow(const BigRational &c, std::int64_t n)
{
    BigRational base = n >= 0 ? c : BigRational(1) / c;
    BigRational out = 1;
    for (std::int64_t i = 0; i < (n >= 0 ? n : -n); ++i) {
        out *= base;
    }
    return out;
}

} // namespace detail

inline PuiseuxSeries operator-(const PuiseuxSeries &a)
{
    PuiseuxSeries::Terms terms;
    for (const auto &[e, c] : a.terms()) {
        terms.emplace(e, -c);
    }
    return PuiseuxSeries(std::move(terms), a.truncation(), a.pi_power(), a.two_power());
}

inline PuiseuxSeries operator+(const PuiseuxSeries &a, const PuiseuxSeries &b)
{
    const auto bk = detail::additive_bookkeeping(a, b);
    auto terms = a.terms();
    for (const auto &[e, c] : b.terms()) {
        terms[e] += c;
    }
    return PuiseuxSeries(std::move(terms), min_order(a.truncation(), b.truncation()), bk.pi_power, bk.two_power);
}

inline PuiseuxSeries operator-(const PuiseuxSeries &a, const PuiseuxSeries &b)
{
    return a + (-b);
}

inline PuiseuxSeries operator*(const BigRational &k, const PuiseuxSeries &a)
{
    PuiseuxSeries::Terms terms;
    for (const auto &[e, c] : a.terms()) {
        terms.emplace(e, c * k);
    }
    return PuiseuxSeries(std::move(terms), a.truncation(), a.pi_power(), a.two_power());
}

inline PuiseuxSeries operator*(const PuiseuxSeries &a, const PuiseuxSeries &b)
{
    const int pi = a.pi_power() + b.pi_power();
    const SmallRational two = a.two_power() + b.two_power();
    if (a.is_exact_zero() || b.is_exact_zero()) {
        return PuiseuxSeries(PuiseuxSeries::Terms{}, std::nullopt, pi, two);
    }
    // Both effective valuations are finite here.
    const auto va = *a.effective_valuation();
    const auto vb = *b.effective_valuation();
    std::optional<QExponent> trunc;
    if (a.truncation()) {
        trunc = min_order(trunc, *a.truncation() + vb);
    }
    if (b.truncation()) {
        trunc = min_order(trunc, *b.truncation() + va);
    }
    PuiseuxSeries::Terms terms;
    for (const auto &[ea, ca] : a.terms()) {
        if (trunc && ea + vb >= *trunc) {
            break;
        }
        for (const auto &[eb, cb] : b.terms()) {
            const auto e = ea + eb;
            if (trunc && e >= *trunc) {
                break;
            }
            terms[e] += ca * cb;
        }
    }
    return PuiseuxSeries(std::move(terms), trunc, pi, two);
}

namespace detail
{

// sum_n binom(p, n) w^n, truncated at rel_order. w must have strictly positive
// valuation. Without a finite order the result must be a finite sum.
inline PuiseuxSeries unit_power(const PuiseuxSeries &w, const SmallRational &p, std::optional<QExponent> rel_order)
{
    const auto trunc = min_order(rel_order, w.truncation());
    const bool finite_sum = p.denominator() == 1 && p.numerator() >= 0;
    if (w.empty()) {
        return PuiseuxSeries(PuiseuxSeries::Terms{{QExponent(0), BigRational(1)}}, trunc);
    }
    if (*w.valuation() <= QExponent(0)) {
        throw series_error("unit_power: tail must have positive valuation");
    }
    if (!trunc && !finite_sum) {
        throw series_error("power of an exact non-monomial series needs an explicit truncation order");
    }
    const BigRational pb(p.numerator(), p.denominator());
    PuiseuxSeries acc(PuiseuxSeries::Terms{{QExponent(0), BigRational(1)}}, trunc);
    PuiseuxSeries wn = PuiseuxSeries::constant(1);
    BigRational binom = 1;
    for (std::int64_t n = 1;; ++n) {
        binom *= (pb - (n - 1)) / BigRational(n);
        if (binom == 0) {
            break;
        }
        wn = wn * w;
        if (trunc) {
            wn = wn.truncated(*trunc);
        }
        if (wn.empty()) {
            break;
        }
        acc = acc + binom * wn;
    }
    return acc;
}

} // namespace detail

// Power a^p. The leading coefficient c must have an exact rational p-th power,
// except for the factor 2^(m p) which is carried symbolically in two_power.
inline PuiseuxSeries series_fractional_power(const PuiseuxSeries &a, const SmallRational &p,
                                             std::optional<QExponent> order = std::nullopt)
{
    if (a.empty()) {
        if (a.is_exact_zero() && p.numerator() > 0) {
            return a;
        }
        throw series_error("series_fractional_power: series has no known leading term");
    }
    const auto e = *a.valuation();
    const QExponent new_lead = e * p;
    const SmallRational pi_scaled = SmallRational(a.pi_power()) * p;
    if (pi_scaled.denominator() != 1) {
        throw series_error("series_fractional_power: (2 pi i)^" + to_string(pi_scaled) + " is not representable");
    }
    SmallRational two = a.two_power() * p;

    BigRational coeff;
    const auto &c = a.leading_coefficient();
    if (p.denominator() == 1) {
        coeff = detail::rational_pow(c, p.numerator());
    } else {
        if (c < 0) {
            throw series_error("series_fractional_power: negative leading coefficient with fractional power");
        }
        BigInt num = boost::multiprecision::numerator(c);
        BigInt den = boost::multiprecision::denominator(c);
        std::int64_t twos = 0;
        while (num % 2 == 0) {
            num /= 2;
            ++twos;
        }
        while (den % 2 == 0) {
            den /= 2;
            --twos;
        }
        const auto rn = detail::integer_root(num, p.denominator());
        const auto rd = detail::integer_root(den, p.denominator());
        if (!rn || !rd) {
            throw series_error("series_fractional_power: leading coefficient has no exact rational root");
        }
        coeff = detail::rational_pow(BigRational(*rn, *rd), p.numerator());
        two += SmallRational(twos) * p;
    }

    std::optional<QExponent> rel;
    if (a.truncation()) {
        rel = *a.truncation() - e;
    }
    if (order) {
        rel = min_order(rel, *order - new_lead);
    }
    const auto unit = detail::unit_power(detail::unit_tail(a), p, rel);
    auto out = detail::shifted(unit, new_lead, coeff);
    return PuiseuxSeries(out.terms(), out.truncation(), static_cast<int>(pi_scaled.numerator()), two);
}

// Quotient a / b. When both operands are exact and b is not a monomial the
// result is an infinite series and an explicit order is required.
inline PuiseuxSeries divide(const PuiseuxSeries &a, const PuiseuxSeries &b,
                            std::optional<QExponent> order = std::nullopt)
{
    if (b.empty()) {
        throw series_error("division by a series with no known leading term");
    }
    const auto eb = *b.valuation();
    if (a.is_exact_zero()) {
        return PuiseuxSeries(PuiseuxSeries::Terms{}, std::nullopt, a.pi_power() - b.pi_power(),
                             a.two_power() - b.two_power());
    }
    const auto va = *a.effective_valuation();
    std::optional<QExponent> need;
    if (a.truncation()) {
        need = *a.truncation() - va;
    }
    if (order) {
        need = min_order(need, *order - (va - eb));
    }
    if (b.truncation()) {
        need = min_order(need, *b.truncation() - eb);
    }
    const auto inv_unit = detail::unit_power(detail::unit_tail(b), SmallRational(-1), need);
    auto inv = detail::shifted(inv_unit, -eb, BigRational(1) / b.leading_coefficient());
    inv = PuiseuxSeries(inv.terms(), inv.truncation(), -b.pi_power(), -b.two_power());
    auto out = a * inv;
    if (order) {
        out = out.truncated(*order);
    }
    return out;
}

inline PuiseuxSeries operator/(const PuiseuxSeries &a, const PuiseuxSeries &b)
{
    return divide(a, b);
}

inline PuiseuxSeries pow(const PuiseuxSeries &a, std::int64_t n, std::optional<QExponent> order = std::nullopt)
{
    return series_fractional_power(a, SmallRational(n), order);
}

enum class SeriesOp { add, sub, mul, div };

inline PuiseuxSeries series_arith(const PuiseuxSeries &a, const PuiseuxSeries &b, SeriesOp op)
{
    switch (op) {
        case SeriesOp::add:
            return a + b;
        case SeriesOp::sub:
            return a - b;
        case SeriesOp::mul:
            return a * b;
        case SeriesOp::div:
            return a / b;
    }
    throw series_error("unknown series operation");
}

// d/dz = (2 pi i) q d/dq.
inline PuiseuxSeries q_derivative(const PuiseuxSeries &a)
{
    PuiseuxSeries::Terms terms;
    for (const auto &[e, c] : a.terms()) {
        terms.emplace(e, c * e.to_big());
    }
    return PuiseuxSeries(std::move(terms), a.truncation(), a.pi_power() + 1, a.two_power());
}

// Numeric value at z, summing every stored term.
inline std::complex<double> evaluate(const PuiseuxSeries &s, std::complex<double> z)
{
    using namespace std::complex_literals;
    const double two_pi = 2.0 * std::numbers::pi;
    std::complex<double> sum = 0.0;
    for (auto it = s.terms().rbegin(); it != s.terms().rend(); ++it) {
        sum += static_cast<double>(it->second) * std::exp(1i * two_pi * it->first.to_double() * z);
    }
    const auto &t = s.two_power();
    sum *= std::pow(2.0, static_cast<double>(t.numerator()) / static_cast<double>(t.denominator()));
    sum *= std::pow(std::complex<double>(0.0, two_pi), s.pi_power());
    return sum;
}

} // namespace percmod::qseries

#endif
