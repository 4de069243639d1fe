#ifndef PERCMOD_MODULAR_HPP
#define PERCMOD_MODULAR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <percmod/analytic.hpp>
#include <percmod/crossing.hpp>
#include <percmod/errors.hpp>

namespace percmod::modular
{

using analytic::cplx;
using analytic::HalfPlanePoint;
using namespace std::complex_literals;

inline constexpr double pi = std::numbers::pi;

class GroupElement
{
public:
    GroupElement(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) : a_(a), b_(b), c_(c), d_(d)
    {
        if (a * d - b * c != 1) {
            throw domain_error("GroupElement: determinant must be 1");
        }
    }

    std::int64_t a() const noexcept
    {
        return a_;
    }
    std::int64_t b() const noexcept
    {
        return b_;
    }
    std::int64_t c() const noexcept
    {
        return c_;
    }
    std::int64_t d() const noexcept
    {
        return d_;
    }

    // a = d = 1 and b = c = 0 mod 2
    bool gamma2_member() const noexcept
    {
        auto odd = [](std::int64_t v) { return (v % 2 + 2) % 2 == 1; };
        return odd(a_) && odd(d_) && !odd(b_) && !odd(c_);
    }

    GroupElement inverse() const
    {
        return {d_, -b_, -c_, a_};
    }

    std::int64_t max_entry() const noexcept
    {
        return std::max({std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
    }

    // j(gamma, z) = cz + d
    cplx j(cplx z) const noexcept
    {
        return static_cast<double>(c_) * z + static_cast<double>(d_);
    }

    std::string str() const
    {
        return "[[" + std::to_string(a_) + "," + std::to_string(b_) + "],[" + std::to_string(c_) + ","
               + std::to_string(d_) + "]]";
    }

    friend GroupElement operator*(const GroupElement &x, const GroupElement &y)
    {
        return {x.a_ * y.a_ + x.b_ * y.c_, x.a_ * y.b_ + x.b_ * y.d_, x.c_ * y.a_ + x.d_ * y.c_,
                x.c_ * y.b_ + x.d_ * y.d_};
    }
    friend bool operator==(const GroupElement &, const GroupElement &) = default;

private:
    std::int64_t a_, b_, c_, d_;
};

namespace elements
{
inline GroupElement identity()
{
    return {1, 0, 0, 1};
}
inline GroupElement S()
{
    return {0, -1, 1, 0};
}
inline GroupElement T()
{
    return {1, 1, 0, 1};
}
// g1 = T^2
inline GroupElement g1()
{
    return {1, 2, 0, 1};
}
// g2 = S T^{-2} S^{-1}
inline GroupElement g2()
{
    return {1, 0, 2, 1};
}
// U = ST, the scaling matrix of the cusp 0; U^2 is that of -1.
inline GroupElement U()
{
    return {0, -1, 1, 1};
}
inline GroupElement U2()
{
    return {-1, -1, 1, 0};
}
} // namespace elements

// Taken by value so that std::apply, found through ADL on std::complex, never wins overload resolution.
inline cplx apply(GroupElement g, cplx z)
{
    const cplx w = (static_cast<double>(g.a()) * z + static_cast<double>(g.b())) / g.j(z);
    // Cancellation in the numerator can leave a non-positive imaginary part for
    // extreme inputs; im(gz) = im(z) / |cz + d|^2 exactly.
    return {w.real(), z.imag() / std::norm(g.j(z))};
}

inline HalfPlanePoint apply(GroupElement g, const HalfPlanePoint &z)
{
    return HalfPlanePoint(apply(g, z.value()));
}

using Function = std::function<cplx(cplx)>;

// chi(gamma) = eta^4(gamma z) (cz + d)^{-2} / eta^4(z), measured at two points.
inline cplx chi_of(const GroupElement &g, const EvalConfig &cfg = default_config())
{
    auto sample = [&](cplx z) {
        const cplx jz = g.j(z);
        return analytic::eta4_num(apply(g, z), cfg) / (jz * jz * analytic::eta4_num(z, cfg));
    };
    const cplx c1 = sample(cplx(0.11, 1.05));
    const cplx c2 = sample(cplx(-0.27, 0.83));
    if (std::abs(c1 - c2) > 1e-10) {
        throw consistency_error("chi_of: character differs between sample points for " + g.str());
    }
    return 0.5 * (c1 + c2);
}

enum class Character { trivial, chi, chi_conjugate };

struct SlashSpec {
    int weight = 0;
    Character character = Character::trivial;

    SlashSpec() = default;
    SlashSpec(int k, Character ch) : weight(k), character(ch)
    {
        if (k % 2 != 0) {
            throw domain_error("SlashSpec: weight must be even");
        }
    }
};

inline cplx character_value(Character ch, const GroupElement &g, const EvalConfig &cfg = default_config())
{
    switch (ch) {
    case Character::trivial:
        return 1.0;
    case Character::chi:
        return chi_of(g, cfg);
    case Character::chi_conjugate:
        return std::conj(chi_of(g, cfg));
    }
    return 1.0;
}

// (f |_{k, chi} gamma)(z) = f(gamma z) (cz + d)^{-k} conj(chi(gamma))
inline cplx slash(const Function &f, const SlashSpec &spec, const GroupElement &g, cplx z,
                  const EvalConfig &cfg = default_config())
{
    const cplx jz = g.j(z);
    return f(apply(g, z)) * std::pow(jz, -spec.weight) * std::conj(character_value(spec.character, g, cfg));
}

// f |_{k, chi} (gamma - 1) as a function
inline Function slash_difference(Function f, SlashSpec spec, GroupElement g, const EvalConfig &cfg = default_config())
{
    const cplx factor = std::conj(character_value(spec.character, g, cfg));
    return [f = std::move(f), spec, g, factor](cplx z) {
        return f(apply(g, z)) * std::pow(g.j(z), -spec.weight) * factor - f(z);
    };
}

struct DReport {
    GroupElement gamma;
    cplx value;
    double spread;  // max distance of a sample from the mean
    std::vector<cplx> points;
    std::vector<cplx> samples;
    bool pass;
};

namespace detail
{

// Points on the isometric circle |cz + d| = 1 (or a vertical segment when c = 0):
// gamma z keeps the imaginary part of z there, so neither side drifts toward the real axis.
inline std::vector<cplx> d_sample_points(const GroupElement &g, int count)
{
    std::vector<cplx> pts;
    for (int i = 0; i < count; ++i) {
        const double t = (i + 0.5) / count;
        if (g.c() == 0) {
            pts.emplace_back(-0.6 + 1.2 * t, 0.8 + 0.6 * t);
        } else {
            const double theta = (g.c() > 0 ? 1.0 : -1.0) * pi * (0.2 + 0.6 * t);
            pts.push_back((std::polar(1.0, theta) - static_cast<double>(g.d())) / static_cast<double>(g.c()));
        }
    }
    return pts;
}

} // namespace detail

// d_gamma = (f2 |_2 (gamma - 1))(z) / eta^4(z), sampled at several points to witness its constancy.
inline DReport d_report(const GroupElement &g, int count = 6, double spread_tol = 1e-8,
                        const EvalConfig &cfg = default_config())
{
    if (!g.gamma2_member()) {
        throw domain_error("d_of: element is not in Gamma(2): " + g.str());
    }
    DReport rep{g, 0.0, 0.0, detail::d_sample_points(g, std::max(count, 3)), {}, false};
    for (const auto &z : rep.points) {
        const cplx jz = g.j(z);
        const cplx diff = analytic::f2_num(apply(g, z), cfg) / (jz * jz) - analytic::f2_num(z, cfg);
        rep.samples.push_back(diff / analytic::eta4_num(z, cfg));
    }
    for (const auto &s : rep.samples) {
        rep.value += s;
    }
    rep.value /= static_cast<double>(rep.samples.size());
    for (const auto &s : rep.samples) {
        rep.spread = std::max(rep.spread, std::abs(s - rep.value));
    }
    rep.pass = rep.spread < spread_tol;
    return rep;
}

inline cplx d_of(const GroupElement &g, const EvalConfig &cfg = default_config())
{
    return d_report(g, 6, 1e-8, cfg).value;
}

struct CocycleResult {
    GroupElement gamma;
    GroupElement gamma_prime;
    cplx lhs;  // d(gamma gamma')
    cplx rhs;  // d(gamma) chi(gamma') + d(gamma')
    double residual;
};

inline CocycleResult cocycle_check(const GroupElement &g, const GroupElement &h, const EvalConfig &cfg = default_config())
{
    const cplx lhs = d_of(g * h, cfg);
    const cplx rhs = d_of(g, cfg) * chi_of(h, cfg) + d_of(h, cfg);
    return {g, h, lhs, rhs, std::abs(lhs - rhs)};
}

// Random product of g1^{+-1}, g2^{+-1} of length 1..max_len with entries at most max_entry.
inline GroupElement random_word(std::mt19937_64 &rng, int max_len = 6, std::int64_t max_entry = 20)
{
    const std::array<GroupElement, 4> gens = {elements::g1(), elements::g1().inverse(), elements::g2(),
                                              elements::g2().inverse()};
    std::uniform_int_distribution<int> len_dist(1, max_len);
    std::uniform_int_distribution<int> gen_dist(0, 3);
    for (;;) {
        GroupElement w = elements::identity();
        const int len = len_dist(rng);
        for (int i = 0; i < len; ++i) {
            w = w * gens[static_cast<std::size_t>(gen_dist(rng))];
        }
        if (w.max_entry() <= max_entry && !(w == elements::identity())) {
            return w;
        }
    }
}

inline const std::vector<cplx> &canonical_samples()
{
    static const std::vector<cplx> pts = {cplx(0.13, 0.9), cplx(-0.4, 1.7), cplx(0.55, 0.62)};
    return pts;
}

struct SecondOrderReport {
    std::vector<cplx> samples;
    std::vector<double> residuals;
    double max_residual;
    bool pass;
};

// Residuals of f |_{k, chi1} (g1 - 1) |_{k, chi2} (g2 - 1) at each sample.
inline SecondOrderReport second_order_check(const Function &f, const SlashSpec &first, const SlashSpec &second,
                                            const GroupElement &ga, const GroupElement &gb,
                                            const std::vector<cplx> &samples, double tol = 1e-7,
                                            const EvalConfig &cfg = default_config())
{
    const auto h = slash_difference(f, first, ga, cfg);
    const auto hh = slash_difference(h, second, gb, cfg);
    SecondOrderReport rep{samples, {}, 0.0, false};
    for (const auto &z : samples) {
        rep.residuals.push_back(std::abs(hh(z)));
        rep.max_residual = std::max(rep.max_residual, rep.residuals.back());
    }
    rep.pass = rep.max_residual < tol;
    return rep;
}

enum class Cusp { infinity, zero, minus_one };

inline std::string to_string(Cusp c)
{
    switch (c) {
    case Cusp::infinity:
        return "infinity";
    case Cusp::zero:
        return "0";
    case Cusp::minus_one:
        return "-1";
    }
    return "?";
}

inline GroupElement scaling_matrix(Cusp c)
{
    switch (c) {
    case Cusp::infinity:
        return elements::identity();
    case Cusp::zero:
        return elements::U();
    case Cusp::minus_one:
        return elements::U2();
    }
    return elements::identity();
}

struct ExponentFit {
    double exponent;
    double fit_rms;  // rms residual of the straight-line fit, in log units
    bool warning;    // residual large enough to suggest sub-leading contamination
};

// Least-squares slope of log|(f |_k sigma)(x + iy)| against -2 pi y over y in [y_lo, y_hi].
inline ExponentFit cusp_leading_exponent(const Function &f, Cusp cusp, int weight, double x = -0.5, double y_lo = 4.0,
                                         double y_hi = 9.0, int samples = 11)
{
    const auto sigma = scaling_matrix(cusp);
    std::vector<double> xs;
    std::vector<double> ys;
    for (int i = 0; i < samples; ++i) {
        const double y = y_lo + (y_hi - y_lo) * i / (samples - 1);
        const cplx z(x, y);
        const cplx v = f(apply(sigma, z)) * std::pow(sigma.j(z), -weight);
        xs.push_back(-2.0 * pi * y);
        ys.push_back(std::log(std::abs(v)));
    }
    const double n = static_cast<double>(samples);
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < samples; ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < samples; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = ys[i] - (my + slope * (xs[i] - mx));
        rss += r * r;
    }
    const double rms = std::sqrt(rss / n);
    return {slope, rms, rms > 1e-3 || !std::isfinite(slope)};
}

struct Table1Row {
    std::string name;
    int weight;
    Function f;
    std::array<double, 3> expected;  // cusps infinity, 0, -1
};

inline std::vector<Table1Row> table1_rows(const EvalConfig &cfg = default_config())
{
    using namespace analytic;
    using crossing::Route;
    auto lam = [cfg](cplx z) { return lambda_num(z, cfg); };
    auto lp = [cfg](cplx z) { return lambdaprime_num(z, cfg); };
    return {
        {"lambda", 0, lam, {0.5, 0.0, -0.5}},
        {"lambda/lambda'", -2, [cfg](cplx z) { return lambda_num(z, cfg) / lambdaprime_num(z, cfg); }, {0.0, -0.5, 0.0}},
        {"lambda'", 2, lp, {0.5, 0.5, -0.5}},
        {"1/lambda'", -2, [cfg](cplx z) { return 1.0 / lambdaprime_num(z, cfg); }, {-0.5, -0.5, 0.5}},
        {"p_bbar", 0, [cfg](cplx z) { return crossing::p_bbar(z, Route::automatic, cfg); }, {0.0, -5.0 / 6, 2.0 / 3}},
        {"p_b", 0, [cfg](cplx z) { return crossing::p_b(z, Route::automatic, cfg); }, {-1.0 / 3, 0.0, 2.0 / 3}},
        {"n", 0, [cfg](cplx z) { return crossing::n_func(z, Route::automatic, cfg); }, {0.5, -1.0, 2.0 / 3}},
        {"(lambda eta^4/lambda')'", 2, [cfg](cplx z) { return eta4_ratio_derivative_num(z, cfg); },
         {1.0 / 6, -1.0 / 3, 1.0 / 6}},
        {"G", 0, [cfg](cplx z) { return G_num(z, cfg); }, {-1.0 / 3, -5.0 / 6, 2.0 / 3}},
    };
}

struct Table1Cell {
    std::string function;
    Cusp cusp;
    double estimated;
    double expected;
    double gap;
    double fit_rms;
    bool warning;
    bool pass;
};

inline std::vector<Table1Cell> table1(double tol = 0.02, const EvalConfig &cfg = default_config())
{
    std::vector<Table1Cell> out;
    for (const auto &row : table1_rows(cfg)) {
        const std::array<Cusp, 3> cusps = {Cusp::infinity, Cusp::zero, Cusp::minus_one};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto fit = cusp_leading_exponent(row.f, cusps[k], row.weight);
            const double gap = std::abs(fit.exponent - row.expected[k]);
            out.push_back({row.name, cusps[k], fit.exponent, row.expected[k], gap, fit.fit_rms, fit.warning,
                           std::isfinite(gap) && gap <= tol});
        }
    }
    return out;
}

struct SubCheck {
    std::string name;
    cplx value;
    cplx expected;
    double residual;
    double tolerance;
    bool pass;
};

namespace detail
{

inline SubCheck make_check(std::string name, cplx value, cplx expected, double residual, double tol)
{
    return {std::move(name), value, expected, residual, tol, residual < tol};
}

// Largest relative residual of lhs(z) = rhs(z) over the canonical sample points.
template <class L, class R>
SubCheck transform_check(std::string name, L &&lhs, R &&rhs, double tol)
{
    double worst = 0.0;
    cplx worst_l = 0.0, worst_r = 0.0;
    for (const auto &z : canonical_samples()) {
        const cplx l = lhs(z);
        const cplx r = rhs(z);
        const double res = std::abs(l - r) / std::max(std::abs(r), 1e-300);
        if (res >= worst) {
            worst = res;
            worst_l = l;
            worst_r = r;
        }
    }
    return make_check(std::move(name), worst_l, worst_r, worst, tol);
}

} // namespace detail

// Numerical witnesses of the uniqueness theorems for F and the conformal blocks P.
inline std::vector<SubCheck> theorem4_checks(const EvalConfig &cfg = default_config())
{
    using namespace analytic;
    using crossing::Route;
    const double C = constants().C;
    const auto g1 = elements::g1();
    const auto g2 = elements::g2();
    const cplx chi_g2 = chi_of(g2, cfg);

    auto F = [cfg](cplx z) { return F_num(z, cfg); };
    auto weight_factor = [](const GroupElement &g, cplx z) { return std::pow(g.j(z), -4); };
    auto lp2_over_l = [cfg](cplx z) {
        const cplx lp = lambdaprime_num(z, cfg);
        return lp * lp / lambda_num(z, cfg);
    };
    auto P = [=](cplx z) { return lp2_over_l(z) * crossing::p_bbar(z, Route::automatic, cfg); };
    auto Pn = [=](cplx z) { return lp2_over_l(z) * crossing::n_func(z, Route::automatic, cfg); };
    auto slash4 = [&](auto &&f, const GroupElement &g) {
        return [f, g, weight_factor](cplx z) { return f(apply(g, z)) * weight_factor(g, z); };
    };

    std::vector<SubCheck> out;
    out.push_back(detail::transform_check(
        "i_F_weight4_g2", slash4(F, g2), [&](cplx z) { return chi_g2 * F(z); }, 1e-8));

    const cplx z_inf(0.0, 10.0);
    const cplx lead = std::exp(-1i * pi * z_inf / 3.0) * F(z_inf);
    out.push_back(detail::make_check("ii_F_leading_coefficient", lead, 1i * pi / 3.0, std::abs(lead - 1i * pi / 3.0),
                                     1e-8));

    const double r3 = 20.0;
    const cplx lim3 = std::exp(pi * r3 / 3.0) * std::pow(r3, -4.0) * F(cplx(0.0, 1.0 / r3));
    const cplx want3 = -4.0 / 3.0 * std::cbrt(2.0) * pi * pi;
    out.push_back(
        detail::make_check("iii_F_limit_r20", lim3, want3, std::abs(lim3 - want3) / std::abs(want3), 1e-3));

    out.push_back(detail::transform_check("iv_P_weight4_g1", slash4(P, g1), P, 1e-8));
    auto Ptilde = [=](cplx z) { return P(z) - C * F(z); };
    out.push_back(detail::transform_check("iv_P_minus_CF_weight4_g2", slash4(Ptilde, g2), Ptilde, 1e-8));
    // Since p_bbar |_0 (g2 - 1) = 4 sqrt(3) i d_{g2} G, the shift that actually cancels is 4 sqrt(3) i C.
    const cplx A = 4.0 * std::sqrt(3.0) * 1i * C;
    auto Pshift = [=](cplx z) { return P(z) - A * F(z); };
    out.push_back(detail::transform_check("iv_P_minus_4rt3iCF_weight4_g2", slash4(Pshift, g2), Pshift, 1e-8));

    out.push_back(detail::transform_check(
        "v_P1_equals_lp2_over_l_p_b", [=](cplx z) { return 4.0 * std::sqrt(3.0) * C * 1i * F(z) - P(z); },
        [=](cplx z) { return lp2_over_l(z) * crossing::p_b(z, Route::automatic, cfg); }, 1e-8));

    auto Pn_tilde = [=](cplx z) { return Pn(z) + A * F(z); };
    out.push_back(detail::transform_check("vi_Pn_plus_4rt3iCF_weight4_g2", slash4(Pn_tilde, g2), Pn_tilde, 1e-8));
    const double r6 = 30.0;
    const cplx lim6 = Pn(cplx(0.0, 1.0 / r6)) * std::pow(r6, -4.0);
    const cplx want6 = -std::sqrt(3.0) * pi / 4.0;
    out.push_back(detail::make_check("vi_Pn_limit_r30", lim6, want6, std::abs(lim6 - want6), 1e-3));

    std::sort(out.begin(), out.end(), [](const SubCheck &a, const SubCheck &b) { return a.name < b.name; });
    return out;
}

} // namespace percmod::modular

#endif
