#include <gtest/gtest.h>

#include <percmod/qseries.hpp>
#include <percmod/series_json.hpp>

using namespace percmod::qseries;
using percmod::series_error;

namespace
{

PuiseuxSeries poly(std::initializer_list<std::tuple<std::int64_t, std::int64_t, std::int64_t>> terms,
                   std::optional<QExponent> trunc = std::nullopt)
{
    PuiseuxSeries::Terms t;
    for (const auto &[n, d, c] : terms) {
        t.emplace(QExponent(n, d), BigRational(c));
    }
    return PuiseuxSeries(std::move(t), trunc);
}

} // namespace

TEST(QExponent, RejectsDenominatorOutsideCap)
{
    EXPECT_NO_THROW(QExponent(5, 48));
    EXPECT_NO_THROW(QExponent(7, 16));
    EXPECT_THROW(QExponent(1, 5), series_error);
    EXPECT_THROW(QExponent(1, 96), series_error);
    EXPECT_EQ(QExponent(2, 4), QExponent(1, 2));
}

TEST(PuiseuxSeries, DropsZeroCoefficientsAndTermsBeyondTruncation)
{
    auto s = poly({{0, 1, 1}, {1, 2, 0}, {1, 1, 3}, {2, 1, 5}}, QExponent(2));
    EXPECT_EQ(s.terms().size(), 2u);
    EXPECT_EQ(s.coefficient(QExponent(1)), 3);
    EXPECT_THROW(s.coefficient(QExponent(2)), series_error);
}

TEST(SeriesArith, BasicExamples)
{
    const auto one_minus_q = poly({{0, 1, 1}, {1, 1, -1}});
    const auto q = poly({{1, 1, 1}});
    EXPECT_EQ(series_arith(one_minus_q, q, SeriesOp::add), PuiseuxSeries::constant(1));

    const auto h = poly({{1, 2, 1}});
    EXPECT_EQ(series_arith(h, h, SeriesOp::mul), q);

    const auto lam = lambda_qexp(QExponent(6));
    const auto ratio = series_arith(lam, lam, SeriesOp::div);
    EXPECT_EQ(ratio.truncated(QExponent(5)), PuiseuxSeries::constant(1).truncated(QExponent(5)));
    EXPECT_EQ(*ratio.truncation(), QExponent(11, 2));
}

TEST(SeriesArith, Errors)
{
    const auto a = PuiseuxSeries::constant(1).with_pi_power(1);
    const auto b = PuiseuxSeries::constant(1);
    EXPECT_THROW(series_arith(a, b, SeriesOp::add), series_error);
    EXPECT_THROW(series_arith(b, PuiseuxSeries::zero(QExponent(3)), SeriesOp::div), series_error);
}

TEST(SeriesArith, TruncationTracking)
{
    // (q^{1/2} + O(q^3)) * (1 + q + O(q^2)) is known only below q^{5/2}.
    const auto a = poly({{1, 2, 1}}, QExponent(3));
    const auto b = poly({{0, 1, 1}, {1, 1, 1}}, QExponent(2));
    const auto p = a * b;
    EXPECT_EQ(*p.truncation(), QExponent(5, 2));
    EXPECT_EQ(p.coefficient(QExponent(3, 2)), 1);
}

TEST(EtaPowerQexp, Examples)
{
    // (1-q)^4 (1-q^2)^4 = 1 - 4q + 2q^2 + 8q^3 - ...
    const auto e4 = eta_power_qexp(SmallRational(1), 4, QExponent(13, 6) + QExponent(1, 48));
    EXPECT_EQ(e4, poly({{1, 6, 1}, {7, 6, -4}, {13, 6, 2}}, QExponent(13, 6) + QExponent(1, 48)));

    const auto e0 = eta_power_qexp(SmallRational(1), 0, QExponent(5));
    EXPECT_EQ(e0, PuiseuxSeries::constant(1).truncated(QExponent(5)));

    const auto e2 = eta_power_qexp(SmallRational(2), 8, QExponent(3));
    EXPECT_EQ(*e2.valuation(), QExponent(2, 3));
    EXPECT_EQ(e2.coefficient(QExponent(2, 3)), 1);
    EXPECT_EQ(e2.coefficient(QExponent(8, 3)), -8);

    EXPECT_THROW(eta_power_qexp(SmallRational(1), 4, QExponent(1, 6)), series_error);
    EXPECT_THROW(eta_power_qexp(SmallRational(3), 4, QExponent(2)), series_error);
}

TEST(EtaPowerQexp, MatchesIndependentPartitionRecurrence)
{
    // 1/prod(1-q^n) generates the partition numbers p(n); eta^{-1} = q^{-1/24} sum p(n) q^n.
    const auto inv = eta_power_qexp(SmallRational(1), -1, QExponent(30));
    const std::int64_t partitions[] = {1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385,
                                       490, 627, 792, 1002, 1255, 1575, 1958, 2436, 3010, 3718, 4565};
    for (int n = 0; n < 30; ++n) {
        EXPECT_EQ(inv.coefficient(QExponent(-1, 24) + QExponent(n)), partitions[n]) << n;
    }
}

TEST(FractionalPower, Examples)
{
    const auto h = poly({{1, 2, 1}});
    EXPECT_EQ(series_fractional_power(h, SmallRational(2, 3)), poly({{1, 3, 1}}));

    const auto lam = lambda_qexp(QExponent(4));
    const auto p = series_fractional_power(lam, SmallRational(2, 3));
    // 16^{2/3} = 2^{8/3} = 4 * 2^{2/3}
    EXPECT_EQ(p.two_power(), SmallRational(2, 3));
    EXPECT_EQ(p.leading_coefficient(), 4);
    EXPECT_EQ(*p.valuation(), QExponent(1, 3));
    const auto cubed = pow(p, 3);
    EXPECT_EQ(cubed.two_power(), SmallRational(0));
    EXPECT_EQ(cubed, pow(lam, 2).truncated(*cubed.truncation()));

    const auto oml = PuiseuxSeries::constant(1) - lam;
    EXPECT_EQ(series_fractional_power(oml, SmallRational(1)), oml);

    EXPECT_THROW(series_fractional_power(poly({{0, 1, 3}, {1, 1, 1}}, QExponent(3)), SmallRational(1, 2)),
                 series_error);
    EXPECT_THROW(series_fractional_power(poly({{1, 1, 1}}).with_pi_power(1), SmallRational(1, 2)), series_error);
}

TEST(QDerivative, Examples)
{
    const auto d = q_derivative(poly({{1, 2, 16}}));
    EXPECT_EQ(d, poly({{1, 2, 8}}).with_pi_power(1));
    EXPECT_TRUE(q_derivative(PuiseuxSeries::constant(1)).empty());
    const auto dl = q_derivative(lambda_qexp(QExponent(3)));
    EXPECT_EQ(dl.pi_power(), 1);
    EXPECT_EQ(*dl.valuation(), QExponent(1, 2));
    EXPECT_EQ(dl.leading_coefficient(), 8);
}

TEST(NamedSeries, LeadingTerms)
{
    const auto lam = lambda_qexp(QExponent(2));
    EXPECT_EQ(lam, poly({{1, 2, 16}, {1, 1, -128}, {3, 2, 704}}, QExponent(2)));
    const auto f3 = f3_qexp(QExponent(3));
    EXPECT_EQ(*f3.valuation(), QExponent(1, 3));
    EXPECT_EQ(f3.leading_coefficient(), 1);
    // Known expansion of f3 in powers of q^{1/2}, starting at q^{1/3}.
    const std::int64_t c[] = {1, -8, 32, -96, 252};
    for (int k = 0; k < 5; ++k) {
        EXPECT_EQ(f3.coefficient(QExponent(1, 3) + QExponent(k, 2)), c[k]);
    }
    EXPECT_EQ(eta4_qexp(QExponent(2)), poly({{1, 6, 1}, {7, 6, -4}}, QExponent(2)));
}

TEST(PhiQexp, LeadingTermAndTruncation)
{
    const auto phi = phi_qexp(QExponent(1, 3) + QExponent(1, 48));
    EXPECT_EQ(phi, poly({{1, 3, 1}}, QExponent(1, 3) + QExponent(1, 48)));
    EXPECT_THROW(phi_qexp(QExponent(1, 3)), series_error);
    const auto longer = phi_qexp(QExponent(3));
    EXPECT_EQ(longer.coefficient(QExponent(5, 6)), BigRational(-16, 5));
}

TEST(HypergeomCompose, ZeroInnerGivesOne)
{
    const auto r = hypergeom_compose(1, 2, 3, PuiseuxSeries::zero(QExponent(5)), QExponent(4));
    EXPECT_EQ(r, PuiseuxSeries::constant(1).truncated(QExponent(4)));
}

TEST(HypergeomCompose, TelescopingPattern)
{
    // (1)_n (4/3)_n / ((7/3)_n n!) = (4/3)/(n + 4/3) since (a)_n/(a+1)_n = a/(a+n).
    const auto x = poly({{1, 2, 1}});
    const auto r = hypergeom_compose(1, BigRational(4, 3), BigRational(7, 3), x, QExponent(8));
    for (int n = 0; n < 16; ++n) {
        EXPECT_EQ(r.coefficient(QExponent(n, 2)), BigRational(4, 3) / (BigRational(n) + BigRational(4, 3))) << n;
    }
}

TEST(HypergeomCompose, FiveThirdsCoefficients)
{
    // Direct Pochhammer ratios for (1, 4/3; 5/3): 1, 4/5, 4*7/(5*8), ...
    const auto x = poly({{1, 1, 1}});
    const auto r = hypergeom_compose(1, BigRational(4, 3), BigRational(5, 3), x, QExponent(4));
    EXPECT_EQ(r.coefficient(QExponent(1)), BigRational(4, 5));
    EXPECT_EQ(r.coefficient(QExponent(2)), BigRational(4 * 7, 5 * 8));
    EXPECT_EQ(r.coefficient(QExponent(3)), BigRational(4 * 7 * 10, 5 * 8 * 11));
}

TEST(HypergeomCompose, Errors)
{
    EXPECT_THROW(hypergeom_compose(1, 1, 1, PuiseuxSeries::constant(1).truncated(QExponent(3)), QExponent(2)),
                 series_error);
    EXPECT_THROW(hypergeom_compose(1, 1, -2, poly({{1, 1, 1}}), QExponent(2)), series_error);
}

class IdentityTest : public ::testing::TestWithParam<std::string>
{
};

TEST_P(IdentityTest, HoldsThroughQ10)
{
    const auto through = GetParam() == "phi_hypergeom" ? QExponent(10, 3) : QExponent(10);
    const auto r = check_identity(GetParam(), through);
    EXPECT_TRUE(r.pass) << r.detail;
}

INSTANTIATE_TEST_SUITE_P(AllIdentities, IdentityTest, ::testing::ValuesIn(identity_names()));

TEST(Identities, DetectsABrokenIdentity)
{
    const auto lam = lambda_qexp(QExponent(4));
    auto broken = lam + poly({{5, 2, 1}});
    const auto r = compare_series("tampered", lam, broken, QExponent(3));
    EXPECT_FALSE(r.pass);
    ASSERT_TRUE(r.first_difference);
    EXPECT_EQ(*r.first_difference, QExponent(5, 2));
}

TEST(Identities, OrderTooSmall)
{
    EXPECT_THROW(check_identity("g_cubed", QExponent(1, 4)), series_error);
    EXPECT_THROW(check_identity("nonsense", QExponent(3)), series_error);
}

TEST(Identities, Deterministic)
{
    EXPECT_EQ(phi_qexp(QExponent(6)), phi_qexp(QExponent(6)));
}

TEST(SeriesJson, RoundTrip)
{
    const auto lam = lambda_qexp(QExponent(5));
    const auto p = series_fractional_power(lam, SmallRational(2, 3)).with_pi_power(2);
    const auto j = to_json(p);
    EXPECT_EQ(j.at("pi_power"), 2);
    EXPECT_EQ(from_json(j), p);
    EXPECT_EQ(from_json(to_json(lam)), lam);
}

TEST(Evaluate, SumsTermsWithBookkeeping)
{
    const auto s = poly({{0, 1, 3}}).with_pi_power(1);
    const auto v = evaluate(s, {0.0, 1.0});
    EXPECT_NEAR(v.real(), 0.0, 1e-15);
    EXPECT_NEAR(v.imag(), 3 * 2 * std::numbers::pi, 1e-12);
}
