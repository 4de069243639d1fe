#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <percmod/analytic.hpp>

namespace an = percmod::analytic;
using an::cplx;
using namespace std::complex_literals;

namespace
{

constexpr double pi = std::numbers::pi;

void expect_close(cplx got, cplx want, double rel, const char *what)
{
    EXPECT_LT(std::abs(got - want), rel * std::max(1.0, std::abs(want))) << what << ": got " << got << " want " << want;
}

struct PointOracle {
    cplx z;
    cplx eta, lambda, lambda_prime, phi, f2;
};

// tests/oracles/analytic_oracles.py (mpmath, 40 digits). The first four points lie in
// the region where the principal-branch closed form applies, the rest need the path route.
const PointOracle point_oracles[] = {
    {{0.3, 0.8},
     {0.81060156190005632606, 0.058739554171762986983},
     {0.76600287504535665238, 0.40978632527963564569},
     {0.16080240269556205036, 1.8991804032606710849},
     {0.14504864333383889466, 0.067586406793280474745},
     {0.052239363665219930609, 0.046318470093388156303}},
    {{0.0, 0.1},
     {0.23068518545412889657, 0.0},
     {0.99999999999963662383, 0.0},
     {0.0, 1.141579909088691726e-10},
     {0.21559246246718010038, 0.0},
     {0.00061053756958592115306, 0.0}},
    {{0.2, 1.1},
     {0.74855684268814888527, 0.038518376474806324995},
     {0.36445659880581276049, 0.19484283706858053201},
     {-0.34679242845786428559, 0.99737867868382193655},
     {0.08614678078971347236, 0.032638378901161807879},
     {0.024514989356820720152, 0.015637516064091752751}},
    {{-0.9, 0.45},
     {0.81409325788000369834, -0.23027926759527879357},
     {-3.9690462867938650702, -48.225477862595557454},
     {673.88516369218218936, 242.13338656883163501},
     {0.072438134586905154136, -0.96089388703026859186},
     {-0.42258733043318522181, -0.25525856739620907277}},
    {{-0.7, 0.45},
     {0.88365300311856397659, -0.21278255654202588104},
     {8.3353789579934685449, 0.63093634766191729121},
     {-80.098647082079964831, 26.014546505783820461},
     {0.43528665603888418522, -0.34693207163222350832},
     {-0.017971395418914719186, -0.37945905666685805653}},
    {{-0.4, 0.3},
     {1.0323684826944560857, -0.045925840200654091444},
     {0.83815014028089439357, 0.30657434516324048124},
     {1.5309255498482277562, -3.8354625486268460631},
     {0.29162246295314492876, 0.021754406578528338895},
     {0.33170950697690560471, -0.034410266710246554168}},
    {{0.05, 0.2},
     {0.6314472340012505044, -0.11850224916019608583},
     {1.000005164828695427, -3.1979379619827195595e-6},
     {-0.000028918400915707071599, -0.0004481115131307643321},
     {0.21563331275961710218, 0.000032871419638804046837},
     {0.027083880471551524845, -0.024823904246715823698}},
    {{0.369, 0.186},
     {1.1688976390107475874, -0.015060498235142677931},
     {0.61290202984484789502, 0.15896062903752742986},
     {-5.6602286501734702798, -2.2704482725513220555},
     {0.23729517878222609234, -0.090818383589573080661},
     {0.43381335298286255729, -0.1922008958537271145}},
};

std::vector<cplx> random_points(unsigned seed, int count, double im_lo, double im_hi)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-1.0, 1.0);
    std::uniform_real_distribution<double> im(im_lo, im_hi);
    std::vector<cplx> out;
    for (int i = 0; i < count; ++i) {
        out.emplace_back(re(rng), im(rng));
    }
    return out;
}

} // namespace

TEST(Constants, CMatchesHighPrecisionValue)
{
    // mpmath: 2^(1/3) pi^2 / (3 Gamma(1/3)^3) at 30 digits.
    EXPECT_NEAR(an::constants().C, 0.215592463269149, 1e-14);
    expect_close(an::constants().chi_T2, std::exp(2i * pi / 3.0), 1e-15, "chi(T^2)");
    EXPECT_EQ(an::constants().d_g1, cplx(0.0));
    expect_close(an::constants().d_g2, cplx(-0.323388694903723817, -0.186708550055546703), 1e-12, "d(g2)");
}

TEST(HalfPlanePoint, RejectsLowerHalfPlane)
{
    EXPECT_THROW(an::HalfPlanePoint(0.0, 0.0), percmod::domain_error);
    EXPECT_THROW(an::HalfPlanePoint(0.3, -1.0), percmod::domain_error);
    EXPECT_NO_THROW(an::HalfPlanePoint(0.3, 1e-3));
    EXPECT_THROW(an::dedekind_eta(cplx(0.2, -0.1)), percmod::domain_error);
}

TEST(DedekindEta, ClassicalValues)
{
    const double eta_i = boost::math::tgamma(0.25) / (2.0 * std::pow(pi, 0.75));
    expect_close(an::dedekind_eta(an::HalfPlanePoint(0.0, 1.0)), eta_i, 1e-14, "eta(i)");
    expect_close(an::dedekind_eta(cplx(0.0, 2.0)), eta_i / std::pow(2.0, 0.375), 1e-14, "eta(2i)");
    EXPECT_NEAR(eta_i / std::pow(2.0, 0.375), 0.5923827813, 1e-10);
}

TEST(DedekindEta, ShiftMultiplier)
{
    const cplx z(0.3, 0.8);
    expect_close(an::dedekind_eta(z + 1.0) / an::dedekind_eta(z), std::exp(1i * pi / 12.0), 1e-14, "eta(z+1)/eta(z)");
}

TEST(DedekindEta, MatchesOracleIncludingReducedPoints)
{
    for (const auto &o : point_oracles) {
        expect_close(an::dedekind_eta(o.z), o.eta, 1e-13, "eta");
    }
}

TEST(DedekindEta, InversionNearRealAxis)
{
    // eta(i / r) = sqrt(r) eta(i r)
    for (double r : {5.0, 13.0, 30.0, 200.0}) {
        const cplx lhs = an::dedekind_eta(cplx(0.0, 1.0 / r));
        const cplx rhs = std::sqrt(r) * an::dedekind_eta(cplx(0.0, r));
        EXPECT_LT(std::abs(lhs / rhs - 1.0), 1e-13) << r;
    }
}

TEST(DedekindEta, ReportsPrecisionFailure)
{
    percmod::EvalConfig cfg;
    cfg.max_terms = 2;
    cfg.min_im_for_direct_series = 0.01;
    EXPECT_THROW(an::dedekind_eta(cplx(0.1, 0.2), cfg), percmod::precision_error);
}

TEST(Lambda, SpecialValues)
{
    expect_close(an::lambda_num(1i), 0.5, 1e-14, "lambda(i)");
    expect_close(an::lambda_num(2i), 17.0 - 12.0 * std::sqrt(2.0), 1e-14, "lambda(2i)");
    expect_close(an::one_minus_lambda_num(1i), 0.5, 1e-14, "1 - lambda(i)");
}

TEST(Lambda, MatchesOracle)
{
    for (const auto &o : point_oracles) {
        expect_close(an::lambda_num(o.z), o.lambda, 1e-12, "lambda");
        expect_close(an::one_minus_lambda_num(o.z), 1.0 - o.lambda, 1e-12, "1 - lambda");
        expect_close(an::lambdaprime_num(o.z), o.lambda_prime, 1e-12, "lambda'");
    }
}

TEST(Lambda, ComplementAccurateNearCuspZero)
{
    // 1 - lambda(i/r) = lambda(i r) ~ 16 e^{-pi r} keeps full relative accuracy.
    for (double r : {10.0, 20.0, 30.0}) {
        const cplx small = an::one_minus_lambda_num(cplx(0.0, 1.0 / r));
        const cplx direct = an::lambda_num(cplx(0.0, r));
        EXPECT_LT(std::abs(small / direct - 1.0), 1e-12) << r;
    }
}

TEST(Lambda, GroupLaws)
{
    for (const auto &z : random_points(7, 25, 0.5, 2.0)) {
        const cplx l = an::lambda_num(z);
        expect_close(an::lambda_num(z + 2.0), l, 1e-10, "period 2");
        expect_close(an::lambda_num(-1.0 / z), 1.0 - l, 1e-10, "lambda(-1/z)");
        expect_close(an::lambda_num(z + 1.0), l / (l - 1.0), 1e-10, "lambda(z+1)");
        const cplx g2z = z / (2.0 * z + 1.0);
        expect_close(an::lambda_num(g2z), l, 1e-10, "lambda(g2 z)");
        const cplx j = 2.0 * z + 1.0;
        expect_close(an::lambdaprime_num(g2z) / (j * j), an::lambdaprime_num(z), 1e-10, "lambda'(g2 z)");
    }
}

TEST(Lambda, DerivativeMatchesFiniteDifference)
{
    const double h = 1e-5;
    for (const auto &z : random_points(11, 15, 0.5, 2.0)) {
        const cplx fd = (an::lambda_num(z + h) - an::lambda_num(z - h)) / (2.0 * h);
        const cplx lp = an::lambdaprime_num(z);
        EXPECT_LT(std::abs(fd - lp), 1e-6 * std::abs(lp)) << z;
    }
}

TEST(Lambda, PrimeFromGAndEta)
{
    // lambda' = 16 pi i g^2 eta^4
    const cplx z(0.1, 0.9);
    const cplx g = an::g_num(z);
    expect_close(16.0i * pi * g * g * an::eta4_num(z), an::lambdaprime_num(z), 1e-10, "16 pi i g^2 eta^4");
    // g^3 = lambda (1 - lambda) / 16
    const cplx l = an::lambda_num(z);
    expect_close(g * g * g, l * (1.0 - l) / 16.0, 1e-12, "g^3");
    // f3 = g eta^4
    expect_close(an::f3_num(z), g * an::eta4_num(z), 1e-13, "f3");
}

TEST(Phi, ValueAtI)
{
    const double C = an::constants().C;
    EXPECT_LT(std::abs(an::phi_num(1i) - C / 2.0), 1e-12);
    EXPECT_LT(std::abs(an::phi_closed(1i) - C / 2.0), 1e-12);
    EXPECT_NEAR(C / 2.0, 0.1077962316, 1e-10);
}

TEST(Phi, MatchesOracleOnEveryRoute)
{
    for (const auto &o : point_oracles) {
        expect_close(an::phi_num(o.z), o.phi, 1e-11, "phi_num");
        expect_close(an::phi_path(o.z), o.phi, 1e-11, "phi_path");
        if (an::detail::in_principal_region(o.z)) {
            expect_close(an::phi_closed(o.z), o.phi, 1e-11, "phi_closed");
        }
        expect_close(an::f2_num(o.z), o.f2, 1e-11, "f2");
    }
}

TEST(Phi, ClosedFormTakesTheWrongBranchOutsideRegion)
{
    // At -0.7 + 0.45i lambda has Re > 1; the principal branch there is not phi.
    const cplx z(-0.7, 0.45);
    EXPECT_FALSE(an::detail::in_principal_region(z));
    EXPECT_GT(std::abs(an::phi_closed(z) - an::phi_num(z)), 1e-2);
}

TEST(Phi, LeadingTermHighInHalfPlane)
{
    const cplx z(0.0, 10.0);
    const cplx q13 = std::exp(2i * pi * z / 3.0);
    const cplx ratio = an::phi_num(z) / q13;
    EXPECT_NEAR(ratio.real(), 1.0, 1e-8);
    EXPECT_NEAR(ratio.imag(), 0.0, 1e-12);
}

TEST(Phi, ShiftByTwoPicksUpPhase)
{
    // Exponents of phi are 1/3 + k/2, so phi(z + 2) = e^{4 pi i / 3} phi(z).
    const cplx z(0.0, 1.0);
    expect_close(an::phi_num(z + 2.0), std::exp(4i * pi / 3.0) * an::phi_num(z), 1e-12, "phi(z+2)");
}

TEST(Phi, BranchErrorWhenLambdaOnCut)
{
    // lambda(1 + i y) = lambda(i y) / (lambda(i y) - 1) is real and negative; lambda(-1/(1+iy)) is real > 1.
    const cplx z = -1.0 / cplx(1.0, 1.0);
    const cplx l = an::lambda_num(z);
    ASSERT_GT(l.real(), 1.0);
    if (l.imag() == 0.0) {
        EXPECT_THROW(an::phi_closed(z), percmod::branch_error);
    }
    EXPECT_NO_THROW(an::phi_num(z));
}

TEST(EngineAgreement, SeriesAndClosedFormsAboveImOne)
{
    const auto order = percmod::qseries::QExponent(12);
    const auto lam_s = percmod::qseries::lambda_qexp(order);
    const auto eta4_s = percmod::qseries::eta4_qexp(order);
    for (const auto &z : random_points(2024, 20, 1.0, 2.5)) {
        expect_close(percmod::qseries::evaluate(lam_s, z), an::lambda_num(z), 1e-11, "lambda");
        expect_close(percmod::qseries::evaluate(eta4_s, z), an::eta4_num(z), 1e-11, "eta4");
        expect_close(an::phi_series(z), an::phi_closed(z), 1e-11, "phi");
        expect_close(an::f2_series(z), an::phi_closed(z) * an::eta4_num(z), 1e-11, "f2");
    }
}

TEST(F2, ValueAtIAndDecay)
{
    const double eta_i = boost::math::tgamma(0.25) / (2.0 * std::pow(pi, 0.75));
    expect_close(an::f2_num(1i), an::constants().C / 2.0 * std::pow(eta_i, 4), 1e-12, "f2(i)");
    EXPECT_LT(std::abs(an::f2_num(cplx(0.0, 8.0))), 1e-10);
    const cplx z(0.2, 1.1);
    expect_close(an::f2_num(z), an::f2_series(z), 1e-11, "f2 routes");
}

TEST(DerivedForms, ClosedFormsMatchFiniteDifferences)
{
    const double h = 1e-5;
    auto ratio = [](cplx z) { return an::lambda_num(z) * an::eta4_num(z) / an::lambdaprime_num(z); };
    for (cplx z : {cplx(0.3, 0.7), cplx(-0.2, 1.4), cplx(0.0, 1.0)}) {
        const cplx fd = (ratio(z + h) - ratio(z - h)) / (2.0 * h);
        const cplx closed = an::eta4_ratio_derivative_num(z);
        EXPECT_LT(std::abs(fd - closed), 1e-7 * std::abs(closed)) << z;
        expect_close(an::G_num(z), closed / an::lambdaprime_num(z), 1e-12, "G");
        expect_close(an::F_num(z), an::lambdaprime_num(z) / an::lambda_num(z) * closed, 1e-12, "F");
    }
}

TEST(DerivedForms, FOverGIsLambdaPrimeSquaredOverLambda)
{
    const cplx z(0.3, 0.7);
    const cplx lp = an::lambdaprime_num(z);
    expect_close(an::F_num(z) / an::G_num(z), lp * lp / an::lambda_num(z), 1e-9, "F/G");
}

TEST(DerivedForms, FLeadingCoefficient)
{
    const cplx z(0.0, 10.0);
    expect_close(std::exp(-1i * pi * z / 3.0) * an::F_num(z), 1i * pi / 3.0, 1e-8, "b0");
}
