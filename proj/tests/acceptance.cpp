// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <percmod/cli.hpp>
#include <percmod/percmod.hpp>

namespace
{

using namespace percmod;
using cplx = std::complex<double>;
using namespace std::complex_literals;
constexpr double pi = std::numbers::pi;

// Reference values computed independently at 30 digits.
constexpr double C_ref = 0.215592463269149211;  // 2^(1/3) pi^2 / (3 Gamma(1/3)^3)
constexpr double cardy_r2 = 0.17564689380065523913;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

int failures = 0;

void criterion(int n, const char *title, const std::function<Verdict()> &body, double time_limit = 0.0)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception &e) {
        v.pass = false;
        v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit > 0.0 && secs > time_limit) {
        v.require(false, "runtime " + sci(secs) + " s exceeds " + sci(time_limit) + " s");
    }
    if (!v.pass) {
        ++failures;
    }
    std::printf("[%s] %2d %s (%.2f s)%s%s\n", v.pass ? "PASS" : "FAIL", n, title, secs, v.detail.empty() ? "" : ": ",
                v.detail.c_str());
    std::fflush(stdout);
}

std::string cli_output(std::vector<std::string> args)
{
    args.insert(args.begin(), "percmod");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::to_string(code) + "\n" + out.str();
}

Verdict exact_identities()
{
    Verdict v;
    const qseries::QExponent ten(10);
    for (const auto *id : {"lambda_double", "lambda_prime", "g_cubed", "eta4_lambda", "f3_lambda"}) {
        const auto r = qseries::check_identity(id, ten);
        v.require(r.pass, std::string(id) + " differs at " + (r.first_difference ? r.first_difference->str() : "?"));
    }
    const auto phi = qseries::check_identity("phi_hypergeom", qseries::QExponent(10, 3));
    v.require(phi.pass, "phi_hypergeom through q^(10/3)");
    return v;
}

Verdict phi_at_i()
{
    Verdict v;
    const double C = analytic::constants().C;
    const double err = std::abs(analytic::phi_num(1i) - C / 2.0);
    v.require(err < 1e-10, "|phi(i) - C/2| = " + sci(err));
    v.require(std::abs(C - C_ref) < 1e-12, "C off reference by " + sci(std::abs(C - C_ref)));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("|phi(i) - C/2| = ") + sci(err);
    return v;
}

Verdict cocycle_constants()
{
    using namespace modular;
    Verdict v;
    const auto k = analytic::constants();
    const auto d1 = d_report(elements::g1(), 6);
    v.require(std::abs(d1.value) < 1e-10, "|d(g1)| = " + sci(std::abs(d1.value)));
    const auto d2 = d_report(elements::g2(), 6);
    const cplx expected = k.C * (std::polar(1.0, -2.0 * pi / 3.0) - 1.0);
    const double rel = std::abs(d2.value - expected) / std::abs(expected);
    v.require(rel < 1e-8, "d(g2) relative error " + sci(rel));
    double spread = std::max(d1.spread, d2.spread);
    double worst = 0.0;
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < 20; ++i) {
        const auto g = random_word(rng);
        const auto h = random_word(rng);
        worst = std::max(worst, cocycle_check(g, h).residual);
        spread = std::max(spread, d_report(g * h, 6).spread);
    }
    v.require(spread < 1e-8, "constancy spread " + sci(spread));
    v.require(worst < 1e-8, "cocycle residual " + sci(worst));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("max cocycle residual ") + sci(worst) + ", spread "
                + sci(spread);
    return v;
}

Verdict second_order()
{
    using namespace modular;
    Verdict v;
    const SlashSpec first(0, Character::trivial);
    const SlashSpec second(0, Character::chi);
    const auto &samples = canonical_samples();
    const std::vector<std::pair<const char *, Function>> forms = {
        {"p_bbar", [](cplx z) { return crossing::p_bbar(z); }},
        {"p_b", [](cplx z) { return crossing::p_b(z); }},
        {"n", [](cplx z) { return crossing::n_func(z); }},
    };
    double worst = 0.0;
    for (const auto &[name, f] : forms) {
        for (const auto &ga : {elements::g1(), elements::g2()}) {
            for (const auto &gb : {elements::g1(), elements::g2()}) {
                const auto rep = second_order_check(f, first, second, ga, gb, samples);
                worst = std::max(worst, rep.max_residual);
                v.require(rep.max_residual < 1e-7, std::string(name) + " double difference " + sci(rep.max_residual));
            }
        }
    }
    double single = 0.0;
    double scaled = 0.0;
    for (const auto &g : {elements::g1(), elements::g2()}) {
        const cplx dg = d_of(g);
        for (const auto &z : samples) {
            const cplx diff = crossing::p_bbar(apply(g, z)) - crossing::p_bbar(z);
            const cplx G = analytic::G_num(z);
            single = std::max(single, std::abs(diff - dg * G));
            scaled = std::max(scaled, std::abs(diff - 4.0 * std::sqrt(3.0) * 1i * dg * G));
        }
    }
    v.require(single < 1e-7, "p_bbar|(g-1) - d_g G reaches " + sci(single) + " (with a factor 4 sqrt(3) i: "
                                 + sci(scaled) + ")");
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("max double difference ") + sci(worst);
    return v;
}

Verdict table1()
{
    Verdict v;
    double worst = 0.0;
    for (const auto &c : modular::table1(0.02)) {
        worst = std::max(worst, c.gap);
        v.require(c.pass, c.function + " at " + modular::to_string(c.cusp) + " gap " + sci(c.gap));
    }
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("27 cells, max gap ") + sci(worst);
    return v;
}

Verdict theorem21()
{
    Verdict v;
    double worst = 0.0;
    for (cplx z : {cplx(0.0, 1.0), cplx(0.3, 0.8), cplx(-1.0, 1.3)}) {
        const auto r = crossing::verify_theorem21(z);
        worst = std::max({worst, r.residual_bbar, r.residual_b, r.residual_n});
    }
    v.require(worst < 1e-6, "relative residual " + sci(worst));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("max relative residual ") + sci(worst);
    return v;
}

Verdict double_integrals()
{
    Verdict v;
    double worst = 0.0;
    for (double lam : {0.2, 0.5, 0.8}) {
        for (const auto &row : crossing::verify_double_integrals(lam).rows) {
            worst = std::max(worst, row.residual);
            v.require(row.residual < 1e-5, row.density + " at lambda " + sci(lam) + ": " + sci(row.residual));
        }
    }
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("max residual ") + sci(worst);
    return v;
}

Verdict theorem4()
{
    Verdict v;
    const auto checks = modular::theorem4_checks();
    auto find = [&](const std::string &name) -> const modular::SubCheck & {
        for (const auto &c : checks) {
            if (c.name == name) {
                return c;
            }
        }
        throw std::runtime_error("missing check " + name);
    };
    const auto &lead = find("ii_F_leading_coefficient");
    v.require(std::abs(lead.value - pi * 1i / 3.0) < 1e-8, "e^(-pi i z/3) F(z) at 10i off by " + sci(lead.residual));
    const auto &lim30 = find("iii_F_limit_r20");
    const double target30 = -(4.0 / 3.0) * std::cbrt(2.0) * pi * pi;
    const double rel30 = std::abs(lim30.value - target30) / std::abs(target30);
    std::ostringstream got;
    got << "limit at r = 20 is " << lim30.value.real() << (lim30.value.imag() < 0 ? "" : "+") << lim30.value.imag()
        << "i, relative error " << sci(rel30);
    v.require(rel30 < 1e-3, got.str());
    const auto &lim43 = find("vi_Pn_limit_r30");
    const double target43 = -std::sqrt(3.0) * pi / 4.0;
    const double rel43 = std::abs(lim43.value - target43) / std::abs(target43);
    v.require(rel43 < 1e-3, "limit at r = 30 relative error " + sci(rel43));
    const auto &tr = find("i_F_weight4_g2");
    v.require(tr.residual < 1e-8, "F|4 g2 - chi(g2) F = " + sci(tr.residual));
    return v;
}

Verdict engines()
{
    Verdict v;
    const qseries::QExponent order(12);
    const auto lam = qseries::lambda_qexp(order);
    const auto eta4 = qseries::eta4_qexp(order);
    const auto phi = qseries::phi_qexp(order);
    const auto f2 = qseries::f2_qexp(order);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> re(-0.95, 0.95);
    std::uniform_real_distribution<double> im(1.0, 2.5);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const cplx z(re(rng), im(rng));
        const cplx phi_c = analytic::phi_closed(z);
        const cplx eta4_n = analytic::eta4_num(z);
        worst = std::max({worst, std::abs(qseries::evaluate(lam, z) - analytic::lambda_num(z)),
                          std::abs(qseries::evaluate(eta4, z) - eta4_n), std::abs(qseries::evaluate(phi, z) - phi_c),
                          std::abs(qseries::evaluate(f2, z) - phi_c * eta4_n)});
    }
    v.require(worst < 1e-10, "max difference " + sci(worst));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string("max difference ") + sci(worst);
    return v;
}

Verdict monte_carlo()
{
    Verdict v;
    percsim::SimConfig sq;
    sq.width = 512;
    sq.height = 512;
    sq.trials = 100000;
    sq.seed = 1;
    const auto a = percsim::compare_to_formula(sq, crossing::AspectRatio(1.0), 0.01);
    v.require(a.pass, "r = 1 gap " + sci(a.gap) + " > " + sci(a.combined_tolerance));
    percsim::SimConfig wide = sq;
    wide.width = 1024;
    wide.seed = 2;
    const auto b = percsim::compare_to_formula(wide, crossing::AspectRatio(2.0), 0.015);
    v.require(std::abs(b.formula_value - cardy_r2) < 1e-9, "Pi_h(2) reference mismatch");
    v.require(b.pass, "r = 2 gap " + sci(b.gap) + " > " + sci(b.combined_tolerance));
    char buf[200];
    std::snprintf(buf, sizeof buf, "r=1 est %.5f +- %.5f; r=2 est %.5f +- %.5f vs %.5f; threads=%d", a.est,
                  a.std_err, b.est, b.std_err, b.formula_value, percsim::detail::resolve_threads(sq));
    v.detail += (v.detail.empty() ? "" : "; ") + std::string(buf);
    return v;
}

Verdict determinism()
{
    Verdict v;
    const std::vector<std::vector<std::string>> commands = {
        {"eval", "phi", "--z", "0.3+0.8i"},
        {"eval", "Pi_hbarv", "--r", "1.7"},
        {"eval", "nu_h", "--alpha", "0.25", "--beta", "3"},
        {"qcheck", "all"},
        {"modcheck", "--seed", "7"},
        {"table1", "--json"},
        {"integrals"},
        {"theorem4"},
        {"simulate", "--width", "128", "--height", "128", "--trials", "3000", "--seed", "11"},
        {"simulate", "--lattice", "site_triangular", "--width", "65", "--height", "75", "--trials", "2000"},
    };
    for (const auto &cmd : commands) {
        const auto first = cli_output(cmd);
        const auto second = cli_output(cmd);
        std::string joined;
        for (const auto &a : cmd) {
            joined += (joined.empty() ? "" : " ") + a;
        }
        v.require(first == second, "'" + joined + "' output changed between runs");
    }
    auto threaded = [](const char *threads) {
        return cli_output(
            {"simulate", "--width", "96", "--height", "96", "--trials", "1500", "--seed", "5", "--threads", threads});
    };
    const auto serial = threaded("1");
    for (const char *threads : {"2", "4"}) {
        v.require(threaded(threads) == serial, std::string("simulate differs with ") + threads + " threads");
    }
    return v;
}

} // namespace

int main()
{
    std::printf("percmod acceptance\n");
    criterion(1, "exact q-series identities", exact_identities, 5.0);
    criterion(2, "phi(i) = C/2 and C", phi_at_i);
    criterion(3, "cocycle constants", cocycle_constants);
    criterion(4, "second-order forms and the single difference of p_bbar", second_order);
    criterion(5, "Table 1 cusp exponents", table1, 60.0);
    criterion(6, "derivative identities by finite differences", theorem21);
    criterion(7, "double-integral identities", double_integrals, 120.0);
    criterion(8, "uniqueness-theorem limits and F transformation", theorem4);
    criterion(9, "series and analytic engines agree", engines);
    criterion(10, "Monte Carlo crossing probabilities", monte_carlo, 180.0);
    criterion(11, "byte-identical output across runs", determinism);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
