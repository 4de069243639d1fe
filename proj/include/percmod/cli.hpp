#ifndef PERCMOD_CLI_HPP
#define PERCMOD_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "analytic.hpp"
#include "crossing.hpp"
#include "modular.hpp"
#include "percsim.hpp"
#include "qseries.hpp"

namespace percmod::cli
{

using json = nlohmann::json;
using analytic::cplx;

// Exit codes: all requested checks passed, a check failed or evaluation raised, bad usage.
inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_usage = 2;

class usage_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Formatting

// Doubles are rounded to 15 significant digits before they reach the JSON writer,
// which then prints the shortest round-trip form of the rounded value.
inline double round15(double v)
{
    if (!std::isfinite(v) || v == 0.0) {
        return v == 0.0 ? 0.0 : v;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

inline json num(double v)
{
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return round15(v);
}

inline json cnum(cplx z)
{
    return json{{"re", num(z.real())}, {"im", num(z.imag())}};
}

inline std::string fmt(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

inline std::string csv_row(const std::vector<std::string> &cells)
{
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out += (i ? "," : "") + csv_field(cells[i]);
    }
    return out + "\n";
}

// Accepts "i", "-2i", "0.3+0.8i", "1e-3-2.5i", "0.5".
inline cplx parse_complex(const std::string &text)
{
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s += c;
        }
    }
    static const std::string real_re = R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))";
    static const std::string imag_re = R"(([+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)\*?i)";
    static const std::regex only_real("^" + real_re + "$");
    static const std::regex only_imag("^" + imag_re + "$");
    static const std::regex both("^" + real_re + "([+-](?:(?:\\d+\\.?\\d*|\\.\\d+)(?:[eE][+-]?\\d+)?)?)\\*?i$");
    auto imag_coeff = [](const std::string &c) {
        if (c.empty() || c == "+") {
            return 1.0;
        }
        if (c == "-") {
            return -1.0;
        }
        return std::stod(c);
    };
    std::smatch m;
    if (std::regex_match(s, m, only_real)) {
        return {std::stod(m[1].str()), 0.0};
    }
    if (std::regex_match(s, m, only_imag)) {
        return {0.0, imag_coeff(m[1].str())};
    }
    if (std::regex_match(s, m, both)) {
        return {std::stod(m[1].str()), imag_coeff(m[2].str())};
    }
    throw usage_error("cannot parse complex number '" + text + "' (examples: i, 0.3+0.8i, -1+1.3i)");
}

inline qseries::QExponent parse_exponent(const std::string &text)
{
    static const std::regex frac(R"(^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, frac)) {
        throw usage_error("cannot parse order '" + text + "' (expected an integer or a fraction such as 10/3)");
    }
    const std::int64_t n = std::stoll(m[1].str());
    const std::int64_t d = m[2].matched ? std::stoll(m[2].str()) : 1;
    return qseries::QExponent(n, d);
}

// ---------------------------------------------------------------------------
// Reports

struct Outcome {
    json report;
    std::string csv;
    bool pass = true;
};

inline void sort_checks(json &arr, const char *key = "check")
{
    std::sort(arr.begin(), arr.end(), [key](const json &a, const json &b) {
        return a.at(key).get<std::string>() < b.at(key).get<std::string>();
    });
}

inline const std::vector<std::string> &z_quantities()
{
    static const std::vector<std::string> q{"eta", "lambda", "lambda_prime", "phi", "f2",  "G",
                                            "F",   "p_b",    "p_bbar",       "n"};
    return q;
}

inline const std::vector<std::string> &anchor_quantities()
{
    static const std::vector<std::string> q{"pi_h_b", "pi_h_bbar", "nu_h"};
    return q;
}

inline const std::vector<std::string> &ratio_quantities()
{
    static const std::vector<std::string> q{"Pi_h", "Pi_hbarv", "N_h"};
    return q;
}

inline bool contains(const std::vector<std::string> &v, const std::string &s)
{
    return std::find(v.begin(), v.end(), s) != v.end();
}

struct EvalArgs {
    std::string quantity;
    std::optional<std::string> z;
    std::optional<double> alpha, beta, r;
    std::string route = "automatic";
};

inline crossing::Route parse_route(const std::string &s)
{
    if (s == "automatic") {
        return crossing::Route::automatic;
    }
    if (s == "prop22") {
        return crossing::Route::prop22;
    }
    if (s == "substitution") {
        return crossing::Route::substitution;
    }
    throw usage_error("unknown route '" + s + "' (expected automatic, prop22 or substitution)");
}

// Which engine produced phi (and f2 = phi eta^4) at z.
inline std::string phi_engine(cplx z)
{
    if (z.imag() >= analytic::detail::series_min_im) {
        return "series";
    }
    return analytic::detail::in_principal_region(z, 1e-6) ? "closed_form" : "quadrature";
}

inline Outcome eval_cmd(const EvalArgs &a)
{
    const auto &cfg = default_config();
    json input;
    cplx value;
    double abs_err = 0.0;
    std::string engine;
    const std::string &q = a.quantity;
    if (contains(z_quantities(), q)) {
        if (!a.z || a.alpha || a.beta || a.r) {
            throw usage_error("eval " + q + " takes --z only");
        }
        if (a.route != "automatic" && q != "p_b" && q != "p_bbar" && q != "n") {
            throw usage_error("--route applies to p_b, p_bbar and n only");
        }
        const cplx z = parse_complex(*a.z);
        input = json{{"z", cnum(z)}};
        engine = "series";
        if (q == "eta") {
            value = analytic::dedekind_eta(z, cfg);
        } else if (q == "lambda") {
            value = analytic::lambda_num(z, cfg);
        } else if (q == "lambda_prime") {
            value = analytic::lambdaprime_num(z, cfg);
        } else if (q == "phi") {
            value = analytic::phi_num(z, cfg);
            engine = phi_engine(z);
        } else if (q == "f2") {
            value = analytic::f2_num(z, cfg);
            engine = phi_engine(z);
        } else if (q == "G") {
            value = analytic::G_num(z, cfg);
        } else if (q == "F") {
            value = analytic::F_num(z, cfg);
        } else {
            const auto route = parse_route(a.route);
            input["route"] = a.route;
            engine = "closed_form";
            if (q == "p_b") {
                value = crossing::p_b(z, route, cfg);
            } else if (q == "p_bbar") {
                value = crossing::p_bbar(z, route, cfg);
            } else {
                value = crossing::n_func(z, route, cfg);
            }
        }
        // Point evaluations carry the engine's target accuracy rather than a measured bound.
        abs_err = cfg.target_abs_tol * std::max(1.0, std::abs(value));
    } else if (contains(anchor_quantities(), q)) {
        if (!a.alpha || !a.beta || a.z || a.r || a.route != "automatic") {
            throw usage_error("eval " + q + " takes --alpha and --beta only");
        }
        const crossing::AnchorPair ap(*a.alpha, *a.beta);
        input = json{{"alpha", num(ap.alpha)}, {"beta", num(ap.beta)}};
        const auto v = q == "pi_h_b" ? crossing::pi_h_b(ap, cfg)
                       : q == "pi_h_bbar" ? crossing::pi_h_bbar(ap, cfg)
                                          : crossing::nu_h(ap, cfg);
        value = v.value;
        abs_err = v.abs_err;
        engine = crossing::to_string(v.engine);
    } else if (contains(ratio_quantities(), q)) {
        if (!a.r || a.z || a.alpha || a.beta || a.route != "automatic") {
            throw usage_error("eval " + q + " takes --r only");
        }
        const crossing::AspectRatio ar(*a.r);
        input = json{{"r", num(ar.r)}};
        const auto v = q == "Pi_h" ? crossing::pi_h(ar, cfg)
                       : q == "Pi_hbarv" ? crossing::pi_hbarv(ar, cfg)
                                         : crossing::n_h(ar, cfg);
        value = v.value;
        abs_err = v.abs_err;
        engine = crossing::to_string(v.engine);
    } else {
        throw usage_error("unknown quantity '" + q + "'");
    }
    Outcome out;
    out.report = json{{"quantity", q}, {"input", input}, {"value", cnum(value)}, {"abs_err", num(abs_err)},
                      {"engine", engine}};
    out.csv = csv_row({"quantity", "input", "re", "im", "abs_err", "engine"})
              + csv_row({q, input.dump(), fmt(value.real()), fmt(value.imag()), fmt(abs_err), engine});
    return out;
}

inline const std::vector<std::string> &default_identities()
{
    static const std::vector<std::string> ids{"lambda_double", "lambda_prime", "g_cubed", "phi_hypergeom"};
    return ids;
}

inline Outcome qcheck_cmd(const std::vector<std::string> &identities, const std::string &order)
{
    const auto through = parse_exponent(order);
    for (const auto &id : identities) {
        if (!contains(qseries::identity_names(), id)) {
            throw usage_error("unknown identity '" + id + "'");
        }
    }
    Outcome out;
    json checks = json::array();
    out.csv = csv_row({"identity", "through", "pass", "first_difference", "detail"});
    for (const auto &id : identities) {
        const auto res = qseries::check_identity(id, through);
        json first = res.first_difference ? json(res.first_difference->str()) : json(nullptr);
        checks.push_back(json{{"check", id}, {"through", through.str()}, {"pass", res.pass},
                              {"first_difference", first}, {"detail", res.detail}});
        out.pass = out.pass && res.pass;
    }
    sort_checks(checks);
    for (const auto &c : checks) {
        out.csv += csv_row({c["check"], c["through"], c["pass"].get<bool>() ? "true" : "false",
                            c["first_difference"].is_null() ? "" : c["first_difference"].get<std::string>(),
                            c["detail"]});
    }
    out.report = json{{"verb", "qcheck"}, {"pass", out.pass}, {"checks", checks}};
    return out;
}

namespace detail
{

struct CheckRow {
    std::string check;
    std::string gamma;
    std::vector<cplx> points;
    std::vector<double> residuals;
    double tolerance;
    json extra = json::object();

    double max_residual() const
    {
        double m = 0.0;
        for (double r : residuals) {
            m = std::max(m, std::isnan(r) ? INFINITY : r);
        }
        return m;
    }
    bool pass() const
    {
        return max_residual() < tolerance;
    }
    json to_json() const
    {
        json pts = json::array();
        for (const auto &p : points) {
            pts.push_back(cnum(p));
        }
        json res = json::array();
        for (double r : residuals) {
            res.push_back(num(r));
        }
        json j{{"check", check},      {"gamma", gamma},           {"points", pts},
               {"residuals", res},    {"tolerance", num(tolerance)}, {"pass", pass()}};
        for (auto it = extra.begin(); it != extra.end(); ++it) {
            j[it.key()] = it.value();
        }
        return j;
    }
};

inline Outcome rows_to_outcome(const std::string &verb, std::vector<CheckRow> rows)
{
    std::sort(rows.begin(), rows.end(), [](const CheckRow &a, const CheckRow &b) {
        return a.check != b.check ? a.check < b.check : a.gamma < b.gamma;
    });
    Outcome out;
    json checks = json::array();
    out.csv = csv_row({"check", "gamma", "max_residual", "tolerance", "pass"});
    for (const auto &r : rows) {
        checks.push_back(r.to_json());
        out.csv += csv_row({r.check, r.gamma, fmt(r.max_residual()), fmt(r.tolerance), r.pass() ? "true" : "false"});
        out.pass = out.pass && r.pass();
    }
    out.report = json{{"verb", verb}, {"pass", out.pass}, {"checks", checks}};
    return out;
}

} // namespace detail

inline Outcome modcheck_cmd(double tol_scale, std::uint64_t seed, int words)
{
    using namespace modular;
    using detail::CheckRow;
    const auto &k = analytic::constants();
    const auto g1 = elements::g1();
    const auto g2 = elements::g2();
    std::vector<CheckRow> rows;

    const auto d1 = d_report(g1);
    rows.push_back({"d_g1_zero", g1.str(), d1.points, {std::abs(d1.value), d1.spread}, 1e-10 * tol_scale,
                    json{{"value", cnum(d1.value)}}});
    const auto d2 = d_report(g2);
    rows.push_back({"d_g2_value",
                    g2.str(),
                    d2.points,
                    {std::abs(d2.value - k.d_g2) / std::abs(k.d_g2)},
                    1e-8 * tol_scale,
                    json{{"value", cnum(d2.value)}, {"expected", cnum(k.d_g2)}}});

    std::mt19937_64 rng(seed);
    for (int i = 0; i < words; ++i) {
        const auto g = random_word(rng);
        const auto h = random_word(rng);
        const auto gh = g * h;
        const auto rep = d_report(gh);
        const auto c = cocycle_check(g, h);
        rows.push_back({"cocycle", g.str() + "*" + h.str(), rep.points, {c.residual}, 1e-8 * tol_scale,
                        json{{"lhs", cnum(c.lhs)}, {"rhs", cnum(c.rhs)}}});
        rows.push_back({"d_constancy", gh.str(), rep.points, {rep.spread}, 1e-8 * tol_scale,
                        json{{"value", cnum(rep.value)}}});
    }

    const SlashSpec w0(0, Character::trivial);
    const SlashSpec w0chi(0, Character::chi);
    const std::vector<std::pair<std::string, Function>> forms = {
        {"p_bbar", [](cplx z) { return crossing::p_bbar(z); }},
        {"p_b", [](cplx z) { return crossing::p_b(z); }},
        {"n", [](cplx z) { return crossing::n_func(z); }},
    };
    const auto &samples = canonical_samples();
    for (const auto &[name, f] : forms) {
        for (const auto &ga : {g1, g2}) {
            for (const auto &gb : {g1, g2}) {
                const auto rep = second_order_check(f, w0, w0chi, ga, gb, samples);
                rows.push_back({"second_order_" + name, ga.str() + "," + gb.str(), samples, rep.residuals,
                                1e-7 * tol_scale});
            }
        }
    }

    // p_bbar |_0 (gamma - 1) against d_gamma G as stated, and against 4 sqrt(3) i d_gamma G.
    const cplx factor = 4.0 * std::sqrt(3.0) * 1i;
    for (const auto &g : {g1, g2}) {
        const cplx dg = d_of(g);
        std::vector<double> stated;
        std::vector<double> scaled;
        for (const auto &z : samples) {
            const cplx diff = crossing::p_bbar(apply(g, z)) - crossing::p_bbar(z);
            const cplx G = analytic::G_num(z);
            stated.push_back(std::abs(diff - dg * G));
            scaled.push_back(std::abs(diff - factor * dg * G));
        }
        rows.push_back({"single_difference_p_bbar_d_G", g.str(), samples, stated, 1e-7 * tol_scale});
        rows.push_back({"single_difference_p_bbar_4rt3i_d_G", g.str(), samples, scaled, 1e-7 * tol_scale});
    }

    const Function G = [](cplx z) { return analytic::G_num(z); };
    const Function lp = [](cplx z) { return analytic::lambdaprime_num(z); };
    const std::vector<GroupElement> group{g1, g2, g1 * g2, g2 * g1.inverse(), g1 * g1 * g2.inverse(),
                                          g2 * g2 * g1 * g2};
    for (const auto &g : group) {
        std::vector<double> rg;
        std::vector<double> rl;
        for (const auto &z : samples) {
            const cplx gz = G(z);
            rg.push_back(std::abs(slash(G, w0chi, g, z) - gz) / std::max(1.0, std::abs(gz)));
            const cplx lz = lp(z);
            rl.push_back(std::abs(slash(lp, SlashSpec(2, Character::trivial), g, z) - lz) / std::abs(lz));
        }
        rows.push_back({"G_weight0_character_chi", g.str(), samples, rg, 1e-9 * tol_scale});
        rows.push_back({"lambda_prime_weight2_invariant", g.str(), samples, rl, 1e-9 * tol_scale});
    }
    return detail::rows_to_outcome("modcheck", std::move(rows));
}

inline Outcome table1_cmd(double tol_scale)
{
    const auto cells = modular::table1(0.02 * tol_scale);
    Outcome out;
    json arr = json::array();
    out.csv = csv_row({"function", "cusp", "estimated", "expected", "gap", "fit_rms", "warning", "pass"});
    for (const auto &c : cells) {
        arr.push_back(json{{"function", c.function},
                           {"cusp", modular::to_string(c.cusp)},
                           {"estimated", num(c.estimated)},
                           {"expected", num(c.expected)},
                           {"gap", num(c.gap)},
                           {"fit_rms", num(c.fit_rms)},
                           {"warning", c.warning},
                           {"pass", c.pass}});
        out.csv += csv_row({c.function, modular::to_string(c.cusp), fmt(c.estimated), fmt(c.expected), fmt(c.gap),
                            fmt(c.fit_rms), c.warning ? "true" : "false", c.pass ? "true" : "false"});
        out.pass = out.pass && c.pass;
    }
    out.report = json{{"verb", "table1"}, {"pass", out.pass}, {"tolerance", num(0.02 * tol_scale)}, {"cells", arr}};
    return out;
}

inline Outcome integrals_cmd(const std::vector<double> &lambdas, double tol_scale)
{
    const double tol = 1e-5 * tol_scale;
    Outcome out;
    json arr = json::array();
    out.csv = csv_row({"lambda", "r", "density", "lhs", "integral", "residual", "tolerance", "pass"});
    for (double lam : lambdas) {
        const auto rep = crossing::verify_double_integrals(lam);
        for (const auto &row : rep.rows) {
            const bool ok = row.residual < tol;
            arr.push_back(json{{"check", row.density + "@" + fmt(lam)},
                               {"lambda", num(rep.lambda)},
                               {"r", num(rep.r)},
                               {"density", row.density},
                               {"lhs", num(row.lhs)},
                               {"lhs_err", num(row.lhs_err)},
                               {"integral", num(row.integral)},
                               {"integral_err", num(row.integral_err)},
                               {"residual", num(row.residual)},
                               {"tolerance", num(tol)},
                               {"pass", ok}});
            out.csv += csv_row({fmt(rep.lambda), fmt(rep.r), row.density, fmt(row.lhs), fmt(row.integral),
                                fmt(row.residual), fmt(tol), ok ? "true" : "false"});
            out.pass = out.pass && ok;
        }
    }
    out.report = json{{"verb", "integrals"}, {"pass", out.pass}, {"checks", arr}};
    return out;
}

inline Outcome theorem4_cmd(double tol_scale)
{
    Outcome out;
    json arr = json::array();
    out.csv = csv_row({"check", "value_re", "value_im", "expected_re", "expected_im", "residual", "tolerance", "pass"});
    for (const auto &c : modular::theorem4_checks()) {
        const double tol = c.tolerance * tol_scale;
        const bool ok = c.residual < tol;
        arr.push_back(json{{"check", c.name},
                           {"value", cnum(c.value)},
                           {"expected", cnum(c.expected)},
                           {"residual", num(c.residual)},
                           {"tolerance", num(tol)},
                           {"pass", ok}});
        out.csv += csv_row({c.name, fmt(c.value.real()), fmt(c.value.imag()), fmt(c.expected.real()),
                            fmt(c.expected.imag()), fmt(c.residual), fmt(tol), ok ? "true" : "false"});
        out.pass = out.pass && ok;
    }
    out.report = json{{"verb", "theorem4"}, {"pass", out.pass}, {"checks", arr}};
    return out;
}

struct SimulateArgs {
    percsim::SimConfig cfg;
    std::string lattice = "bond_square";
    std::optional<double> compare_r;
    double allowance = 0.01;
    std::string trials_csv;
};

inline Outcome simulate_cmd(SimulateArgs a, bool timing)
{
    a.cfg.lattice = percsim::lattice_from_string(a.lattice);
    a.cfg.keep_outcomes = !a.trials_csv.empty();
    const auto res = percsim::run_sim(a.cfg);
    Outcome out;
    out.report = json{{"verb", "simulate"},
                      {"config",
                       {{"lattice", a.lattice},
                        {"width", a.cfg.width},
                        {"height", a.cfg.height},
                        {"p", num(a.cfg.p)},
                        {"trials", a.cfg.trials},
                        {"seed", a.cfg.seed}}},
                      {"est_pi_h", num(res.est_pi_h)},
                      {"est_pi_v", num(res.est_pi_v)},
                      {"est_pi_hv", num(res.est_pi_hv)},
                      {"std_err", {{"pi_h", num(res.std_err_h)}, {"pi_v", num(res.std_err_v)},
                                   {"pi_hv", num(res.std_err_hv)}}},
                      {"counts", {{"h", res.count_h}, {"v", res.count_v}, {"hv", res.count_hv}}},
                      {"trials_run", res.trials_run}};
    if (timing) {
        out.report["wall_time_s"] = num(res.wall_time.count());
    }
    out.csv = csv_row({"lattice", "width", "height", "p", "trials", "seed", "est_pi_h", "std_err_h", "est_pi_v",
                       "std_err_v", "est_pi_hv", "std_err_hv"})
              + csv_row({a.lattice, std::to_string(a.cfg.width), std::to_string(a.cfg.height), fmt(a.cfg.p),
                         std::to_string(a.cfg.trials), std::to_string(a.cfg.seed), fmt(res.est_pi_h),
                         fmt(res.std_err_h), fmt(res.est_pi_v), fmt(res.std_err_v), fmt(res.est_pi_hv),
                         fmt(res.std_err_hv)});
    if (a.compare_r) {
        const auto cmp =
            percsim::compare_to_formula(a.cfg, crossing::AspectRatio(*a.compare_r), a.allowance, &res);
        out.report["comparison"] = json{{"r", num(cmp.r)},
                                        {"est", num(cmp.est)},
                                        {"formula_value", num(cmp.formula_value)},
                                        {"gap", num(cmp.gap)},
                                        {"combined_tolerance", num(cmp.combined_tolerance)},
                                        {"pass", cmp.pass}};
        out.pass = cmp.pass;
    }
    if (!a.trials_csv.empty()) {
        std::ofstream f(a.trials_csv);
        if (!f) {
            throw std::runtime_error("cannot write " + a.trials_csv);
        }
        f << "trial,h,v\n";
        for (std::size_t t = 0; t < res.outcomes.size(); ++t) {
            f << t << ',' << ((res.outcomes[t] & percsim::crossed_h) ? 1 : 0) << ','
              << ((res.outcomes[t] & percsim::crossed_v) ? 1 : 0) << '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Entry point

struct CommonFlags {
    double tol = 1.0;
    bool csv = false;
    bool json_out = false;
    bool timing = false;
    std::string out;
};

inline void add_common(CLI::App *sub, CommonFlags &f, bool table_flags = false)
{
    sub->add_option("--tol", f.tol, "Scale factor applied to every numeric tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--csv", f.csv, "Emit CSV instead of JSON");
    if (table_flags) {
        sub->add_flag("--json", f.json_out, "Emit JSON instead of CSV");
    }
    sub->add_flag("--timing", f.timing, "Report elapsed wall time (makes output run-dependent)");
    sub->add_option("--out", f.out, "Write the report to this file instead of stdout");
}

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    CLI::App app{"Numerics for second-order modular forms and percolation crossing probabilities", "percmod"};
    app.require_subcommand(1);
    CommonFlags flags;

    EvalArgs eval_args;
    auto *eval = app.add_subcommand("eval", "Evaluate one quantity");
    std::vector<std::string> all_q = z_quantities();
    all_q.insert(all_q.end(), anchor_quantities().begin(), anchor_quantities().end());
    all_q.insert(all_q.end(), ratio_quantities().begin(), ratio_quantities().end());
    eval->add_option("quantity", eval_args.quantity, "Quantity to evaluate")->required()->check(CLI::IsMember(all_q));
    eval->add_option("--z", eval_args.z, "Point of the upper half-plane, e.g. i or 0.3+0.8i");
    eval->add_option("--alpha", eval_args.alpha, "Anchor alpha in [0, 1)");
    eval->add_option("--beta", eval_args.beta, "Anchor beta >= 1");
    eval->add_option("--r", eval_args.r, "Aspect ratio r > 0");
    eval->add_option("--route", eval_args.route, "automatic, prop22 or substitution (p_b, p_bbar, n)");
    add_common(eval, flags);

    std::vector<std::string> identities;
    std::string order = "10";
    auto *qcheck = app.add_subcommand("qcheck", "Exact q-series identities");
    qcheck->add_option("identity", identities,
                       "Identity names; default is the four principal identities, 'all' adds the eta-power ones");
    qcheck->add_option("--order", order, "Compare coefficients through q^order (integer or fraction)");
    add_common(qcheck, flags);

    std::uint64_t mod_seed = 1;
    int mod_words = 20;
    auto *modcheck = app.add_subcommand("modcheck", "Cocycle, character and second-order transformation checks");
    modcheck->add_option("--seed", mod_seed, "Seed for random group words");
    modcheck->add_option("--words", mod_words, "Number of random word pairs")->check(CLI::PositiveNumber);
    add_common(modcheck, flags);

    auto *table1 = app.add_subcommand("table1", "Leading cusp exponents, estimated against expected (CSV)");
    add_common(table1, flags, true);

    std::vector<double> lambdas{0.2, 0.5, 0.8};
    auto *integrals = app.add_subcommand("integrals", "Double-integral identities for the crossing densities");
    integrals->add_option("--lambda", lambdas, "Cross-ratio values in (0, 1)")->delimiter(',');
    add_common(integrals, flags);

    auto *theorem4 = app.add_subcommand("theorem4", "Uniqueness-theorem numerics for F and the blocks P");
    add_common(theorem4, flags);

    SimulateArgs sim;
    auto *simulate = app.add_subcommand("simulate", "Monte Carlo crossing probabilities");
    simulate->add_option("--lattice", sim.lattice, "bond_square or site_triangular")
        ->check(CLI::IsMember({"bond_square", "site_triangular"}));
    simulate->add_option("--width", sim.cfg.width, "Columns of sites");
    simulate->add_option("--height", sim.cfg.height, "Rows of sites");
    simulate->add_option("--p", sim.cfg.p, "Occupation probability");
    simulate->add_option("--trials", sim.cfg.trials, "Number of trials");
    simulate->add_option("--seed", sim.cfg.seed, "Seed");
    simulate->add_option("--threads", sim.cfg.threads, "Worker threads (0: PERCMOD_THREADS or all cores)");
    simulate->add_option("--compare-r", sim.compare_r, "Compare est_pi_h with Pi_h at this aspect ratio");
    simulate->add_option("--allowance", sim.allowance, "Finite-size allowance added to 3 std_err");
    simulate->add_option("--trials-csv", sim.trials_csv, "Write per-trial outcomes to this CSV file");
    add_common(simulate, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome res;
        bool csv_default = false;
        if (*eval) {
            res = eval_cmd(eval_args);
        } else if (*qcheck) {
            std::vector<std::string> ids = identities;
            if (ids.empty()) {
                ids = default_identities();
            } else if (ids.size() == 1 && ids[0] == "all") {
                ids = qseries::identity_names();
            }
            res = qcheck_cmd(ids, order);
        } else if (*modcheck) {
            res = modcheck_cmd(flags.tol, mod_seed, mod_words);
        } else if (*table1) {
            res = table1_cmd(flags.tol);
            csv_default = true;
        } else if (*integrals) {
            res = integrals_cmd(lambdas, flags.tol);
        } else if (*theorem4) {
            res = theorem4_cmd(flags.tol);
        } else {
            res = simulate_cmd(sim, flags.timing);
        }
        if (flags.timing && !res.report.contains("wall_time_s")) {
            res.report["wall_time_s"] =
                num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        const bool as_csv = flags.csv || (csv_default && !flags.json_out);
        const std::string text = as_csv ? res.csv : res.report.dump(2) + "\n";
        if (flags.out.empty()) {
            out << text;
        } else {
            std::ofstream f(flags.out);
            if (!f) {
                err << "percmod: cannot write " << flags.out << "\n";
                return exit_fail;
            }
            f << text;
        }
        return res.pass ? exit_pass : exit_fail;
    } catch (const usage_error &e) {
        err << "percmod: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception &e) {
        err << "percmod: error: " << e.what() << "\n";
        return exit_fail;
    }
}

} // namespace percmod::cli

#endif
