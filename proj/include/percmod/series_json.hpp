#ifndef PERCMOD_SERIES_JSON_HPP
#define PERCMOD_SERIES_JSON_HPP

#include <limits>
#include <string>

#include <json.hpp>

#include <percmod/puiseux_series.hpp>

namespace percmod::qseries
{

namespace detail
{

// Integers that fit in int64 are written as JSON numbers, larger ones as decimal strings.
inline nlohmann::json big_to_json(const BigInt &v)
{
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
        return static_cast<std::int64_t>(v);
    }
    return v.str();
}

inline BigInt big_from_json(const nlohmann::json &j)
{
    if (j.is_string()) {
        return BigInt(j.get<std::string>());
    }
    if (j.is_number_integer()) {
        return BigInt(j.get<std::int64_t>());
    }
    throw series_error("series JSON: coefficient must be an integer or a decimal string");
}

inline nlohmann::json rational_pair(const SmallRational &r)
{
    return nlohmann::json::array({r.numerator(), r.denominator()});
}

} // namespace detail

// {pi_power, two_power: [n, d], terms: [[e_num, e_den, c_num, c_den], ...], truncation: [n, d] | null}
inline nlohmann::json to_json(const PuiseuxSeries &s)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto &[e, c] : s.terms()) {
        terms.push_back({e.num(), e.den(), detail::big_to_json(boost::multiprecision::numerator(c)),
                         detail::big_to_json(boost::multiprecision::denominator(c))});
    }
    nlohmann::json out;
    out["pi_power"] = s.pi_power();
    out["two_power"] = detail::rational_pair(s.two_power());
    out["terms"] = std::move(terms);
    out["truncation"] = s.truncation() ? detail::rational_pair(s.truncation()->value()) : nlohmann::json(nullptr);
    return out;
}

inline PuiseuxSeries from_json(const nlohmann::json &j)
{
    PuiseuxSeries::Terms terms;
    for (const auto &t : j.at("terms")) {
        if (!t.is_array() || t.size() != 4) {
            throw series_error("series JSON: each term must be [e_num, e_den, c_num, c_den]");
        }
        const QExponent e(t[0].get<std::int64_t>(), t[1].get<std::int64_t>());
        terms.emplace(e, BigRational(detail::big_from_json(t[2]), detail::big_from_json(t[3])));
    }
    std::optional<QExponent> trunc;
    if (j.contains("truncation") && !j.at("truncation").is_null()) {
        const auto &t = j.at("truncation");
        trunc = QExponent(t[0].get<std::int64_t>(), t[1].get<std::int64_t>());
    }
    SmallRational two(0);
    if (j.contains("two_power")) {
        const auto &t = j.at("two_power");
        two = SmallRational(t[0].get<std::int64_t>(), t[1].get<std::int64_t>());
    }
    return PuiseuxSeries(std::move(terms), trunc, j.at("pi_power").get<int>(), two);
}

} // namespace percmod::qseries

#endif
