#ifndef PERCMOD_CONFIG_HPP
#define PERCMOD_CONFIG_HPP

#include <percmod/errors.hpp>

namespace percmod
{

struct EvalConfig {
    double target_abs_tol = 1e-12;
    // Below this imaginary part eta is reduced toward the SL2(Z) fundamental domain first.
    double min_im_for_direct_series = 0.3;
    int max_terms = 2000;

    void validate() const
    {
        if (!(target_abs_tol > 0.0)) {
            throw domain_error("EvalConfig: target_abs_tol must be positive");
        }
        if (!(min_im_for_direct_series > 0.0)) {
            throw domain_error("EvalConfig: min_im_for_direct_series must be positive");
        }
        if (max_terms < 1) {
            throw domain_error("EvalConfig: max_terms must be positive");
        }
    }
};

inline const EvalConfig &default_config()
{
    static const EvalConfig cfg{};
    return cfg;
}

} // namespace percmod

#endif
