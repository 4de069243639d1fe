#ifndef PERCMOD_PERCMOD_HPP
#define PERCMOD_PERCMOD_HPP

// Everything except the command-line layer.
#include "analytic.hpp"
#include "config.hpp"
#include "crossing.hpp"
#include "errors.hpp"
#include "hypergeometric.hpp"
#include "modular.hpp"
#include "percsim.hpp"
#include "puiseux_series.hpp"
#include "qseries.hpp"
#include "quadrature.hpp"

#endif
