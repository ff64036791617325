#pragma once

#include "config.hpp"
#include "errors.hpp"
#include "special_fn.hpp"
#include "exact_series.hpp"
#include "quadrature.hpp"
#include "theta_route.hpp"
#include "form_factors.hpp"
#include "correlations.hpp"
#include "susceptibility.hpp"
#include "singularities.hpp"
#include "ode_guesser.hpp"
#include "io.hpp"
#include "verify.hpp"
