#pragma once

// Umbrella header: the numerical library without the command line.

#include "hypineq/catalog.hpp"
#include "hypineq/discrete.hpp"
#include "hypineq/errors.hpp"
#include "hypineq/expr.hpp"
#include "hypineq/geometry.hpp"
#include "hypineq/params.hpp"
#include "hypineq/profiles.hpp"
#include "hypineq/quadrature.hpp"
#include "hypineq/sharpness.hpp"
#include "hypineq/term.hpp"
#include "hypineq/term_integral.hpp"
