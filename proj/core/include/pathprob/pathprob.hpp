#pragma once

#include "pathprob/analysis.hpp"
#include "pathprob/errors.hpp"
#include "pathprob/estimates.hpp"
#include "pathprob/io.hpp"
#include "pathprob/lattice.hpp"
#include "pathprob/montecarlo.hpp"
#include "pathprob/numerics.hpp"
#include "pathprob/oracle.hpp"
#include "pathprob/potentials.hpp"
#include "pathprob/quadrature.hpp"
#include "pathprob/version.hpp"
#include "pathprob/weights.hpp"
