#pragma once

// Matrix-free primal-dual solvers for structured problems min f(x) + g(Ax):
// the four orderings of the Chambolle-Pock scheme, the four linearized-ADM
// forms they are sequence-equivalent to, inertial variants with O(1/k)
// certificates, and a total-variation compressive-sensing experiment pipeline.

#include "pdsolve/affine_projection.hpp"
#include "pdsolve/diagnostics.hpp"
#include "pdsolve/experiments.hpp"
#include "pdsolve/finite_difference.hpp"
#include "pdsolve/g_metric.hpp"
#include "pdsolve/linops.hpp"
#include "pdsolve/problem.hpp"
#include "pdsolve/prox.hpp"
#include "pdsolve/rng.hpp"
#include "pdsolve/solver.hpp"
#include "pdsolve/vec.hpp"
#include "pdsolve/walsh_hadamard.hpp"
