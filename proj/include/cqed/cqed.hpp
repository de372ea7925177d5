#pragma once

// Driven emitter-cavity photon-statistics simulator: operator algebra,
// Lindblad steady states and propagation, two-time correlations by quantum
// regression, closed-form cross-checks, interference sweeps, interferometer
// post-processing and a trajectory oracle.

#include "cqed/acceptance.hpp"
#include "cqed/analytic.hpp"
#include "cqed/correlations.hpp"
#include "cqed/detection.hpp"
#include "cqed/errors.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/hom.hpp"
#include "cqed/io.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/mcwf.hpp"
#include "cqed/ode.hpp"
#include "cqed/params.hpp"
#include "cqed/scenario.hpp"
#include "cqed/units.hpp"
#include "cqed/version.hpp"
