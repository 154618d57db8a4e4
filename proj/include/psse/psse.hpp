#pragma once

#include "psse/approx.hpp"
#include "psse/eigensolve.hpp"
#include "psse/error.hpp"
#include "psse/observables.hpp"
#include "psse/piecewise.hpp"
#include "psse/potentials.hpp"
#include "psse/recurrence.hpp"
#include "psse/series.hpp"
