#pragma once

// Everything in one include.

#include "istate/error.hpp"
#include "istate/spectrum.hpp"
#include "istate/operators.hpp"
#include "istate/specfun.hpp"
#include "istate/precision.hpp"
#include "istate/quadrature.hpp"
#include "istate/gis.hpp"
#include "istate/poschl_teller.hpp"
#include "istate/measure.hpp"
#include "istate/bargmann.hpp"
#include "istate/io.hpp"
