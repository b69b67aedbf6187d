#pragma once

// Umbrella header: the full frame apparatus for parametric hypersurfaces
// under a relative normalization, plus the sampling/verification harness.

#include "relnorm/catalog.hpp"
#include "relnorm/errors.hpp"
#include "relnorm/euclid.hpp"
#include "relnorm/expr.hpp"
#include "relnorm/harness.hpp"
#include "relnorm/jet.hpp"
#include "relnorm/lexer.hpp"
#include "relnorm/linalg.hpp"
#include "relnorm/oracle.hpp"
#include "relnorm/parser.hpp"
#include "relnorm/relative.hpp"
#include "relnorm/surface.hpp"
