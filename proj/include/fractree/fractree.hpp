#pragma once

#include "fractree/analysis.hpp"
#include "fractree/assignment.hpp"
#include "fractree/errors.hpp"
#include "fractree/identify.hpp"
#include "fractree/io.hpp"
#include "fractree/locus.hpp"
#include "fractree/optimize.hpp"
#include "fractree/parallel.hpp"
#include "fractree/polynomial.hpp"
#include "fractree/rational.hpp"
#include "fractree/roots.hpp"
#include "fractree/tree.hpp"
