#pragma once

// Core library: everything except the experiment harness (which pulls in libpng).

#include "arsel/criteria.hpp"
#include "arsel/depmeasure.hpp"
#include "arsel/errors.hpp"
#include "arsel/estimator.hpp"
#include "arsel/io.hpp"
#include "arsel/levinson.hpp"
#include "arsel/oracle.hpp"
#include "arsel/parallel.hpp"
#include "arsel/popmodel.hpp"
#include "arsel/procgen.hpp"
#include "arsel/rng.hpp"
