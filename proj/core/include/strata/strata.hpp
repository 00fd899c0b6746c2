#pragma once

#include "strata/analysis.hpp"
#include "strata/barnes_hut.hpp"
#include "strata/errors.hpp"
#include "strata/force_engine.hpp"
#include "strata/geometry.hpp"
#include "strata/graph_model.hpp"
#include "strata/layering.hpp"
#include "strata/prng.hpp"
#include "strata/render_io.hpp"
