#pragma once

#include "bradford/errors.hpp"
#include "bradford/model.hpp"
#include "bradford/curve.hpp"
#include "bradford/sampling_tree.hpp"
#include "bradford/sim.hpp"
#include "bradford/fit.hpp"
#include "bradford/pipeline.hpp"
#include "bradford/io.hpp"
