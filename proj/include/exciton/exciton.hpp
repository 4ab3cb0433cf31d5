// Umbrella header.
#pragma once

#include "exciton/analysis.hpp"
#include "exciton/density_matrix.hpp"
#include "exciton/diffusion.hpp"
#include "exciton/experiments.hpp"
#include "exciton/io.hpp"
#include "exciton/model.hpp"
#include "exciton/propagation.hpp"
#include "exciton/units.hpp"
