#pragma once

#include "qctrans/vec.hpp"
#include "qctrans/error.hpp"
#include "qctrans/coupling.hpp"
#include "qctrans/special.hpp"
#include "qctrans/systems.hpp"
#include "qctrans/fields.hpp"
#include "qctrans/integrator.hpp"
#include "qctrans/dynamics.hpp"
#include "qctrans/rng.hpp"
#include "qctrans/quadrature.hpp"
#include "qctrans/sampling.hpp"
#include "qctrans/scenario.hpp"
#include "qctrans/ensemble.hpp"
#include "qctrans/field_grid.hpp"
#include "qctrans/config.hpp"
#include "qctrans/export.hpp"
#include "qctrans/svg.hpp"
