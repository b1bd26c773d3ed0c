// Umbrella header for the numerical core.
#ifndef MFIP_MFIP_HPP
#define MFIP_MFIP_HPP

#include "mfip/model.hpp"
#include "mfip/surfaces.hpp"
#include "mfip/hjb.hpp"
#include "mfip/population.hpp"
#include "mfip/equilibrium.hpp"
#include "mfip/metrics.hpp"

#endif  // MFIP_MFIP_HPP
