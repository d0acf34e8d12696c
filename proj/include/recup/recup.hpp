#pragma once

// Umbrella header.
#include "recup/properties.hpp"
#include "recup/geometry.hpp"
#include "recup/correlations.hpp"
#include "recup/solver.hpp"
#include "recup/ntu.hpp"
#include "recup/campaign.hpp"
#include "recup/io.hpp"
