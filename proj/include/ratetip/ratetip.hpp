// Umbrella include.

#pragma once

#include "ratetip/artifacts.hpp"
#include "ratetip/basins.hpp"
#include "ratetip/bifurcation.hpp"
#include "ratetip/config.hpp"
#include "ratetip/ecosystem.hpp"
#include "ratetip/normal_forms.hpp"
#include "ratetip/ode.hpp"
#include "ratetip/rootfind.hpp"
#include "ratetip/shifts.hpp"
#include "ratetip/stability.hpp"
#include "ratetip/sweep.hpp"
#include "ratetip/tipping.hpp"
