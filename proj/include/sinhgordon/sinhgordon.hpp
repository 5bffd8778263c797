#pragma once

#include "common.hpp"
#include "genus1_spectral.hpp"
#include "genus2_spectral.hpp"
#include "immersion_willmore.hpp"
#include "lax_flows.hpp"
#include "modular_lattice.hpp"
#include "ode.hpp"
#include "parallel.hpp"
#include "potentials.hpp"
#include "weierstrass.hpp"
