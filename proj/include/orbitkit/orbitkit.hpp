#pragma once

#include "orbitkit/bigint.hpp"
#include "orbitkit/census.hpp"
#include "orbitkit/cycle_engine.hpp"
#include "orbitkit/genfun.hpp"
#include "orbitkit/inverse_orbit.hpp"
#include "orbitkit/map_kernel.hpp"
#include "orbitkit/poly.hpp"
#include "orbitkit/rationality.hpp"
#include "orbitkit/residue_algebra.hpp"
#include "orbitkit/serialize.hpp"
