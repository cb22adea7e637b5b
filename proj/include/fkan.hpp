#pragma once

// Umbrella header.

#include "fkan/animals.hpp"
#include "fkan/cluster_expansion.hpp"
#include "fkan/complex_io.hpp"
#include "fkan/config.hpp"
#include "fkan/enumerate.hpp"
#include "fkan/error.hpp"
#include "fkan/exact_fk.hpp"
#include "fkan/json_io.hpp"
#include "fkan/lattice.hpp"
#include "fkan/local_function.hpp"
#include "fkan/observables.hpp"
#include "fkan/polymer.hpp"
#include "fkan/rational.hpp"
#include "fkan/resummation.hpp"
#include "fkan/rng.hpp"
#include "fkan/sampler.hpp"
#include "fkan/union_find.hpp"
