#pragma once

// Umbrella header: sampling and approximate counting for binary symmetric
// Holant problems with log-concave signatures (b-matchings, b-edge covers),
// with a brute-force exact oracle and the recursive shift coupling.

#include "holant/analysis.hpp"
#include "holant/config.hpp"
#include "holant/coupling.hpp"
#include "holant/csv.hpp"
#include "holant/eig.hpp"
#include "holant/error.hpp"
#include "holant/glauber.hpp"
#include "holant/graph.hpp"
#include "holant/instance.hpp"
#include "holant/oracle.hpp"
#include "holant/parallel.hpp"
#include "holant/params.hpp"
#include "holant/rng.hpp"
#include "holant/signature.hpp"
#include "holant/stats.hpp"
