#pragma once

#include "qgraph/charpoly.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/graph_io.hpp"
#include "qgraph/orbits.hpp"
#include "qgraph/quadrature.hpp"
#include "qgraph/rational.hpp"
#include "qgraph/rng.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/secular.hpp"
#include "qgraph/statistics.hpp"
#include "qgraph/zeta.hpp"
