#pragma once

#include "qgeo/error.hpp"
#include "qgeo/linalg.hpp"
#include "qgeo/states.hpp"
#include "qgeo/metrics.hpp"
#include "qgeo/channels.hpp"
#include "qgeo/mesh.hpp"
#include "qgeo/seb.hpp"
#include "qgeo/capacity.hpp"
#include "qgeo/voronoi.hpp"
