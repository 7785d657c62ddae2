#pragma once

// Umbrella header for the toponav library: a desk-scale topological
// navigation simulator built around online waypoint self-organization,
// graph-based long-range planning and a rotate-then-forward controller with
// trial-and-error obstacle escape.

#include "toponav/config.hpp"
#include "toponav/controller.hpp"
#include "toponav/episode.hpp"
#include "toponav/geometry.hpp"
#include "toponav/grid.hpp"
#include "toponav/mat.hpp"
#include "toponav/metrics.hpp"
#include "toponav/planner.hpp"
#include "toponav/scenario.hpp"
#include "toponav/suite.hpp"
#include "toponav/svg.hpp"
#include "toponav/topomap.hpp"
#include "toponav/trace.hpp"
#include "toponav/waypoint.hpp"
#include "toponav/world.hpp"
