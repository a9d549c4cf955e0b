#pragma once

#include "medlab/filters.hpp"
#include "medlab/geometry.hpp"
#include "medlab/grid.hpp"
#include "medlab/median_stats.hpp"
#include "medlab/noise.hpp"
#include "medlab/parallel.hpp"
#include "medlab/phantoms.hpp"
#include "medlab/quantile.hpp"
#include "medlab/report.hpp"
#include "medlab/risk.hpp"
#include "medlab/rng.hpp"
