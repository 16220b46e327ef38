#ifndef ATLAS_ATLAS_HPP
#define ATLAS_ATLAS_HPP

#include "atlas/choropleth.hpp"
#include "atlas/csv.hpp"
#include "atlas/errors.hpp"
#include "atlas/geometry.hpp"
#include "atlas/indices.hpp"
#include "atlas/ingest.hpp"
#include "atlas/pipeline.hpp"
#include "atlas/selection.hpp"
#include "atlas/spatial_join.hpp"
#include "atlas/stats.hpp"
#include "atlas/tables.hpp"
#include "atlas/types.hpp"
#include "atlas/weights.hpp"

#endif // ATLAS_ATLAS_HPP
