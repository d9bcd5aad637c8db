#pragma once

#include "cortex/abstraction.hpp"
#include "cortex/adjacency.hpp"
#include "cortex/bench.hpp"
#include "cortex/clustering.hpp"
#include "cortex/color.hpp"
#include "cortex/error.hpp"
#include "cortex/evaluation.hpp"
#include "cortex/features.hpp"
#include "cortex/geometry.hpp"
#include "cortex/image.hpp"
#include "cortex/overlay.hpp"
#include "cortex/snapshot.hpp"
#include "cortex/spatial_index.hpp"
