#pragma once

#include "ggeval/embed_metrics.hpp"
#include "ggeval/generators.hpp"
#include "ggeval/gin.hpp"
#include "ggeval/graph.hpp"
#include "ggeval/graph_io.hpp"
#include "ggeval/harness.hpp"
#include "ggeval/linalg.hpp"
#include "ggeval/mmd.hpp"
#include "ggeval/ordering.hpp"
#include "ggeval/rng.hpp"
#include "ggeval/stats.hpp"
