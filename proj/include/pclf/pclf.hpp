#pragma once

#include "pclf/error.hpp"
#include "pclf/experiments.hpp"
#include "pclf/gallery.hpp"
#include "pclf/graph.hpp"
#include "pclf/graph_io.hpp"
#include "pclf/graph_ops.hpp"
#include "pclf/lifts.hpp"
#include "pclf/lmi.hpp"
#include "pclf/node_id.hpp"
#include "pclf/numerics.hpp"
#include "pclf/simulation.hpp"
