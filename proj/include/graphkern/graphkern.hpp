#pragma once

#include "graphkern/cv.hpp"
#include "graphkern/edge_list.hpp"
#include "graphkern/error.hpp"
#include "graphkern/graph.hpp"
#include "graphkern/graphhopper.hpp"
#include "graphkern/gram.hpp"
#include "graphkern/node_kernel.hpp"
#include "graphkern/noise.hpp"
#include "graphkern/parallel.hpp"
#include "graphkern/report.hpp"
#include "graphkern/rng.hpp"
#include "graphkern/spdag.hpp"
#include "graphkern/svm.hpp"
#include "graphkern/tu_format.hpp"
#include "graphkern/wl.hpp"
