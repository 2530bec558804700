#pragma once

#include "tripipe/baseline_mr.hpp"
#include "tripipe/channel.hpp"
#include "tripipe/engine.hpp"
#include "tripipe/error.hpp"
#include "tripipe/graph_io.hpp"
#include "tripipe/metrics.hpp"
#include "tripipe/oracle.hpp"
#include "tripipe/stage.hpp"
#include "tripipe/verify.hpp"
