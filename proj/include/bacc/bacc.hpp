#pragma once

#include "bacc/diagnostics.hpp"
#include "bacc/error.hpp"
#include "bacc/functions.hpp"
#include "bacc/gradcode.hpp"
#include "bacc/interpolants.hpp"
#include "bacc/parallel.hpp"
#include "bacc/pattern.hpp"
#include "bacc/pointsets.hpp"
#include "bacc/protocol.hpp"
#include "bacc/rng.hpp"
#include "bacc/sample.hpp"
#include "bacc/share_io.hpp"
#include "bacc/simulator.hpp"
