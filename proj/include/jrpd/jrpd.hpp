#pragma once

#include "jrpd/algorithms.hpp"
#include "jrpd/bench.hpp"
#include "jrpd/core.hpp"
#include "jrpd/engine.hpp"
#include "jrpd/generators.hpp"
#include "jrpd/io.hpp"
#include "jrpd/metrics.hpp"
#include "jrpd/opt.hpp"
#include "jrpd/phases.hpp"
#include "jrpd/rational.hpp"
