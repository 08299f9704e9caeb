#pragma once

// Umbrella header.

#include "prs/cnf.hpp"
#include "prs/errors.hpp"
#include "prs/graph.hpp"
#include "prs/graph_apps.hpp"
#include "prs/instance_io.hpp"
#include "prs/model.hpp"
#include "prs/parallel.hpp"
#include "prs/presets.hpp"
#include "prs/rational.hpp"
#include "prs/rng.hpp"
#include "prs/sampler.hpp"
#include "prs/shearer.hpp"
#include "prs/verify.hpp"
