#pragma once

#include "eif/error.hpp"
#include "eif/preference.hpp"
#include "eif/transforms.hpp"
#include "eif/aggregation.hpp"
#include "eif/impact.hpp"
#include "eif/pipeline.hpp"
#include "eif/scenario_io.hpp"
#include "eif/results.hpp"
