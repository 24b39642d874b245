#pragma once

#include "assignment.hpp"
#include "bounds.hpp"
#include "config.hpp"
#include "linalg.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "noise.hpp"
#include "planner.hpp"
#include "rng.hpp"
#include "samplers.hpp"
