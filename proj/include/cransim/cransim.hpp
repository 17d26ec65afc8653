#pragma once

// Convenience umbrella: pulls in the whole library.

#include "cransim/quadrature.hpp"
#include "cransim/rng.hpp"
#include "cransim/analytics.hpp"
#include "cransim/power.hpp"
#include "cransim/geometry.hpp"
#include "cransim/traffic.hpp"
#include "cransim/provision.hpp"
#include "cransim/scenario.hpp"
#include "cransim/runner.hpp"
