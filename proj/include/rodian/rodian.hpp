#pragma once

// Robust central-tendency estimators built around histogram density search.

#include "rodian/estimators.hpp"
#include "rodian/histogram_engine.hpp"
