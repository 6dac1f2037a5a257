#pragma once

#include "fairbandit/numkit/adam.hpp"
#include "fairbandit/numkit/linalg.hpp"
#include "fairbandit/numkit/mlp.hpp"
#include "fairbandit/numkit/rng.hpp"
