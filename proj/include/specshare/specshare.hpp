#pragma once

#include "specshare/capacity.hpp"
#include "specshare/channels.hpp"
#include "specshare/espar.hpp"
#include "specshare/experiments.hpp"
#include "specshare/numerics.hpp"
#include "specshare/power.hpp"
#include "specshare/rap.hpp"
#include "specshare/rng.hpp"
#include "specshare/version.hpp"
