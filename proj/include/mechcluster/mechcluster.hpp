#pragma once

#include "mechcluster/config.hpp"
#include "mechcluster/constants.hpp"
#include "mechcluster/errors.hpp"
#include "mechcluster/graphs.hpp"
#include "mechcluster/model.hpp"
#include "mechcluster/numerics.hpp"
#include "mechcluster/presets.hpp"
#include "mechcluster/steady_state.hpp"
#include "mechcluster/sweep.hpp"
#include "mechcluster/version.hpp"
