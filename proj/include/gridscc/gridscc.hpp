#pragma once

#include "gridscc/error.hpp"
#include "gridscc/region.hpp"
#include "gridscc/scenario.hpp"
#include "gridscc/climate.hpp"
#include "gridscc/pulse.hpp"
#include "gridscc/damage.hpp"
#include "gridscc/scc.hpp"
#include "gridscc/kernel.hpp"
#include "gridscc/config.hpp"
#include "gridscc/report.hpp"
#include "gridscc/runner.hpp"
