#pragma once

#include "tcm/config.hpp"
#include "tcm/diagnostics.hpp"
#include "tcm/errors.hpp"
#include "tcm/field.hpp"
#include "tcm/grid.hpp"
#include "tcm/harness.hpp"
#include "tcm/initial_data.hpp"
#include "tcm/littlewood_paley.hpp"
#include "tcm/model.hpp"
#include "tcm/multipliers.hpp"
#include "tcm/operators.hpp"
#include "tcm/snapshot.hpp"
#include "tcm/timestepper.hpp"
#include "tcm/version.hpp"
