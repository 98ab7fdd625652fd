#pragma once

#include "imprand/errors.hpp"
#include "imprand/number.hpp"
#include "imprand/situation.hpp"
#include "imprand/local_models.hpp"
#include "imprand/forecasting_system.hpp"
#include "imprand/capital.hpp"
#include "imprand/selection.hpp"
#include "imprand/growth.hpp"
#include "imprand/strategy.hpp"
#include "imprand/horizon.hpp"
#include "imprand/lawfulness.hpp"
#include "imprand/path_sim.hpp"
#include "imprand/audit.hpp"
#include "imprand/manifest.hpp"
#include "imprand/report_json.hpp"
