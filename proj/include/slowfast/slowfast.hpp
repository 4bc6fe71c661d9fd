#pragma once

// Library umbrella header. The CLI layer (slowfast/cli/*) is separate since it
// pulls in JSON and OpenSSL.

#include "slowfast/error.hpp"
#include "slowfast/version.hpp"

#include "slowfast/ode/integrate.hpp"
#include "slowfast/ode/steppers.hpp"
#include "slowfast/ode/types.hpp"

#include "slowfast/models/charts.hpp"
#include "slowfast/models/enhanced.hpp"
#include "slowfast/models/system_model.hpp"
#include "slowfast/models/transcritical.hpp"
#include "slowfast/models/vdp.hpp"

#include "slowfast/analysis/asymptote.hpp"
#include "slowfast/analysis/bernoulli.hpp"
#include "slowfast/analysis/crossings.hpp"
#include "slowfast/analysis/delay.hpp"
#include "slowfast/analysis/lyapunov.hpp"
#include "slowfast/analysis/strip.hpp"
#include "slowfast/analysis/transcritical_delay.hpp"

#include "slowfast/canard/attractor.hpp"
#include "slowfast/canard/scan.hpp"
