// Umbrella header.

#pragma once

#include "mtlab/asymptotics.hpp"
#include "mtlab/experiment.hpp"
#include "mtlab/field.hpp"
#include "mtlab/metrics.hpp"
#include "mtlab/normal.hpp"
#include "mtlab/procedures.hpp"
#include "mtlab/rng.hpp"
#include "mtlab/text.hpp"
#include "mtlab/types.hpp"
