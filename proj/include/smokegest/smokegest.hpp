#pragma once

#include "smokegest/detect.hpp"
#include "smokegest/error.hpp"
#include "smokegest/eval.hpp"
#include "smokegest/mlp.hpp"
#include "smokegest/random.hpp"
#include "smokegest/ranges.hpp"
#include "smokegest/signal.hpp"
#include "smokegest/synth.hpp"
#include "smokegest/train.hpp"
