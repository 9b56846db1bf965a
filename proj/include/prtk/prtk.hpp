#pragma once

#include "prtk/adam.hpp"
#include "prtk/decoder.hpp"
#include "prtk/field.hpp"
#include "prtk/hio.hpp"
#include "prtk/io.hpp"
#include "prtk/metrics.hpp"
#include "prtk/optimize.hpp"
#include "prtk/simulate.hpp"
