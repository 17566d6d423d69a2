#pragma once

// Umbrella header for the chipower compositional-data-analysis toolkit.

#include "chipower/composition.hpp"
#include "chipower/diagnostics.hpp"
#include "chipower/error.hpp"
#include "chipower/io.hpp"
#include "chipower/json_io.hpp"
#include "chipower/logistic.hpp"
#include "chipower/metrics.hpp"
#include "chipower/procrustes.hpp"
#include "chipower/rng.hpp"
#include "chipower/sampling.hpp"
#include "chipower/spectral.hpp"
#include "chipower/supervised.hpp"
#include "chipower/svd.hpp"
#include "chipower/synth.hpp"
#include "chipower/transforms.hpp"

namespace coda {
inline constexpr const char* kVersion = "0.1.0";
}
