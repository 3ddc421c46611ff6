#pragma once

namespace paramot {

// Library version string, embedded in run summaries.
const char* version();

// Name of the sampling pipeline (generator + normal inverse CDF), embedded
// in run summaries so results can be tied to the exact RNG algorithm.
const char* rng_algorithm();

}  // namespace paramot
