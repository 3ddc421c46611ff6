#include "paramot/version.hpp"

#ifndef PARAMOT_VERSION_STRING
#define PARAMOT_VERSION_STRING "0.0.0-dev"
#endif

namespace paramot {

const char* version() { return PARAMOT_VERSION_STRING; }

const char* rng_algorithm() { return "splitmix64-counter+acklam-icdf"; }

}  // namespace paramot
