#pragma once

// Umbrella include for the DRAM-latency TRNG toolkit.

#include "dltrng/characterize.hpp"
#include "dltrng/config.hpp"
#include "dltrng/core.hpp"
#include "dltrng/extract.hpp"
#include "dltrng/fft.hpp"
#include "dltrng/filter.hpp"
#include "dltrng/measurement.hpp"
#include "dltrng/nist.hpp"
#include "dltrng/rng.hpp"
#include "dltrng/sha2.hpp"
#include "dltrng/sim.hpp"
#include "dltrng/special.hpp"
#include "dltrng/suite.hpp"
