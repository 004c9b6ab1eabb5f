#ifndef FDCE_FDCE_HPP
#define FDCE_FDCE_HPP

#include "fdce/baselines.hpp"
#include "fdce/bounds.hpp"
#include "fdce/channel.hpp"
#include "fdce/config.hpp"
#include "fdce/constellation.hpp"
#include "fdce/detection.hpp"
#include "fdce/estimator.hpp"
#include "fdce/montecarlo.hpp"
#include "fdce/rng.hpp"
#include "fdce/types.hpp"

namespace fdce {
inline constexpr const char* version = "0.1.0";
}

#endif  // FDCE_FDCE_HPP
