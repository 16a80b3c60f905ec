#pragma once

// Umbrella header: the whole library in one include.

#include "wavebal/errors.hpp"
#include "wavebal/io.hpp"
#include "wavebal/longtime.hpp"
#include "wavebal/matrix.hpp"
#include "wavebal/model.hpp"
#include "wavebal/piecewise.hpp"
#include "wavebal/quadrature.hpp"
#include "wavebal/rational.hpp"
#include "wavebal/riemann.hpp"
#include "wavebal/rng.hpp"
#include "wavebal/scheme.hpp"
#include "wavebal/spectral.hpp"
#include "wavebal/transition.hpp"
