#pragma once

#include "metagrav/config.hpp"
#include "metagrav/errors.hpp"
#include "metagrav/estimates.hpp"
#include "metagrav/factored.hpp"
#include "metagrav/fft.hpp"
#include "metagrav/field.hpp"
#include "metagrav/ground_state.hpp"
#include "metagrav/potential.hpp"
#include "metagrav/propagator.hpp"
#include "metagrav/reduction.hpp"
#include "metagrav/spectrum.hpp"
#include "metagrav/units.hpp"
