#pragma once

#include "levyrisk/special_functions.hpp"
#include "levyrisk/stable.hpp"
#include "levyrisk/frequency.hpp"
#include "levyrisk/truncation.hpp"
#include "levyrisk/mixture.hpp"
#include "levyrisk/compound.hpp"
#include "levyrisk/aggregate.hpp"
#include "levyrisk/montecarlo.hpp"
