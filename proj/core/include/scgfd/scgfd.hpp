#pragma once

#include "scgfd/criterion.hpp"
#include "scgfd/distribution.hpp"
#include "scgfd/errors.hpp"
#include "scgfd/estimand.hpp"
#include "scgfd/factor.hpp"
#include "scgfd/ftadmg.hpp"
#include "scgfd/json_io.hpp"
#include "scgfd/scg.hpp"
#include "scgfd/sim.hpp"
