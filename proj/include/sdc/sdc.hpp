#pragma once

#include "sdc/cavity.hpp"
#include "sdc/config.hpp"
#include "sdc/error.hpp"
#include "sdc/gaussian.hpp"
#include "sdc/power.hpp"
#include "sdc/ray_matrix.hpp"
#include "sdc/stability.hpp"
#include "sdc/table.hpp"
#include "sdc/tolerance.hpp"
