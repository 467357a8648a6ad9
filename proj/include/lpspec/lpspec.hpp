#pragma once

#include "errors.hpp"
#include "eigen.hpp"
#include "oracle.hpp"
#include "perron.hpp"
#include "pnorm.hpp"
#include "singular.hpp"
#include "solver_config.hpp"
#include "tensor.hpp"
