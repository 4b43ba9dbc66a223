#pragma once

// Axisymmetric eddy-current Galerkin BEM: umbrella header.

#include "axibem/specfun.hpp"
#include "axibem/quadrature.hpp"
#include "axibem/kernels.hpp"
#include "axibem/coilfield.hpp"
#include "axibem/geometry.hpp"
#include "axibem/assembly.hpp"
#include "axibem/solver.hpp"
#include "axibem/config.hpp"
#include "axibem/driver.hpp"
