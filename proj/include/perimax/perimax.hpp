#pragma once

#include "perimax/errors.hpp"
#include "perimax/framework.hpp"
#include "perimax/io.hpp"
#include "perimax/linalg.hpp"
#include "perimax/rigidity.hpp"
#include "perimax/topology.hpp"
#include "perimax/svg.hpp"
#include "perimax/lifting.hpp"
#include "perimax/pseudo_tri.hpp"
#include "perimax/relax.hpp"
#include "perimax/deformation.hpp"
#include "perimax/fixtures.hpp"
