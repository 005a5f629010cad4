#pragma once

#include "blc/backlund.hpp"
#include "blc/case.hpp"
#include "blc/error.hpp"
#include "blc/field.hpp"
#include "blc/geometry.hpp"
#include "blc/io.hpp"
#include "blc/jet.hpp"
#include "blc/lattice.hpp"
#include "blc/pde.hpp"
#include "blc/seeds.hpp"
#include "blc/superpose.hpp"
