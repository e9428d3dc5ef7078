#pragma once

#include "affine.hpp"
#include "assembly.hpp"
#include "bench.hpp"
#include "common.hpp"
#include "eddy_current.hpp"
#include "majorant.hpp"
#include "mesh.hpp"
#include "meshgen.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "reference.hpp"
#include "solver.hpp"
#include "sparse.hpp"
#include "topology.hpp"
