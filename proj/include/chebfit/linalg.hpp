#pragma once

#include <chebfit/linalg/least_squares.hpp>
#include <chebfit/linalg/simplex.hpp>
#include <chebfit/linalg/slab_qp.hpp>
#include <chebfit/linalg/types.hpp>
