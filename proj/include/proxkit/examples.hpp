#pragma once

#include "proxkit/function.hpp"

// Fixed instances shared by the CLI figure presets, the verification suites
// and the tests.
namespace proxkit::examples {

// R^2 -> R^5 operator of the first figure instance.
DenseMap example1_operator();
// l1 norm on the first three coordinates plus the Euclidean norm of the last
// two shifted by (1, -2).
ConvexFunction example1_function();

// R^2 -> R^3 operator of the second figure instance.
DenseMap example2_operator();
// Distance to the ball of radius 2 centred at the origin of R^3.
ConvexFunction example2_function();

// Orthogonal projector of R^2 onto span e1, as a map R^2 -> R^2.
DenseMap projection_map();

}  // namespace proxkit::examples
