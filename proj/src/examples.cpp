#include "proxkit/examples.hpp"

namespace proxkit::examples {

DenseMap example1_operator() {
  return DenseMap::from_rows({{0.0, 0.5}, {-0.5, 0.0}, {0.0, -0.5}, {0.3, 0.4}, {0.1, -0.3}});
}

ConvexFunction example1_function() {
  return ConvexFunction::separable_sum({
      atom::Block{1.0, ConvexFunction::l1_norm(3), 0},
      atom::Block{1.0, ConvexFunction::eucl_norm(2).translated(make_vector({1.0, -2.0})), 3},
  });
}

DenseMap example2_operator() { return DenseMap::from_rows({{0.7, 0.1}, {-0.3, 0.4}, {0.5, -0.3}}); }

ConvexFunction example2_function() { return ConvexFunction::dist_ball(Vector::Zero(3), 2.0); }

DenseMap projection_map() { return DenseMap::from_rows({{1.0, 0.0}, {0.0, 0.0}}); }

}  // namespace proxkit::examples
