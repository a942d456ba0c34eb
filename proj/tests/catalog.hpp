#pragma once

#include <string>
#include <vector>

#include "proxkit/function.hpp"

namespace testcat {

struct Named {
  std::string name;
  proxkit::ConvexFunction f;
};

inline proxkit::Vector ramp(int n, double a, double b) {
  proxkit::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = a + b * i;
  return v;
}

// Every atom in dimension n.
inline std::vector<Named> atoms(int n) {
  using proxkit::ConvexFunction;
  proxkit::Matrix a = proxkit::Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = 1.0 + i;
  if (n > 1) a(0, 1) = a(1, 0) = 0.5;
  proxkit::Matrix basis = proxkit::Matrix::Zero(n, 1);
  basis(0, 0) = 1.0;
  std::vector<Named> out{
      {"l1", ConvexFunction::l1_norm(n)},
      {"eucl", ConvexFunction::eucl_norm(n)},
      {"quad", ConvexFunction::quad_form(a)},
      {"affine", ConvexFunction::affine(ramp(n, 0.5, -0.3), 0.7)},
      {"iball", ConvexFunction::indicator_ball(ramp(n, 0.2, 0.1), 1.5)},
      {"isub", ConvexFunction::indicator_subspace(basis)},
      {"dball", ConvexFunction::dist_ball(ramp(n, -0.3, 0.2), 0.8)},
      {"sball", ConvexFunction::support_ball(ramp(n, 0.1, 0.1), 0.6)},
  };
  if (n >= 2) {
    out.push_back({"sep", ConvexFunction::separable_sum({
                              proxkit::atom::Block{2.0, ConvexFunction::l1_norm(1), 0},
                              proxkit::atom::Block{0.5, ConvexFunction::eucl_norm(n - 1), 1},
                          })});
  }
  return out;
}

// Atoms with transform stacks.
inline std::vector<Named> transformed(int n) {
  std::vector<Named> out;
  for (const auto& a : atoms(n)) {
    out.push_back({a.name + "|tr", a.f.translated(ramp(n, 0.4, -0.25))});
    out.push_back({a.name + "|sarg", a.f.scaled_arg(1.7)});
    out.push_back({a.name + "|sval", a.f.scaled(0.6)});
    out.push_back({a.name + "|aff", a.f.plus_affine(ramp(n, -0.2, 0.3), 0.25)});
    out.push_back({a.name + "|quad", a.f.plus_quadratic(0.8)});
    out.push_back({a.name + "|env", a.f.moreau_envelope(0.7)});
    out.push_back({a.name + "|stack", a.f.translated(ramp(n, 0.1, 0.1)).scaled_arg(0.5).scaled(2.0).plus_quadratic(0.3)});
  }
  return out;
}

inline std::vector<Named> all(int n) {
  auto out = atoms(n);
  for (auto& t : transformed(n)) out.push_back(std::move(t));
  return out;
}

}  // namespace testcat
