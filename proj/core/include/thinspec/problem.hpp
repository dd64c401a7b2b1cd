#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "thinspec/expr.hpp"

namespace thinspec {

// Symmetric 2x2 tensor stored as (a11, a12, a22).
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
};

// Coefficients a(x1, y) and rho(x1, y), y in the unit cell, periodic in y1.
struct CoefficientProblem {
  std::string name;
  std::string description;
  bool scalar_a = true;
  expr::Expr a11;  // the scalar a when scalar_a
  expr::Expr a12;
  expr::Expr a22;
  expr::Expr rho;

  Sym2 a(double x1, double y1, double y2) const;
  double weight(double x1, double y1, double y2) const { return rho.eval(x1, y1, y2); }

  // Central differences in x1 of the coefficient expressions.
  Sym2 da_dx1(double x1, double y1, double y2, double step = 1e-6) const;
  double drho_dx1(double x1, double y1, double y2, double step = 1e-6) const;

  // True when neither a nor rho depends on x1.
  bool x1_independent() const;
};

CoefficientProblem make_scalar_problem(std::string name, std::string_view a,
                                       std::string_view rho);
CoefficientProblem make_tensor_problem(std::string name, std::string_view a11,
                                       std::string_view a12, std::string_view a22,
                                       std::string_view rho);

// Shipped problems:
//   P_CONST  a = 1, rho = cos(2 pi y1) - 0.5
//   P_LOC    a = 1, rho = cos(2 pi y1) - (0.5 + 0.3 x1^2)     minimum of mu at 0
//   P_SHIFT  a = 1, rho = cos(2 pi (y1 - 0.1 x1)) - (0.5 + 0.3 x1^2)
//   P_OFFSET a = 1, rho = cos(2 pi y1) - (0.5 + 0.15 (x1 - 0.5)^2)  minimum at 0.5
CoefficientProblem builtin_problem(std::string_view name);
std::vector<std::string> builtin_names();

}  // namespace thinspec
