#include "thinspec/problem.hpp"

#include "thinspec/errors.hpp"

namespace thinspec {

Sym2 CoefficientProblem::a(double x1, double y1, double y2) const {
  if (scalar_a) {
    const double s = a11.eval(x1, y1, y2);
    return {s, 0.0, s};
  }
  return {a11.eval(x1, y1, y2), a12.eval(x1, y1, y2), a22.eval(x1, y1, y2)};
}

Sym2 CoefficientProblem::da_dx1(double x1, double y1, double y2, double step) const {
  const Sym2 p = a(x1 + step, y1, y2);
  const Sym2 m = a(x1 - step, y1, y2);
  const double s = 0.5 / step;
  return {(p.a11 - m.a11) * s, (p.a12 - m.a12) * s, (p.a22 - m.a22) * s};
}

double CoefficientProblem::drho_dx1(double x1, double y1, double y2, double step) const {
  return (weight(x1 + step, y1, y2) - weight(x1 - step, y1, y2)) * (0.5 / step);
}

bool CoefficientProblem::x1_independent() const {
  using expr::Variable;
  return !a11.depends_on(Variable::kX1) && !a12.depends_on(Variable::kX1) &&
         !a22.depends_on(Variable::kX1) && !rho.depends_on(Variable::kX1);
}

CoefficientProblem make_scalar_problem(std::string name, std::string_view a,
                                       std::string_view rho) {
  CoefficientProblem p;
  p.name = std::move(name);
  p.scalar_a = true;
  p.a11 = expr::Expr::parse(a);
  p.a22 = p.a11;
  p.a12 = expr::Expr::constant(0.0);
  p.rho = expr::Expr::parse(rho);
  return p;
}

CoefficientProblem make_tensor_problem(std::string name, std::string_view a11,
                                       std::string_view a12, std::string_view a22,
                                       std::string_view rho) {
  CoefficientProblem p;
  p.name = std::move(name);
  p.scalar_a = false;
  p.a11 = expr::Expr::parse(a11);
  p.a12 = expr::Expr::parse(a12);
  p.a22 = expr::Expr::parse(a22);
  p.rho = expr::Expr::parse(rho);
  return p;
}

CoefficientProblem builtin_problem(std::string_view name) {
  CoefficientProblem p;
  if (name == "P_CONST") {
    p = make_scalar_problem("P_CONST", "1", "cos(2*pi*y1) - 0.5");
    p.description = "identity conductivity, x1-independent sign-changing weight";
  } else if (name == "P_LOC") {
    p = make_scalar_problem("P_LOC", "1", "cos(2*pi*y1) - (0.5 + 0.3*x1^2)");
    p.description = "weight average most negative away from x1 = 0; mu has its minimum at 0";
  } else if (name == "P_SHIFT") {
    p = make_scalar_problem("P_SHIFT", "1", "cos(2*pi*(y1 - 0.1*x1)) - (0.5 + 0.3*x1^2)");
    p.description = "P_LOC with the oscillation phase drifting in x1 (nonzero c_eff)";
  } else if (name == "P_OFFSET") {
    p = make_scalar_problem("P_OFFSET", "1", "cos(2*pi*y1) - (0.5 + 0.15*(x1 - 0.5)^2)");
    p.description = "minimum of mu at x1 = 0.5 instead of 0";
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown builtin problem '" + std::string(name) + "'");
  }
  return p;
}

std::vector<std::string> builtin_names() { return {"P_CONST", "P_LOC", "P_SHIFT", "P_OFFSET"}; }

}  // namespace thinspec
