#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace thinspec::expr {

// Coefficient mini-language over the slow variable x1 and the fast cell
// variables y1, y2:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          (right-associative)
//   primary := number | x1 | y1 | y2 | pi | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt | abs
//
// so '^' binds tighter than unary minus: "-2^2" is -4.

enum class Variable { kX1, kY1, kY2 };
enum class Function { kSin, kCos, kExp, kSqrt, kAbs };

struct Node {
  enum class Kind { kConstant, kVariable, kNegate, kBinary, kCall };

  Kind kind = Kind::kConstant;
  double value = 0.0;          // kConstant
  Variable variable{};         // kVariable
  char op = 0;                 // kBinary: one of + - * / ^
  Function function{};         // kCall
  bool named_pi = false;       // kConstant spelled "pi"
  std::vector<std::shared_ptr<const Node>> children;
};

// Immutable expression tree. Copies share the tree; evaluation is pure and
// may be called concurrently.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr parse(std::string_view source);
  static Expr constant(double value);

  // Throws Error{kDivisionByZero} or Error{kDomain} (sqrt or fractional
  // power of a negative number, or any other non-finite result).
  double eval(double x1, double y1, double y2) const;

  bool depends_on(Variable v) const;

  // Fully parenthesised round-trippable text.
  std::string to_string() const;

  const Node& root() const { return *root_; }

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace thinspec::expr
