#include "thinspec/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "thinspec/errors.hpp"

namespace thinspec::expr {
namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_constant(double v, bool named_pi = false) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kConstant;
  n->value = v;
  n->named_pi = named_pi;
  return n;
}

NodePtr make_variable(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kVariable;
  n->variable = v;
  return n;
}

NodePtr make_negate(NodePtr child) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kNegate;
  n->children.push_back(std::move(child));
  return n;
}

NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kBinary;
  n->op = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return n;
}

NodePtr make_call(Function f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::kCall;
  n->function = f;
  n->children.push_back(std::move(arg));
  return n;
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ == src_.size()) throw SyntaxError("empty expression", pos_);
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) {
      throw SyntaxError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) {
        throw SyntaxError(std::string("expected '") + c + "' but input ended", pos_);
      }
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary('+', lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_binary('-', lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary('*', lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary('/', lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_negate(parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_binary('^', base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && is_digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      throw SyntaxError("malformed number", start);
    }
    return make_constant(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x1") return make_variable(Variable::kX1);
    if (name == "y1") return make_variable(Variable::kY1);
    if (name == "y2") return make_variable(Variable::kY2);
    if (name == "pi") return make_constant(std::numbers::pi, true);

    Function f{};
    if (name == "sin") {
      f = Function::kSin;
    } else if (name == "cos") {
      f = Function::kCos;
    } else if (name == "exp") {
      f = Function::kExp;
    } else if (name == "sqrt") {
      f = Function::kSqrt;
    } else if (name == "abs") {
      f = Function::kAbs;
    } else {
      throw Error(ErrorKind::kUnknownIdentifier,
                  "unknown identifier '" + std::string(name) + "' at byte " +
                      std::to_string(start));
    }
    expect('(');
    NodePtr arg = parse_expr();
    expect(')');
    return make_call(f, arg);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

double checked(double v) {
  if (std::isnan(v)) throw Error(ErrorKind::kDomain, "expression domain error");
  if (!std::isfinite(v)) throw Error(ErrorKind::kNonFinite, "expression overflow");
  return v;
}

double eval_node(const Node& n, double x1, double y1, double y2) {
  switch (n.kind) {
    case Node::Kind::kConstant:
      return n.value;
    case Node::Kind::kVariable:
      switch (n.variable) {
        case Variable::kX1: return x1;
        case Variable::kY1: return y1;
        case Variable::kY2: return y2;
      }
      break;
    case Node::Kind::kNegate:
      return -eval_node(*n.children[0], x1, y1, y2);
    case Node::Kind::kBinary: {
      const double a = eval_node(*n.children[0], x1, y1, y2);
      const double b = eval_node(*n.children[1], x1, y1, y2);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/':
          if (b == 0.0) throw Error(ErrorKind::kDivisionByZero, "division by zero");
          return checked(a / b);
        case '^':
          if (a < 0.0 && b != std::trunc(b)) {
            throw Error(ErrorKind::kDomain, "fractional power of a negative number");
          }
          if (a == 0.0 && b < 0.0) {
            throw Error(ErrorKind::kDivisionByZero, "zero raised to a negative power");
          }
          return checked(std::pow(a, b));
      }
      break;
    }
    case Node::Kind::kCall: {
      const double a = eval_node(*n.children[0], x1, y1, y2);
      switch (n.function) {
        case Function::kSin: return std::sin(a);
        case Function::kCos: return std::cos(a);
        case Function::kExp: return checked(std::exp(a));
        case Function::kSqrt:
          if (a < 0.0) throw Error(ErrorKind::kDomain, "sqrt of a negative number");
          return std::sqrt(a);
        case Function::kAbs: return std::abs(a);
      }
      break;
    }
  }
  throw Error(ErrorKind::kInternal, "corrupt expression node");
}

bool node_depends_on(const Node& n, Variable v) {
  if (n.kind == Node::Kind::kVariable) return n.variable == v;
  for (const auto& c : n.children) {
    if (node_depends_on(*c, v)) return true;
  }
  return false;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::kConstant:
      out += n.named_pi ? "pi" : format_number(n.value);
      return;
    case Node::Kind::kVariable:
      out += n.variable == Variable::kX1 ? "x1" : n.variable == Variable::kY1 ? "y1" : "y2";
      return;
    case Node::Kind::kNegate:
      out += "(-";
      print_node(*n.children[0], out);
      out += ")";
      return;
    case Node::Kind::kBinary:
      out += "(";
      print_node(*n.children[0], out);
      out += ' ';
      out += n.op;
      out += ' ';
      print_node(*n.children[1], out);
      out += ")";
      return;
    case Node::Kind::kCall: {
      static constexpr const char* names[] = {"sin", "cos", "exp", "sqrt", "abs"};
      out += names[static_cast<int>(n.function)];
      out += "(";
      print_node(*n.children[0], out);
      out += ")";
      return;
    }
  }
}

}  // namespace

Expr::Expr() : root_(make_constant(0.0)) {}

Expr Expr::parse(std::string_view source) { return Expr(Parser(source).parse()); }

Expr Expr::constant(double value) { return Expr(make_constant(value)); }

double Expr::eval(double x1, double y1, double y2) const {
  return eval_node(*root_, x1, y1, y2);
}

bool Expr::depends_on(Variable v) const { return node_depends_on(*root_, v); }

std::string Expr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace thinspec::expr
