#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "thinspec/errors.hpp"
#include "thinspec/expr.hpp"

using thinspec::Error;
using thinspec::ErrorKind;
using thinspec::expr::Expr;
using thinspec::expr::Variable;

namespace {

double eval(const char* s, double x1 = 0.0, double y1 = 0.0, double y2 = 0.0) {
  return Expr::parse(s).eval(x1, y1, y2);
}

ErrorKind kind_of(const char* s, double x1 = 0.0, double y1 = 0.0, double y2 = 0.0) {
  try {
    eval(s, x1, y1, y2);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << s;
  return ErrorKind::kInternal;
}

}  // namespace

TEST(Expr, DocumentedExamples) {
  EXPECT_DOUBLE_EQ(eval("cos(2*pi*y1) - 0.5", 0, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(eval("x1^2", 3), 9.0);
  EXPECT_NEAR(eval("1/(2+cos(2*pi*y1))", 0, 0.25, 0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(eval("y1*y2", 7, 0.5, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(eval("exp(0)"), 1.0);
  EXPECT_DOUBLE_EQ(eval("abs(-2)^3"), 8.0);
}

TEST(Expr, GoldenValues) {
  const double pi = std::numbers::pi;
  struct Case {
    const char* src;
    double x1, y1, y2, expected;
  };
  const Case cases[] = {
      {"1 + 2 * 3", 0, 0, 0, 7.0},
      {"(1 + 2) * 3", 0, 0, 0, 9.0},
      {"2^3^2", 0, 0, 0, 512.0},
      {"-2^2", 0, 0, 0, -4.0},
      {"(-2)^2", 0, 0, 0, 4.0},
      {"2^-1", 0, 0, 0, 0.5},
      {"10 - 4 - 3", 0, 0, 0, 3.0},
      {"24 / 4 / 3", 0, 0, 0, 2.0},
      {"pi", 0, 0, 0, pi},
      {"sin(pi/6)", 0, 0, 0, std::sin(pi / 6)},
      {"cos(2*pi*y1)", 0, 0.125, 0, std::cos(2 * pi * 0.125)},
      {"sqrt(16)", 0, 0, 0, 4.0},
      {"sqrt(x1)", 2, 0, 0, std::sqrt(2.0)},
      {"exp(x1)", 1, 0, 0, std::exp(1.0)},
      {"abs(y1 - y2)", 0, 0.25, 0.75, 0.5},
      {"x1*y1 + y2", 2, 3, 4, 10.0},
      {"1e-3 * 2.5E2", 0, 0, 0, 0.25},
      {"0.5 + 0.3*x1^2", 0.5, 0, 0, 0.575},
      {"--3", 0, 0, 0, 3.0},
      {"2 * -x1", 1.5, 0, 0, -3.0},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(eval(c.src, c.x1, c.y1, c.y2), c.expected, 1e-15 * std::max(1.0, std::abs(c.expected)))
        << c.src;
  }
}

TEST(Expr, WhitespaceInsensitive) {
  EXPECT_EQ(eval(" 1+ 2 *x1 ", 3), eval("1+2*x1", 3));
  EXPECT_EQ(eval("\tcos ( 2 * pi * y1 )\n", 0, 0.3), eval("cos(2*pi*y1)", 0, 0.3));
}

TEST(Expr, PrintParseRoundTrip) {
  const char* sources[] = {
      "cos(2*pi*(y1 - 0.1*x1)) - (0.5 + 0.3*x1^2)",
      "1/(2+cos(2*pi*y1))",
      "-x1^2 + abs(y2 - 0.5)^3 * exp(-y1)",
      "2^-x1^2 / (1 + sqrt(y2 + 1))",
      "sin(y1)*sin(y2) - -x1",
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> v(0.0, 1.0);
  for (const char* s : sources) {
    const Expr a = Expr::parse(s);
    const Expr b = Expr::parse(a.to_string());
    EXPECT_EQ(b.to_string(), a.to_string());
    for (int i = 0; i < 100; ++i) {
      const double x1 = u(rng);
      const double y1 = v(rng);
      const double y2 = v(rng);
      EXPECT_NEAR(a.eval(x1, y1, y2), b.eval(x1, y1, y2), 1e-15) << s;
    }
  }
}

TEST(Expr, SyntaxErrorsReportByteOffset) {
  try {
    Expr::parse("1 + * 2");
    FAIL();
  } catch (const thinspec::SyntaxError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSyntax);
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(Expr::parse(""), thinspec::SyntaxError);
  EXPECT_THROW(Expr::parse("(1 + 2"), thinspec::SyntaxError);
  EXPECT_THROW(Expr::parse("1 2"), thinspec::SyntaxError);
  EXPECT_THROW(Expr::parse("cos 2"), thinspec::SyntaxError);
}

TEST(Expr, UnknownIdentifier) {
  try {
    Expr::parse("x2 + 1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownIdentifier);
  }
  try {
    Expr::parse("tan(y1)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownIdentifier);
  }
}

TEST(Expr, EvaluationErrors) {
  EXPECT_EQ(kind_of("1/y1", 0, 0, 0), ErrorKind::kDivisionByZero);
  EXPECT_EQ(kind_of("sqrt(x1)", -1), ErrorKind::kDomain);
  EXPECT_EQ(kind_of("x1^0.5", -1), ErrorKind::kDomain);
  EXPECT_EQ(kind_of("exp(1000)"), ErrorKind::kNonFinite);
  EXPECT_DOUBLE_EQ(eval("x1^3", -2), -8.0);
}

TEST(Expr, Dependencies) {
  const Expr e = Expr::parse("cos(2*pi*y1) - 0.5");
  EXPECT_FALSE(e.depends_on(Variable::kX1));
  EXPECT_TRUE(e.depends_on(Variable::kY1));
  EXPECT_FALSE(e.depends_on(Variable::kY2));
  EXPECT_TRUE(Expr::parse("x1 * 0 + y2").depends_on(Variable::kX1));
}

TEST(Expr, ConcurrentEvaluationIsDeterministic) {
  const Expr e = Expr::parse("cos(2*pi*(y1 - 0.1*x1)) - (0.5 + 0.3*x1^2)");
  std::vector<double> results(4, 0.0);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      double acc = 0.0;
      for (int i = 0; i < 2000; ++i) acc += e.eval(i * 1e-3 - 1.0, i * 7e-4, 0.3);
      results[t] = acc;
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) EXPECT_EQ(results[t], results[0]);
}
