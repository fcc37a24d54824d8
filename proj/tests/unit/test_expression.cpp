#include "qkt/expression.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace qkt;

namespace {

Point at(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

}  // namespace

TEST(Expression, DocumentedExamples) {
  EXPECT_DOUBLE_EQ(parse_expression("exp(x1)")(Point::Zero(4)), 1.0);
  EXPECT_DOUBLE_EQ(parse_expression("1 + 2*x2^2")(at({0, 3, 0, 0})), 19.0);
  EXPECT_DOUBLE_EQ(parse_expression("1/(x1^2+x2^2+x3^2+x4^2)")(at({1, 1, 1, 1})), 0.25);
}

TEST(Expression, AssociativityAndPrecedence) {
  const Point o = Point::Zero(4);
  EXPECT_DOUBLE_EQ(parse_expression("8/4/2")(o), 1.0);
  EXPECT_DOUBLE_EQ(parse_expression("2-3-4")(o), -5.0);
  EXPECT_DOUBLE_EQ(parse_expression("2*3^2")(o), 18.0);
  EXPECT_DOUBLE_EQ(parse_expression("-x1^2")(at({3, 0, 0, 0})), -9.0);
  EXPECT_DOUBLE_EQ(parse_expression("(1+2)*3")(o), 9.0);
  EXPECT_DOUBLE_EQ(parse_expression("x1^0")(at({5, 0, 0, 0})), 1.0);
}

TEST(Expression, FunctionsAndNumbers) {
  const Point p = at({0.5, 2.0, 0.0, 0.0});
  EXPECT_NEAR(parse_expression("ln(x2) + sqrt(4) + sin(x1) + cos(x3)")(p), std::log(2.0) + 2.0 + std::sin(0.5) + 1.0,
              1e-15);
  EXPECT_DOUBLE_EQ(parse_expression("1.5e2")(p), 150.0);
  EXPECT_DOUBLE_EQ(parse_expression(" 0.25 * x2 ")(p), 0.5);
  EXPECT_EQ(parse_expression("x12 + x3").max_variable(), 12);
  EXPECT_EQ(parse_expression("2").max_variable(), 0);
}

TEST(Expression, SyntaxErrorsCarryOffsets) {
  auto offset_of = [](const std::string& text) -> std::size_t {
    try {
      parse_expression(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    return std::string::npos;
  };
  EXPECT_EQ(offset_of("1 + * 2"), 4u);
  EXPECT_EQ(offset_of("(x1"), 3u);
  EXPECT_EQ(offset_of("x1 x2"), 3u);
  EXPECT_EQ(offset_of("x1^y"), 3u);
  EXPECT_NE(offset_of("2^3^2"), std::string::npos);
  EXPECT_NE(offset_of("foo(x1)"), std::string::npos);
  EXPECT_NE(offset_of("y1"), std::string::npos);
  EXPECT_NE(offset_of("exp x1"), std::string::npos);
  EXPECT_NE(offset_of("exp(x1, x2)"), std::string::npos);
  EXPECT_NE(offset_of(""), std::string::npos);
  EXPECT_NE(offset_of("x0"), std::string::npos);
}

TEST(Expression, EvaluationDomainErrors) {
  const Point p = at({-1.0, 0.0, 0.0, 0.0});
  EXPECT_THROW(parse_expression("ln(x1)")(p), DomainError);
  EXPECT_THROW(parse_expression("sqrt(x1)")(p), DomainError);
  EXPECT_THROW(parse_expression("1/x2")(p), DomainError);
  EXPECT_THROW(parse_expression("x5")(p), DomainError);
}

TEST(Expression, PrintParseRoundTrip) {
  const std::vector<std::string> corpus{
      "1", "x1", "-x1", "x1+x2", "x1-x2-x3", "x1*x2/x3", "x1^2", "x1^10", "2^0", "exp(x1)",
      "ln(1+x1^2)", "sin(x2)", "cos(x3)*sin(x4)", "sqrt(2+x1)", "1/(x1^2+x2^2+x3^2+x4^2)", "1 + 2*x2^2",
      "0.1", "1e-3", "3.141592653589793", "-(x1+x2)", "--x1", "-2^2", "(x1)", "((x1))", "x1*(x2+x3)",
      "(x1+x2)*(x3-x4)", "exp(-x1^2-x2^2)", "ln(exp(x1))", "x1/x2/x3", "x1-(x2-x3)", "sin(cos(x1))",
      "1+x1+x1^2/2+x1^3/6", "x5*x6+x7*x8", "x12", "2*x1-3*x2+4*x3-5*x4", "sqrt(x1^2+x2^2+1)",
      "exp(x1)*cos(x2)", "(1+x1^2)^3", "1/(1+exp(-x1))", "0.5*ln(1+x3^2)", "x1*x1*x1", "-x1*-x2",
      "cos(0)", "1e10*x1", "123456789.125", "7/3", "x2^2-x1^2", "exp(sin(x1)+cos(x2))",
      "sqrt(sqrt(1+x4^2))", "(x1+1)^2/(x2^2+1)"};
  ASSERT_EQ(corpus.size(), 50u);
  for (const std::string& text : corpus) {
    const Expression e = parse_expression(text);
    const std::string printed = e.to_string();
    const Expression again = parse_expression(printed);
    EXPECT_EQ(again.to_string(), printed) << text;
    EXPECT_TRUE(again == e) << text;
  }
}

TEST(Expression, StructuralEquality) {
  EXPECT_TRUE(parse_expression("x1+2") == parse_expression("(x1)+(2)"));
  EXPECT_FALSE(parse_expression("x1+2") == parse_expression("2+x1"));
  EXPECT_FALSE(parse_expression("x1^2") == parse_expression("x1^3"));
}
