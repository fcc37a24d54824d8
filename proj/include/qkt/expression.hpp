#pragma once

#include "qkt/errors.hpp"
#include "qkt/tensor.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace qkt {

/// Scalar expression over coordinates x1..xN.
///
///   expr   := term (("+"|"-") term)*
///   term   := unary (("*"|"/") unary)*
///   unary  := "-" unary | factor
///   factor := base ("^" integer)?
///   base   := number | ident | "(" expr ")" | func "(" expr ")"
///   func   := "exp" | "ln" | "sin" | "cos" | "sqrt"
///   ident  := "x" digits
///
/// Unary minus is accepted in addition to the binary operators.
class Expression {
public:
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Exp, Ln, Sin, Cos, Sqrt };

  struct Node {
    Kind kind;
    double value = 0.0;   // Number
    int index = 0;        // Variable (0-based), Pow exponent
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expression() = default;
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  /// Throws DomainError for ln/sqrt of a nonpositive/negative argument,
  /// division by zero, or a variable beyond the point dimension.
  double operator()(const Point& p) const;
  /// Fully parenthesized, numbers with 17 significant digits.
  std::string to_string() const;
  /// Largest variable index used, 1-based; 0 if none.
  int max_variable() const;
  const Node* root() const { return root_.get(); }

  friend bool operator==(const Expression& a, const Expression& b);

private:
  std::shared_ptr<const Node> root_;
};

/// Throws ParseError (syntax, unknown identifier, arity) with the byte offset.
Expression parse_expression(std::string_view text);

}  // namespace qkt
