#include "qkt/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qkt {

namespace {

using Node = Expression::Node;
using Kind = Expression::Kind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Kind k, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

struct FunctionName {
  std::string_view name;
  Kind kind;
};
constexpr FunctionName kFunctions[] = {
    {"exp", Kind::Exp}, {"ln", Kind::Ln}, {"sin", Kind::Sin}, {"cos", Kind::Cos}, {"sqrt", Kind::Sqrt}};

class Parser {
public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+'))
        lhs = make(Kind::Add, lhs, term());
      else if (accept('-'))
        lhs = make(Kind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*'))
        lhs = make(Kind::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Kind::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, unary());
    return factor();
  }

  NodePtr factor() {
    NodePtr b = base();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) throw ParseError("expected integer exponent", start);
      if (pos_ - start > 6) throw ParseError("exponent too large", start);
      auto n = std::make_shared<Node>();
      n->kind = Kind::Pow;
      n->lhs = b;
      n->index = std::stoi(std::string(s_.substr(start, pos_ - start)));
      return n;
    }
    return b;
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t d0 = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ - d0;
    };
    std::size_t count = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) throw ParseError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      const std::size_t epos = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent in number", epos);
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = std::strtod(std::string(s_.substr(start, pos_ - start)).c_str(), nullptr);
    if (!std::isfinite(n->value)) throw ParseError("number out of range", start);
    return n;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view word = s_.substr(start, pos_ - start);
      for (const auto& f : kFunctions) {
        if (word != f.name) continue;
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '(')
          throw ParseError("function '" + std::string(word) + "' expects one argument", pos_);
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ')')
          throw ParseError("function '" + std::string(word) + "' expects one argument, got none", pos_);
        NodePtr arg = expr();
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',')
          throw ParseError("function '" + std::string(word) + "' expects one argument, got more", pos_);
        expect(')');
        return make(f.kind, arg);
      }
      if (word.size() >= 2 && word[0] == 'x' &&
          word.substr(1).find_first_not_of("0123456789") == std::string_view::npos && word[1] != '0') {
        if (word.size() > 6) throw ParseError("unknown identifier '" + std::string(word) + "'", start);
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->index = std::stoi(std::string(word.substr(1))) - 1;
        return n;
      }
      throw ParseError("unknown identifier '" + std::string(word) + "'", start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, const Point& p) {
  switch (n.kind) {
    case Kind::Number:
      return n.value;
    case Kind::Variable:
      if (n.index >= p.size())
        throw DomainError("variable x" + std::to_string(n.index + 1) + " exceeds the point dimension");
      return p(n.index);
    case Kind::Negate:
      return -eval(*n.lhs, p);
    case Kind::Add:
      return eval(*n.lhs, p) + eval(*n.rhs, p);
    case Kind::Sub:
      return eval(*n.lhs, p) - eval(*n.rhs, p);
    case Kind::Mul:
      return eval(*n.lhs, p) * eval(*n.rhs, p);
    case Kind::Div: {
      const double d = eval(*n.rhs, p);
      if (d == 0.0) throw DomainError("division by zero");
      return eval(*n.lhs, p) / d;
    }
    case Kind::Pow: {
      const double b = eval(*n.lhs, p);
      double r = 1.0;
      for (int i = 0; i < n.index; ++i) r *= b;
      return r;
    }
    case Kind::Exp:
      return std::exp(eval(*n.lhs, p));
    case Kind::Ln: {
      const double a = eval(*n.lhs, p);
      if (!(a > 0.0)) throw DomainError("ln of a nonpositive number");
      return std::log(a);
    }
    case Kind::Sin:
      return std::sin(eval(*n.lhs, p));
    case Kind::Cos:
      return std::cos(eval(*n.lhs, p));
    case Kind::Sqrt: {
      const double a = eval(*n.lhs, p);
      if (a < 0.0) throw DomainError("sqrt of a negative number");
      return std::sqrt(a);
    }
  }
  return 0.0;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print(const Node& n) {
  auto bin = [&](const char* op) { return "(" + print(*n.lhs) + op + print(*n.rhs) + ")"; };
  auto fn = [&](const char* name) { return std::string(name) + "(" + print(*n.lhs) + ")"; };
  switch (n.kind) {
    case Kind::Number:
      return n.value < 0 ? "(-" + format_number(-n.value) + ")" : format_number(n.value);
    case Kind::Variable:
      return "x" + std::to_string(n.index + 1);
    case Kind::Negate:
      return "(-" + print(*n.lhs) + ")";
    case Kind::Add:
      return bin("+");
    case Kind::Sub:
      return bin("-");
    case Kind::Mul:
      return bin("*");
    case Kind::Div:
      return bin("/");
    case Kind::Pow:
      return "(" + print(*n.lhs) + "^" + std::to_string(n.index) + ")";
    case Kind::Exp:
      return fn("exp");
    case Kind::Ln:
      return fn("ln");
    case Kind::Sin:
      return fn("sin");
    case Kind::Cos:
      return fn("cos");
    case Kind::Sqrt:
      return fn("sqrt");
  }
  return {};
}

int max_var(const Node* n) {
  if (!n) return 0;
  int m = n->kind == Kind::Variable ? n->index + 1 : 0;
  return std::max({m, max_var(n->lhs.get()), max_var(n->rhs.get())});
}

bool equal(const Node* a, const Node* b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  if (a->kind == Kind::Number && a->value != b->value) return false;
  if ((a->kind == Kind::Variable || a->kind == Kind::Pow) && a->index != b->index) return false;
  return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
}

}  // namespace

double Expression::operator()(const Point& p) const {
  if (!root_) throw DomainError("empty expression");
  return eval(*root_, p);
}

std::string Expression::to_string() const { return root_ ? print(*root_) : std::string(); }

int Expression::max_variable() const { return max_var(root_.get()); }

bool operator==(const Expression& a, const Expression& b) { return equal(a.root(), b.root()); }

Expression parse_expression(std::string_view text) { return Expression(Parser(text).parse()); }

}  // namespace qkt
