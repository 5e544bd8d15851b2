/**
 * @file expression.hpp
 * @brief Small arithmetic expression language with symbolic differentiation.
 *
 * Grammar: + − * / ^ (right-associative, binds tighter than unary minus),
 * parentheses, numbers, the constants pi and e, and the functions
 * sin cos exp ln sqrt. Variables are restricted to a caller-supplied list so
 * that typos are rejected at parse time.
 */
#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vofc/errors.hpp"

namespace vofc {

class Expression {
 public:
  enum class Kind { constant, variable, neg, add, sub, mul, div, pow, sin, cos, exp, ln, sqrt };

  /// Parses `text`; identifiers other than `variables`, functions and constants are errors.
  static Expression parse(std::string_view text, std::vector<std::string> variables) {
    Parser p{text, variables};
    NodePtr root = p.parse();
    return Expression(std::move(root), std::move(variables));
  }

  static Expression constant(double c, std::vector<std::string> variables = {}) {
    return Expression(make_const(c), std::move(variables));
  }

  /// Values in the order of variables().
  double operator()(std::span<const double> values) const { return eval(*root_, values); }
  double operator()(std::initializer_list<double> values) const {
    return eval(*root_, std::span<const double>(values.begin(), values.size()));
  }

  const std::vector<std::string>& variables() const noexcept { return vars_; }

  /// ∂/∂var, simplified by constant folding.
  Expression derivative(std::string_view var) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == var) return Expression(diff(root_, static_cast<int>(i)), vars_);
    throw ConfigurationError("derivative: unknown variable '" + std::string(var) + "'");
  }

  bool is_constant() const noexcept { return root_->kind == Kind::constant; }
  std::string to_string() const { return print(*root_); }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    Kind kind;
    double value = 0.0;  // constant
    int index = -1;      // variable
    NodePtr a, b;
  };

  Expression(NodePtr root, std::vector<std::string> vars) : root_(std::move(root)), vars_(std::move(vars)) {}

  static NodePtr make_const(double c) { return std::make_shared<const Node>(Node{Kind::constant, c, -1, {}, {}}); }
  static NodePtr make_var(int i) { return std::make_shared<const Node>(Node{Kind::variable, 0.0, i, {}, {}}); }
  static bool is_const(const NodePtr& n, double v) { return n->kind == Kind::constant && n->value == v; }

  static NodePtr make(Kind k, NodePtr a, NodePtr b = nullptr) {
    const bool ca = a->kind == Kind::constant;
    const bool cb = !b || b->kind == Kind::constant;
    if (ca && cb) {
      Node tmp{k, 0.0, -1, a, b};
      return make_const(eval(tmp, {}));
    }
    switch (k) {
      case Kind::add:
        if (is_const(a, 0.0)) return b;
        if (is_const(b, 0.0)) return a;
        break;
      case Kind::sub:
        if (is_const(b, 0.0)) return a;
        if (is_const(a, 0.0)) return make(Kind::neg, b);
        break;
      case Kind::mul:
        if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
        if (is_const(a, 1.0)) return b;
        if (is_const(b, 1.0)) return a;
        break;
      case Kind::div:
        if (is_const(a, 0.0)) return make_const(0.0);
        if (is_const(b, 1.0)) return a;
        break;
      case Kind::pow:
        if (is_const(b, 1.0)) return a;
        if (is_const(b, 0.0)) return make_const(1.0);
        break;
      case Kind::neg:
        if (a->kind == Kind::neg) return a->a;
        break;
      default: break;
    }
    return std::make_shared<const Node>(Node{k, 0.0, -1, std::move(a), std::move(b)});
  }

  static double eval(const Node& n, std::span<const double> v) {
    switch (n.kind) {
      case Kind::constant: return n.value;
      case Kind::variable: return v[static_cast<std::size_t>(n.index)];
      case Kind::neg: return -eval(*n.a, v);
      case Kind::add: return eval(*n.a, v) + eval(*n.b, v);
      case Kind::sub: return eval(*n.a, v) - eval(*n.b, v);
      case Kind::mul: return eval(*n.a, v) * eval(*n.b, v);
      case Kind::div: return eval(*n.a, v) / eval(*n.b, v);
      case Kind::pow: return std::pow(eval(*n.a, v), eval(*n.b, v));
      case Kind::sin: return std::sin(eval(*n.a, v));
      case Kind::cos: return std::cos(eval(*n.a, v));
      case Kind::exp: return std::exp(eval(*n.a, v));
      case Kind::ln: return std::log(eval(*n.a, v));
      case Kind::sqrt: return std::sqrt(eval(*n.a, v));
    }
    return std::nan("");
  }

  static bool depends_on(const NodePtr& n, int i) {
    if (!n) return false;
    if (n->kind == Kind::variable) return n->index == i;
    return depends_on(n->a, i) || depends_on(n->b, i);
  }

  static NodePtr diff(const NodePtr& n, int i) {
    if (!depends_on(n, i)) return make_const(0.0);
    const NodePtr& a = n->a;
    const NodePtr& b = n->b;
    switch (n->kind) {
      case Kind::constant: return make_const(0.0);
      case Kind::variable: return make_const(1.0);
      case Kind::neg: return make(Kind::neg, diff(a, i));
      case Kind::add: return make(Kind::add, diff(a, i), diff(b, i));
      case Kind::sub: return make(Kind::sub, diff(a, i), diff(b, i));
      case Kind::mul: return make(Kind::add, make(Kind::mul, diff(a, i), b), make(Kind::mul, a, diff(b, i)));
      case Kind::div:
        return make(Kind::div, make(Kind::sub, make(Kind::mul, diff(a, i), b), make(Kind::mul, a, diff(b, i))),
                    make(Kind::mul, b, b));
      case Kind::pow:
        if (!depends_on(b, i)) {
          // b·a^(b−1)·a′
          return make(Kind::mul, make(Kind::mul, b, make(Kind::pow, a, make(Kind::sub, b, make_const(1.0)))),
                      diff(a, i));
        }
        // a^b·(b′·ln a + b·a′/a)
        return make(Kind::mul, n,
                    make(Kind::add, make(Kind::mul, diff(b, i), make(Kind::ln, a)),
                         make(Kind::div, make(Kind::mul, b, diff(a, i)), a)));
      case Kind::sin: return make(Kind::mul, make(Kind::cos, a), diff(a, i));
      case Kind::cos: return make(Kind::neg, make(Kind::mul, make(Kind::sin, a), diff(a, i)));
      case Kind::exp: return make(Kind::mul, n, diff(a, i));
      case Kind::ln: return make(Kind::div, diff(a, i), a);
      case Kind::sqrt: return make(Kind::div, diff(a, i), make(Kind::mul, make_const(2.0), n));
    }
    return make_const(0.0);
  }

  std::string print(const Node& n) const {
    std::ostringstream os;
    os.precision(17);
    switch (n.kind) {
      case Kind::constant: os << n.value; break;
      case Kind::variable: os << vars_[static_cast<std::size_t>(n.index)]; break;
      case Kind::neg: os << "(-" << print(*n.a) << ")"; break;
      case Kind::add: os << "(" << print(*n.a) << " + " << print(*n.b) << ")"; break;
      case Kind::sub: os << "(" << print(*n.a) << " - " << print(*n.b) << ")"; break;
      case Kind::mul: os << "(" << print(*n.a) << " * " << print(*n.b) << ")"; break;
      case Kind::div: os << "(" << print(*n.a) << " / " << print(*n.b) << ")"; break;
      case Kind::pow: os << "(" << print(*n.a) << " ^ " << print(*n.b) << ")"; break;
      case Kind::sin: os << "sin(" << print(*n.a) << ")"; break;
      case Kind::cos: os << "cos(" << print(*n.a) << ")"; break;
      case Kind::exp: os << "exp(" << print(*n.a) << ")"; break;
      case Kind::ln: os << "ln(" << print(*n.a) << ")"; break;
      case Kind::sqrt: os << "sqrt(" << print(*n.a) << ")"; break;
    }
    return os.str();
  }

  class Parser {
   public:
    Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

    NodePtr parse() {
      NodePtr n = expr();
      skip_space();
      if (pos_ < text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
      return n;
    }

   private:
    [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
    [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
      int line = 1, col = 1;
      for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
        if (text_[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      throw ParseError(what, line, col);
    }

    void skip_space() {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == c) {
        ++pos_;
        return true;
      }
      return false;
    }

    NodePtr expr() {
      NodePtr n = term();
      for (;;) {
        if (accept('+')) n = make(Kind::add, n, term());
        else if (accept('-')) n = make(Kind::sub, n, term());
        else return n;
      }
    }

    NodePtr term() {
      NodePtr n = unary();
      for (;;) {
        if (accept('*')) n = make(Kind::mul, n, unary());
        else if (accept('/')) n = make(Kind::div, n, unary());
        else return n;
      }
    }

    NodePtr unary() {
      if (accept('-')) return make(Kind::neg, unary());
      if (accept('+')) return unary();
      return power();
    }

    NodePtr power() {
      NodePtr base = primary();
      if (accept('^')) return make(Kind::pow, base, unary());
      return base;
    }

    NodePtr primary() {
      skip_space();
      if (pos_ >= text_.size()) fail("unexpected end of expression");
      const char c = text_[pos_];
      if (accept('(')) {
        NodePtr n = expr();
        if (!accept(')')) fail("expected ')'");
        return n;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
      fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr number() {
      const std::size_t start = pos_;
      double v = 0.0;
      const auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
      if (ec != std::errc()) fail_at("malformed number", start);
      pos_ = static_cast<std::size_t>(end - text_.data());
      return make_const(v);
    }

    NodePtr identifier() {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      static const std::pair<const char*, Kind> kFunctions[] = {
          {"sin", Kind::sin}, {"cos", Kind::cos}, {"exp", Kind::exp}, {"ln", Kind::ln}, {"sqrt", Kind::sqrt}};
      for (const auto& [fname, kind] : kFunctions) {
        if (name == fname) {
          if (!accept('(')) fail("expected '(' after function " + name);
          NodePtr arg = expr();
          if (!accept(')')) fail("expected ')'");
          return make(kind, arg);
        }
      }
      if (name == "pi") return make_const(std::numbers::pi);
      if (name == "e") return make_const(std::numbers::e);
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return make_var(static_cast<int>(i));
      std::string allowed;
      for (const auto& v : vars_) allowed += (allowed.empty() ? "" : ", ") + v;
      fail_at("unknown identifier '" + name + "' (allowed variables: " + (allowed.empty() ? "none" : allowed) + ")",
              start);
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
  };

  NodePtr root_;
  std::vector<std::string> vars_;
};

}  // namespace vofc
