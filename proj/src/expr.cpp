#include "pmc/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "pmc/errors.hpp"

namespace pmc {

namespace {

// Forward-mode value/gradient pair.
struct Dual {
  double v = 0;
  Vec3 g{0, 0, 0};
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.g + b.g}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.g - b.g}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, b.v * a.g + a.v * b.g}; }
Dual neg(Dual a) { return {-a.v, -1.0 * a.g}; }
Dual pow_int(Dual a, int n) {
  Dual r{1, {0, 0, 0}};
  for (int k = 0; k < n; ++k) r = r * a;
  return r;
}

}  // namespace

struct Expr::Node {
  enum Kind { Const, Var, Add, Sub, Mul, Neg, Pow } kind;
  double value = 0;   // Const
  int var = 0;        // Var: 0,1,2 for nu1,nu2,nu3
  int exponent = 0;   // Pow
  std::shared_ptr<const Node> lhs, rhs;

  Dual eval(const Vec3& nu) const {
    switch (kind) {
      case Const:
        return {value, {0, 0, 0}};
      case Var: {
        Dual d;
        d.v = var == 0 ? nu.x : (var == 1 ? nu.y : nu.z);
        if (var == 0) d.g = {1, 0, 0};
        if (var == 1) d.g = {0, 1, 0};
        if (var == 2) d.g = {0, 0, 1};
        return d;
      }
      case Add:
        return lhs->eval(nu) + rhs->eval(nu);
      case Sub:
        return lhs->eval(nu) - rhs->eval(nu);
      case Mul:
        return lhs->eval(nu) * rhs->eval(nu);
      case Neg:
        return neg(lhs->eval(nu));
      case Pow:
        return pow_int(lhs->eval(nu), exponent);
    }
    return {};
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr e = sum();
    skip_space();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  NodePtr sum() {
    NodePtr left = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        left = make(Expr::Node::Add, left, term());
      } else if (accept('-')) {
        left = make(Expr::Node::Sub, left, term());
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = factor();
    for (;;) {
      skip_space();
      if (accept('*')) {
        left = make(Expr::Node::Mul, left, factor());
      } else {
        return left;
      }
    }
  }

  NodePtr factor() {
    skip_space();
    if (accept('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Neg;
      n->lhs = factor();
      return n;
    }
    NodePtr base = atom();
    skip_space();
    if (accept('^')) {
      skip_space();
      int e = 0;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        fail("exponent must be a nonnegative integer");
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        e = 10 * e + (s_[pos_++] - '0');
      if (e > 64) fail("exponent too large");
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Pow;
      n->exponent = e;
      n->lhs = base;
      return n;
    }
    return base;
  }

  NodePtr atom() {
    skip_space();
    if (accept('(')) {
      NodePtr e = sum();
      skip_space();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (pos_ < s_.size() &&
        (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (...) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Const;
      n->value = v;
      return n;
    }
    if (match_word("nu1")) return var(0);
    if (match_word("nu2")) return var(1);
    if (match_word("nu3")) return var(2);
    if (match_word("t")) return var(2);
    fail("expected number, variable (t, nu1, nu2, nu3) or '('");
    return nullptr;
  }

  NodePtr var(int idx) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Var;
    n->var = idx;
    return n;
  }

  static NodePtr make(Expr::Node::Kind k, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool match_word(const std::string& w) {
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    const std::size_t end = pos_ + w.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw SpecError("expression parse error at position " + std::to_string(pos_) + ": " + msg);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.root_ = Parser(text).run();
  return e;
}

double Expr::eval(const Vec3& nu) const { return root_->eval(nu).v; }

Vec3 Expr::grad(const Vec3& nu) const { return root_->eval(nu).g; }

PrescribedH Expr::to_prescribed() const {
  auto root = root_;
  return PrescribedH([root](const Vec3& nu) { return root->eval(nu).v; },
                     [root](const Vec3& nu) { return root->eval(nu).g; });
}

}  // namespace pmc
