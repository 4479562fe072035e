#pragma once

#include <memory>
#include <string>

#include "pmc/linalg.hpp"
#include "pmc/prescribed.hpp"

namespace pmc {

/// Polynomial expressions in t (= nu3) and nu1, nu2, nu3 with + - * ^ and
/// parentheses, parsed by recursive descent. Evaluation carries the gradient
/// forward, so parsed prescriptions always have closed-form derivatives.
class Expr {
 public:
  static Expr parse(const std::string& text);  // throws SpecError

  double eval(const Vec3& nu) const;
  Vec3 grad(const Vec3& nu) const;

  PrescribedH to_prescribed() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

}  // namespace pmc
