#pragma once

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace g2v {

using cplx = std::complex<double>;

enum class NodeKind {
  Constant,    // literal complex value
  NamedConst,  // named constant bound at evaluation time, derivative zero
  Var,         // variable, participates in differentiation
  Sum,
  Prod,
  Pow,  // kids[0] ^ kids[1]; exponent need not be constant
  Exp,
  Log,
  Sqrt,
  Sin,
  Cos,
  Sinh,
  Cosh,
  LambertW0,  // principal branch of w e^w = x
};

class Expr;
using ExprList = std::vector<Expr>;

// Immutable shared expression tree. Cheap to copy, safe to share across threads.
class Expr {
 public:
  struct Node {
    NodeKind kind;
    cplx value{};       // Constant
    std::string name;   // NamedConst / Var
    ExprList kids;
  };

  Expr();  // zero
  static Expr constant(cplx v);
  static Expr constant(double v) { return constant(cplx(v, 0.0)); }
  static Expr rational(long num, long den);
  static Expr named(std::string name);
  static Expr var(std::string name);
  static Expr sum(ExprList terms);
  static Expr prod(ExprList factors);
  static Expr pow(Expr base, Expr exponent);
  static Expr exp(Expr x);
  static Expr log(Expr x);
  static Expr sqrt(Expr x);
  static Expr sin(Expr x);
  static Expr cos(Expr x);
  static Expr sinh(Expr x);
  static Expr cosh(Expr x);
  static Expr lambert_w0(Expr x);

  NodeKind kind() const { return n_->kind; }
  cplx value() const { return n_->value; }
  const std::string& name() const { return n_->name; }
  const ExprList& kids() const { return n_->kids; }

  bool is_zero() const;  // structural zero
  bool is_one() const;
  bool is_constant() const { return n_->kind == NodeKind::Constant; }

  const Node* node() const { return n_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  static Expr make(Node&& n);
  std::shared_ptr<const Node> n_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

struct Assignment {
  std::map<std::string, cplx, std::less<>> values;

  void set(std::string_view name, cplx v) { values.insert_or_assign(std::string(name), v); }
  const cplx* find(std::string_view name) const {
    auto it = values.find(name);
    return it == values.end() ? nullptr : &it->second;
  }
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : EvalError {
  using EvalError::EvalError;
};
struct UnboundSymbolError : EvalError {
  using EvalError::EvalError;
};

// Exact partial derivative with respect to a variable (not a named constant).
Expr diff(const Expr& e, std::string_view var);

// Evaluate with all free symbols bound. Throws DomainError / UnboundSymbolError;
// never returns a non-finite value silently.
cplx eval(const Expr& e, const Assignment& a);

// Evaluation with subtree memoisation across many coefficients of one form.
class EvalContext {
 public:
  explicit EvalContext(const Assignment& a) : a_(a) {}
  cplx operator()(const Expr& e);

 private:
  const Assignment& a_;
  std::map<const Expr::Node*, cplx> memo_;
};

// Free variables and named constants appearing in e.
void collect_symbols(const Expr& e, std::vector<std::string>& out);

// Branch 0 or -1 of the Lambert W function, Halley iteration.
double lambert_w(double x, int branch = 0);

std::string to_string(const Expr& e);
Expr parse_expr(std::string_view text);  // inverse of to_string

}  // namespace g2v
