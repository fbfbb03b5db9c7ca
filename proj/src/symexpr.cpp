#include "g2v/symexpr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace g2v {

namespace {

bool near_int(double x) { return std::abs(x - std::round(x)) < 1e-12; }

bool is_const_val(const Expr& e, double re, double im = 0.0) {
  return e.is_constant() && e.value() == cplx(re, im);
}

}  // namespace

Expr::Expr() : n_(std::make_shared<Node>(Node{NodeKind::Constant, cplx(0.0), {}, {}})) {}

Expr Expr::make(Node&& n) { return Expr(std::make_shared<const Node>(std::move(n))); }

Expr Expr::constant(cplx v) { return make({NodeKind::Constant, v, {}, {}}); }
Expr Expr::rational(long num, long den) {
  return constant(cplx(static_cast<double>(num) / static_cast<double>(den), 0.0));
}
Expr Expr::named(std::string name) { return make({NodeKind::NamedConst, {}, std::move(name), {}}); }
Expr Expr::var(std::string name) { return make({NodeKind::Var, {}, std::move(name), {}}); }

bool Expr::is_zero() const { return is_constant() && value() == cplx(0.0); }
bool Expr::is_one() const { return is_constant() && value() == cplx(1.0); }

Expr Expr::sum(ExprList terms) {
  ExprList flat;
  cplx c = 0.0;
  for (auto& t : terms) {
    if (t.is_constant()) {
      c += t.value();
    } else if (t.kind() == NodeKind::Sum) {
      for (auto& k : t.kids()) {
        if (k.is_constant())
          c += k.value();
        else
          flat.push_back(k);
      }
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (c != cplx(0.0)) flat.push_back(constant(c));
  if (flat.empty()) return constant(cplx(0.0));
  if (flat.size() == 1) return flat[0];
  return make({NodeKind::Sum, {}, {}, std::move(flat)});
}

Expr Expr::prod(ExprList factors) {
  ExprList flat;
  cplx c = 1.0;
  for (auto& f : factors) {
    if (f.is_zero()) return constant(cplx(0.0));
    if (f.is_constant()) {
      c *= f.value();
    } else if (f.kind() == NodeKind::Prod) {
      for (auto& k : f.kids()) {
        if (k.is_constant())
          c *= k.value();
        else
          flat.push_back(k);
      }
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (c == cplx(0.0)) return constant(cplx(0.0));
  if (flat.empty()) return constant(c);
  if (c != cplx(1.0)) flat.insert(flat.begin(), constant(c));
  if (flat.size() == 1) return flat[0];
  return make({NodeKind::Prod, {}, {}, std::move(flat)});
}

Expr Expr::pow(Expr base, Expr exponent) {
  if (exponent.is_zero()) return constant(cplx(1.0));
  if (exponent.is_one()) return base;
  if (base.is_one()) return constant(cplx(1.0));
  if (base.is_constant() && exponent.is_constant()) {
    cplx v = std::pow(base.value(), exponent.value());
    if (std::isfinite(v.real()) && std::isfinite(v.imag())) return constant(v);
  }
  // (x^a)^b = x^(ab) for constant exponents
  if (base.kind() == NodeKind::Pow && base.kids()[1].is_constant() && exponent.is_constant())
    return pow(base.kids()[0], constant(base.kids()[1].value() * exponent.value()));
  return make({NodeKind::Pow, {}, {}, {std::move(base), std::move(exponent)}});
}

#define G2V_UNARY(fname, kindname)                               \
  Expr Expr::fname(Expr x) {                                     \
    return make({NodeKind::kindname, {}, {}, {std::move(x)}});   \
  }
G2V_UNARY(exp, Exp)
G2V_UNARY(log, Log)
G2V_UNARY(sqrt, Sqrt)
G2V_UNARY(sin, Sin)
G2V_UNARY(cos, Cos)
G2V_UNARY(sinh, Sinh)
G2V_UNARY(cosh, Cosh)
G2V_UNARY(lambert_w0, LambertW0)
#undef G2V_UNARY

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) {
  return Expr::sum({a, Expr::prod({Expr::constant(-1.0), b})});
}
Expr operator-(const Expr& a) { return Expr::prod({Expr::constant(-1.0), a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::prod({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  return Expr::prod({a, Expr::pow(b, Expr::constant(-1.0))});
}

// ---------------------------------------------------------------------------
// differentiation

Expr diff(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::NamedConst:
      return Expr::constant(0.0);
    case NodeKind::Var:
      return Expr::constant(e.name() == var ? 1.0 : 0.0);
    case NodeKind::Sum: {
      ExprList terms;
      for (auto& k : e.kids()) terms.push_back(diff(k, var));
      return Expr::sum(std::move(terms));
    }
    case NodeKind::Prod: {
      ExprList terms;
      const auto& ks = e.kids();
      for (size_t i = 0; i < ks.size(); ++i) {
        ExprList fs;
        for (size_t j = 0; j < ks.size(); ++j) fs.push_back(i == j ? diff(ks[j], var) : ks[j]);
        terms.push_back(Expr::prod(std::move(fs)));
      }
      return Expr::sum(std::move(terms));
    }
    case NodeKind::Pow: {
      const Expr& u = e.kids()[0];
      const Expr& a = e.kids()[1];
      Expr da = diff(a, var);
      Expr du = diff(u, var);
      if (da.is_zero()) {
        // a u^(a-1) u'
        return a * Expr::pow(u, a - Expr::constant(1.0)) * du;
      }
      // general: d(u^a) = u^a (a' log u + a u'/u)
      return e * (da * Expr::log(u) + a * du / u);
    }
    case NodeKind::Exp:
      return e * diff(e.kids()[0], var);
    case NodeKind::Log:
      return diff(e.kids()[0], var) / e.kids()[0];
    case NodeKind::Sqrt:
      return diff(e.kids()[0], var) / (Expr::constant(2.0) * e);
    case NodeKind::Sin:
      return Expr::cos(e.kids()[0]) * diff(e.kids()[0], var);
    case NodeKind::Cos:
      return -(Expr::sin(e.kids()[0]) * diff(e.kids()[0], var));
    case NodeKind::Sinh:
      return Expr::cosh(e.kids()[0]) * diff(e.kids()[0], var);
    case NodeKind::Cosh:
      return Expr::sinh(e.kids()[0]) * diff(e.kids()[0], var);
    case NodeKind::LambertW0: {
      // W'(x) = W(x) / (x (1 + W(x)))
      const Expr& x = e.kids()[0];
      return e / (x * (Expr::constant(1.0) + e)) * diff(x, var);
    }
  }
  throw std::logic_error("diff: unhandled node kind");
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

cplx eval_node(const Expr& e, const Assignment& a, EvalContext* memo);

cplx check_finite(cplx v, const Expr& e) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw DomainError("non-finite value at node: " + to_string(e).substr(0, 120));
  return v;
}

cplx eval_kid(const Expr& e, size_t i, const Assignment& a, EvalContext* memo) {
  return memo ? (*memo)(e.kids()[i]) : eval_node(e.kids()[i], a, nullptr);
}

cplx eval_node(const Expr& e, const Assignment& a, EvalContext* memo) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e.value();
    case NodeKind::NamedConst:
    case NodeKind::Var: {
      const cplx* v = a.find(e.name());
      if (!v) throw UnboundSymbolError("unbound symbol '" + e.name() + "'");
      return *v;
    }
    case NodeKind::Sum: {
      cplx s = 0.0;
      for (size_t i = 0; i < e.kids().size(); ++i) s += eval_kid(e, i, a, memo);
      return check_finite(s, e);
    }
    case NodeKind::Prod: {
      cplx p = 1.0;
      for (size_t i = 0; i < e.kids().size(); ++i) p *= eval_kid(e, i, a, memo);
      return check_finite(p, e);
    }
    case NodeKind::Pow: {
      cplx b = eval_kid(e, 0, a, memo);
      cplx x = eval_kid(e, 1, a, memo);
      if (b == cplx(0.0)) {
        if (x.real() > 0 && x.imag() == 0.0) return cplx(0.0);
        throw DomainError("0 raised to non-positive power at node: " + to_string(e).substr(0, 120));
      }
      if (x.imag() == 0.0 && near_int(x.real())) {
        // exact integer powers avoid branch-cut surprises for negative bases
        long n = std::lround(x.real());
        cplx r = 1.0, base = n < 0 ? cplx(1.0) / b : b;
        for (long i = 0, m = std::labs(n); i < m; ++i) r *= base;
        return check_finite(r, e);
      }
      return check_finite(std::pow(b, x), e);
    }
    case NodeKind::Exp:
      return check_finite(std::exp(eval_kid(e, 0, a, memo)), e);
    case NodeKind::Log: {
      cplx x = eval_kid(e, 0, a, memo);
      if (x == cplx(0.0)) throw DomainError("log(0) at node: " + to_string(e).substr(0, 120));
      return check_finite(std::log(x), e);
    }
    case NodeKind::Sqrt:
      return check_finite(std::sqrt(eval_kid(e, 0, a, memo)), e);
    case NodeKind::Sin:
      return check_finite(std::sin(eval_kid(e, 0, a, memo)), e);
    case NodeKind::Cos:
      return check_finite(std::cos(eval_kid(e, 0, a, memo)), e);
    case NodeKind::Sinh:
      return check_finite(std::sinh(eval_kid(e, 0, a, memo)), e);
    case NodeKind::Cosh:
      return check_finite(std::cosh(eval_kid(e, 0, a, memo)), e);
    case NodeKind::LambertW0: {
      cplx x = eval_kid(e, 0, a, memo);
      if (std::abs(x.imag()) > 1e-14 * (1.0 + std::abs(x.real())))
        throw DomainError("lambert W of non-real argument at node: " + to_string(e).substr(0, 120));
      return cplx(lambert_w(x.real(), 0), 0.0);
    }
  }
  throw std::logic_error("eval: unhandled node kind");
}

}  // namespace

cplx eval(const Expr& e, const Assignment& a) { return eval_node(e, a, nullptr); }

cplx EvalContext::operator()(const Expr& e) {
  if (e.is_constant()) return e.value();
  auto it = memo_.find(e.node());
  if (it != memo_.end()) return it->second;
  cplx v = eval_node(e, a_, this);
  memo_.emplace(e.node(), v);
  return v;
}

void collect_symbols(const Expr& e, std::vector<std::string>& out) {
  if (e.kind() == NodeKind::NamedConst || e.kind() == NodeKind::Var) {
    if (std::find(out.begin(), out.end(), e.name()) == out.end()) out.push_back(e.name());
  }
  for (auto& k : e.kids()) collect_symbols(k, out);
}

// ---------------------------------------------------------------------------
// Lambert W, Halley iteration

double lambert_w(double x, int branch) {
  constexpr double kInvE = 0.36787944117144233;  // 1/e
  if (branch != 0 && branch != -1) throw DomainError("lambert_w: branch must be 0 or -1");
  if (x < -kInvE - 1e-14) throw DomainError("lambert_w: argument below -1/e");
  if (branch == -1 && x >= 0.0) throw DomainError("lambert_w branch -1 needs x in [-1/e, 0)");
  if (x == 0.0) return 0.0;
  if (std::abs(x + kInvE) < 1e-15) return -1.0;

  double w;
  if (branch == 0) {
    if (x < -0.25) {
      double p = std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
      w = -1.0 + p - p * p / 3.0;
    } else if (x < 2.0) {
      w = x * (1.0 + x * (-1.0 + x * 1.5)) / (1.0 + x * (x * 0.5 + 1.0));  // Pade-ish seed
      if (!std::isfinite(w)) w = 0.0;
    } else {
      double l = std::log(x), ll = std::log(l);
      w = l - ll + ll / l;
    }
  } else {
    if (x > -0.25) {
      double l = std::log(-x), ll = std::log(-l);
      w = l - ll + ll / l;
    } else {
      double p = std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
      w = -1.0 - p - p * p / 3.0;
    }
  }

  for (int it = 0; it < 60; ++it) {
    double ew = std::exp(w);
    double f = w * ew - x;
    double w1 = w + 1.0;
    double step = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1));
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  double resid = std::abs(w * std::exp(w) - x);
  if (!(resid <= 1e-12 * (1.0 + std::abs(x))))
    throw DomainError("lambert_w failed to converge");
  return w;
}

// ---------------------------------------------------------------------------
// printing / parsing

namespace {

void print_num(std::ostream& os, double v) {
  if (near_int(v) && std::abs(v) < 1e15) {
    os << static_cast<long long>(std::llround(v));
  } else {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  }
}

void print(std::ostream& os, const Expr& e, int parent_prec);

// precedence: sum 1, prod 2, unary-fn/pow atom-ish 3
void print_const(std::ostream& os, cplx v, int parent_prec) {
  if (v.imag() == 0.0) {
    if (v.real() < 0 && parent_prec >= 2) {
      os << '(';
      print_num(os, v.real());
      os << ')';
    } else {
      print_num(os, v.real());
    }
    return;
  }
  os << '(';
  print_num(os, v.real());
  os << (v.imag() < 0 ? "-" : "+");
  print_num(os, std::abs(v.imag()));
  os << "*i)";
}

void print(std::ostream& os, const Expr& e, int parent_prec) {
  switch (e.kind()) {
    case NodeKind::Constant:
      print_const(os, e.value(), parent_prec);
      return;
    case NodeKind::NamedConst:
    case NodeKind::Var:
      os << e.name();
      return;
    case NodeKind::Sum: {
      if (parent_prec > 1) os << '(';
      for (size_t i = 0; i < e.kids().size(); ++i) {
        if (i) os << '+';
        print(os, e.kids()[i], 1);
      }
      if (parent_prec > 1) os << ')';
      return;
    }
    case NodeKind::Prod: {
      if (parent_prec > 2) os << '(';
      for (size_t i = 0; i < e.kids().size(); ++i) {
        if (i) os << '*';
        print(os, e.kids()[i], 2);
      }
      if (parent_prec > 2) os << ')';
      return;
    }
    case NodeKind::Pow: {
      print(os, e.kids()[0], 3);
      os << '^';
      if (e.kids()[1].is_constant() && e.kids()[1].value().imag() == 0.0 &&
          e.kids()[1].value().real() >= 0 && near_int(e.kids()[1].value().real())) {
        print(os, e.kids()[1], 3);
      } else {
        os << '(';
        print(os, e.kids()[1], 0);
        os << ')';
      }
      return;
    }
    case NodeKind::Exp: os << "exp("; break;
    case NodeKind::Log: os << "log("; break;
    case NodeKind::Sqrt: os << "sqrt("; break;
    case NodeKind::Sin: os << "sin("; break;
    case NodeKind::Cos: os << "cos("; break;
    case NodeKind::Sinh: os << "sinh("; break;
    case NodeKind::Cosh: os << "cosh("; break;
    case NodeKind::LambertW0: os << "W0("; break;
  }
  print(os, e.kids()[0], 0);
  os << ')';
}

struct Parser {
  std::string_view s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("parse error at " + std::to_string(pos) + ": " + msg);
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      skip();
      if (eat('+'))
        e = e + term();
      else if (eat('-'))
        e = e - term();
      else
        return e;
    }
  }
  Expr term() {
    Expr e = unary();
    for (;;) {
      skip();
      if (eat('*'))
        e = e * unary();
      else if (eat('/'))
        e = e / unary();
      else
        return e;
    }
  }
  Expr unary() {
    skip();
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  Expr power() {
    Expr b = atom();
    skip();
    if (eat('^')) return Expr::pow(b, unary());
    return b;
  }
  Expr atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    char c = s[pos];
    if (eat('(')) {
      Expr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' || s[pos] == 'e' ||
              s[pos] == 'E' || ((s[pos] == '+' || s[pos] == '-') && pos > start &&
                                (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
        ++pos;
      double v = std::strtod(std::string(s.substr(start, pos - start)).c_str(), nullptr);
      skip();
      if (pos < s.size() && s[pos] == '*' && pos + 1 < s.size() && s[pos + 1] == 'i' &&
          (pos + 2 >= s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + 2])))) {
        pos += 2;
        return Expr::constant(cplx(0.0, v));
      }
      return Expr::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string name(s.substr(start, pos - start));
      skip();
      if (pos < s.size() && s[pos] == '(') {
        ++pos;
        Expr arg = expr();
        if (!eat(')')) fail("expected ')' after function argument");
        if (name == "exp") return Expr::exp(arg);
        if (name == "log") return Expr::log(arg);
        if (name == "sqrt") return Expr::sqrt(arg);
        if (name == "sin") return Expr::sin(arg);
        if (name == "cos") return Expr::cos(arg);
        if (name == "sinh") return Expr::sinh(arg);
        if (name == "cosh") return Expr::cosh(arg);
        if (name == "W0") return Expr::lambert_w0(arg);
        fail("unknown function '" + name + "'");
      }
      if (name == "i") return Expr::constant(cplx(0.0, 1.0));
      // symbols starting with '_' or listed as constants elsewhere are still parsed as vars;
      // the model layer decides which names are constants.
      return Expr::var(std::move(name));
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

Expr parse_expr(std::string_view text) {
  Parser p{text};
  Expr e = p.expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

}  // namespace g2v
