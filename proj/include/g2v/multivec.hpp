#pragma once

#include <array>
#include <tuple>
#include <utility>

#include "g2v/multiindex.hpp"
#include "g2v/symexpr.hpp"

namespace g2v {

// Pointwise exterior algebra on R^7 in an orthonormal coframe.
// Coefficients are dense over strictly increasing multi-indices in lex order.
struct NumForm {
  int degree = 0;
  std::vector<cplx> c;  // size binom(7, degree)

  static NumForm zero(int k) { return {k, std::vector<cplx>(binom(7, k), cplx(0.0))}; }
  static NumForm basis(const Index& idx);  // e^{idx}, idx sorted 0-based

  cplx& at(const Index& idx) { return c[index_rank(7, idx)]; }
  cplx at(const Index& idx) const { return c[index_rank(7, idx)]; }

  NumForm& operator+=(const NumForm& o);
  NumForm& operator*=(cplx s);
};

NumForm operator+(NumForm a, const NumForm& b);
NumForm operator-(NumForm a, const NumForm& b);
NumForm operator*(cplx s, NumForm a);

double sup_norm(const NumForm& a);

NumForm wedge(const NumForm& a, const NumForm& b);            // degree overflow throws
NumForm hodge(const NumForm& a);                              // Euclidean star, vol = e^{0..6}
NumForm interior(const std::array<cplx, 7>& v, const NumForm& a);
cplx form_inner(const NumForm& a, const NumForm& b);          // bilinear, basis orthonormal

// Bryant epsilon symbols (0-based indices).
int eps3(int i, int j, int k);
int eps4(int i, int j, int k, int l);

NumForm std_phi();      // the standard G2 3-form
NumForm std_starphi();  // its Hodge dual
NumForm std_vol();

// G2 type decomposition of 2-forms: +2 / -1 eigenspaces of b -> *(b ^ phi).
std::pair<NumForm, NumForm> project_lambda2(const NumForm& a);  // (part7, part14)

// 3-form decomposition into multiples of phi, the image of a -> *(a ^ phi), rest.
std::tuple<NumForm, NumForm, NumForm> decompose_lambda3(const NumForm& a);

}  // namespace g2v
