#pragma once
// Classical (truncated) operads, algebras, cooperads, coalgebras in rational
// vector spaces, all concentrated in degree 0.  Components exist for arities
// 2..max_arity; compositions landing above max_arity are zero.

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "dendro/matrix.hpp"
#include "dendro/tree.hpp"

namespace dendro {

struct Operad {
  std::string name;
  int max_arity = 0;
  std::map<int, std::vector<std::string>> basis;  // arity -> labels
  // partial composition (k,i,l) : P(k)(x)P(l) -> P(k+l-1), i in 1..k;
  // column index a*dim(l)+b for basis pair (a,b)
  std::map<std::tuple<int, int, int>, SpMat> comps;
  // adjacent transpositions s_1..s_{n-1} acting on P(n)
  std::map<int, std::vector<SpMat>> transpositions;

  int dim(int n) const;
  SpMat comp(int k, int i, int l) const;
  // matrix moving an element whose input j is relabelled to rho[j]
  // (rho is 0-based of length n); left action: relabel(r1 o r2) = relabel(r1)relabel(r2)
  SpMat relabel(int n, const std::vector<int>& rho) const;

  // first violated associativity / equivariance identity, empty if valid
  std::string validate() const;
};

Operad com_operad(int max_arity);
Operad ass_operad(int max_arity);

struct Algebra {
  std::string name;
  Operad operad;
  std::vector<std::string> basis;  // degree 0
  // action(n) : P(n)(x)A^{(x)n} -> A; column index: p-basis outermost, then
  // a_1..a_n with a_n fastest
  std::map<int, SpMat> action;

  int dim() const { return (int)basis.size(); }
  SpMat act(int n) const;
  std::string validate() const;
};

Algebra sq0_algebra(const Operad& p, int n);   // n-dim square-zero
Algebra kx3_algebra(const Operad& p);          // nonunital k[x]/x^3 (needs Com-like P)

// cooperads we need are 1-dimensional in every arity (truncated coCom)
struct Cooperad {
  std::string name;
  int max_arity = 0;
  int dim(int n) const { return (n >= 2 && n <= max_arity) ? 1 : 0; }
};
Cooperad cocom_cooperad(int max_arity);

struct Coalgebra {
  std::string name;
  Cooperad cooperad;
  std::vector<std::string> basis;
  // coact(n) : E -> C(n)(x)E^{(x)n} = E^{(x)n} (C(n) = k); rows indexed with
  // e_1..e_n, e_n fastest
  std::map<int, SpMat> coact;

  int dim() const { return (int)basis.size(); }
  SpMat co(int n) const;
  std::string validate() const;
  // max vertices of a tree along which some iterated coaction is nonzero,
  // starting from a single element (conilpotency certificate ingredient)
  int coaction_depth() const;
};

Coalgebra delta_zero_coalgebra(const Cooperad& c, int n);
Coalgebra xy_coalgebra(const Cooperad& c);  // span{x,y}, Dx = y(x)y, Dy = 0

// JSON (de)serialization; schema documented in README
std::string operad_to_json(const Operad& p);
Operad operad_from_json(const std::string& text);  // throws std::invalid_argument
std::string algebra_to_json(const Algebra& a);
Algebra algebra_from_json(const std::string& text);

// iterated operadic composition along a tree B: (x)_{v} P(arity v) -> P(#leaves B),
// vertex factors in B's vertex storage order, result inputs labelled by the
// leaves of B in ascending edge order.  Column index: tuple with last vertex
// fastest.  B must have >= 1 vertex.
SpMat operad_tree_composite(const Operad& p, const Tree& B);

// evaluation of an algebra along a tree U: (x)_{w} P(arity w) (x) A^{(x)leaves(U)} -> A
// vertex factors in storage order, then leaf factors in ascending edge order.
SpMat algebra_tree_action(const Operad& p, const Algebra& a, const Tree& U);

// iterated coaction along U: E -> E^{(x)leaves(U)} (coCom coefficients are 1-dim)
SpMat coalgebra_tree_coaction(const Coalgebra& e, const Tree& U);

}  // namespace dendro
