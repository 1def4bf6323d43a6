#pragma once
// Structure maps between bar/cobar complexes: decomposition along a grafting
// (cutting the base tree at an inner edge), decomposition along a pruning
// (cutting above a set of leaves), the arity-component strictification of a
// bar construction, and maps of cobar complexes induced by natural maps of
// their inputs.

#include <functional>
#include <memory>

#include "dendro/bar.hpp"
#include "dendro/complex.hpp"

namespace dendro {

// grafting of s2 onto a leaf of s1; s is the canonical grafted tree
struct Grafting {
  Tree s1, s2, s;
  int leaf = 0;            // the leaf edge of s1 that was replaced
  int a = 0;               // the grafted edge inside s
  std::vector<int> emb1;   // edge of s1 -> edge of s
  std::vector<int> emb2;   // edge of s2 -> edge of s (root -> a)
};
Grafting make_grafting(const Tree& s1, int leaf, const Tree& s2);
// the grafting presentation of a canonical tree s cut at inner edge a
Grafting grafting_at(const Tree& s, int a);

// a graded map into a tensor of complexes, owning its endpoints; the cutting
// maps all have degree 0, the pruning decomposition at the edgeless tree has
// degree +1 (the coefficient factor there is one suspension of the ground
// field, and no root marker is dropped)
struct StructMap {
  std::shared_ptr<const ChainComplex> src;
  std::vector<std::shared_ptr<const ChainComplex>> factors;
  std::shared_ptr<const TensorLayout> layout;
  std::shared_ptr<const ChainComplex> dst;  // layout->complex()
  int degree = 0;
  std::map<int, SpMat> mats;  // n -> dim(dst_{n+degree}) x dim(src_n)

  ChainMap chain_map() const;
  bool is_chain_map() const { return chain_map().is_chain_map(); }
  // chain-map property restricted to degrees n with n-1 >= lo; for windowed
  // cobar complexes, whose truncation is a quotient, the identity only holds
  // above the cut-off of the source complex
  bool is_chain_map_above(int lo) const;
};

// coefficient decomposition at an inner edge a of T: a matrix
// value(T)_q -> value(bottom)_q1 (x) value(top)_q2 (canonical cut pieces,
// first factor major).  Dispatches over operad nerves, cocommutative-type
// nerves, and their suspensions.
SpMat presheaf_theta(const PresheafBase& x, const Tree& T, int a, int q, int* q1, int* q2);
SpMat copresheaf_theta(const CopresheafBase& y, const Tree& T, int a, int q, int* q1, int* q2);

// --- bar side ---------------------------------------------------------

// cached site-A bar complexes of one input, with the cutting structure maps
class BarSystem {
 public:
  BarSystem(std::shared_ptr<const PresheafBase> x, Window w);
  std::shared_ptr<const BarComplex> at(const Tree& s) const;
  std::shared_ptr<const ChainComplex> complex_at(const Tree& s) const;
  std::shared_ptr<const BarCopresheaf> copresheaf() const { return cop_; }
  std::shared_ptr<const PresheafBase> input() const { return x_; }
  const Window& window() const { return w_; }

  // Delta^a : Bar(X)(s) -> Bar(X)(s1) (x) Bar(X)(s2) for the grafting g;
  // degree 0 (and a chain map) when X carries one suspension
  StructMap delta(const Grafting& g) const;

 private:
  std::shared_ptr<const PresheafBase> x_;
  Window w_;
  std::shared_ptr<BarCopresheaf> cop_;
};

// cached site-A cobar complexes, with the dual grafting structure maps
class CobarSystem {
 public:
  CobarSystem(std::shared_ptr<const CopresheafBase> y, Window w);
  std::shared_ptr<const CobarComplex> at(const Tree& s) const;
  std::shared_ptr<const ChainComplex> complex_at(const Tree& s) const;
  std::shared_ptr<const CobarPresheaf> presheaf() const { return pre_; }
  std::shared_ptr<const CopresheafBase> input() const { return y_; }
  const Window& window() const { return w_; }

  // nabla^a : Cobar(Y)(s) -> Cobar(Y)(s1) (x) Cobar(Y)(s2); degree 0 (and a
  // chain map) when Y carries one desuspension
  StructMap nabla(const Grafting& g) const;

 private:
  std::shared_ptr<const CopresheafBase> y_;
  Window w_;
  std::shared_ptr<CobarPresheaf> pre_;
};

// --- root site: prunings ----------------------------------------------

// Bar of an algebra nerve M, with the decomposition along a pruning
// alpha : S -> T into Bar(sX)(S) (x) (x)_l Bar(M)(T_l) (leaves of S
// ascending), where sX is the suspended nerve of the underlying operad
class BarAlgebraSystem {
 public:
  BarAlgebraSystem(std::shared_ptr<const NerveAlgebra> m, Window w);
  std::shared_ptr<const BarComplex> at(const Tree& t) const;  // site R
  const BarSystem& coefficients() const { return bx_; }       // Bar(sX), site A
  std::shared_ptr<const NerveAlgebra> input() const { return m_; }
  const Window& window() const { return w_; }

  StructMap nabla_bar(const Morphism& alpha) const;

 private:
  std::shared_ptr<const NerveAlgebra> m_;
  Window w_;
  std::shared_ptr<BarCopresheaf> bm_;
  BarSystem bx_;
};

// Cobar of a coalgebra nerve N, with the structure along a pruning
// alpha : S -> T into Cobar(s^{-1}Y)(S) (x) (x)_l Cobar(N)(T_l), where Y is
// the nerve of the underlying cooperad
class CobarCoalgebraSystem {
 public:
  CobarCoalgebraSystem(std::shared_ptr<const NerveCoalgebra> n, Window w);
  std::shared_ptr<const CobarComplex> at(const Tree& t) const;  // site R
  const CobarSystem& coefficients() const { return cy_; }       // Cobar(s^-1 Y)
  std::shared_ptr<const NerveCoalgebra> input() const { return n_; }
  const Window& window() const { return w_; }

  StructMap theta_cobar(const Morphism& alpha) const;

 private:
  std::shared_ptr<const NerveCoalgebra> n_;
  Window w_;
  std::shared_ptr<CobarPresheaf> pn_;
  CobarSystem cy_;
};

// --- strictification ---------------------------------------------------

// The copresheaf T |-> (x)_v Y(C_{arity v}) built from the arity components
// of a bar system Y = Bar(X); pushes act by fully decomposing each blown-up
// subtree into corollas.  The edgeless tree carries k in degree 1, matching
// Y's convention of one suspension per piece.
class StrictNerve : public CopresheafBase {
 public:
  explicit StrictNerve(std::shared_ptr<const BarSystem> sys);
  std::string name() const override;
  Site site() const override { return Site::A; }
  const BarSystem& system() const { return *sys_; }

  // the comparison map Y(b) -> value(b): iterated decomposition into corollas
  std::map<int, SpMat> comparison(const Tree& b) const;

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_push(const Morphism& m, int deg) const override;

 private:
  std::shared_ptr<const BarSystem> sys_;
};

// exact coassociativity of the cutting maps at two distinct inner edges of s:
// cutting at a then at b agrees with cutting in the other order, up to the
// Koszul swap of the top pieces when a and b are incomparable
bool delta_coassociative(const BarSystem& sys, const Tree& s, int a, int b);
bool nabla_coassociative(const CobarSystem& sys, const Tree& s, int a, int b);

// chain map Cobar(Y1)(s) -> Cobar(Y2)(s) induced by a natural map
// phi : Y1 -> Y2 given by its per-tree matrices phi(T, deg)
std::map<int, SpMat> cobar_induced(const CobarComplex& c1, const CobarComplex& c2,
                                   const std::function<SpMat(const Tree&, int)>& phi);

}  // namespace dendro
