#pragma once
// Bar and cobar complexes of (co)presheaves on the tree categories, computed
// inside a finite window of trees.  Generators are orbit classes of triples
// (alpha : S -> T, enumeration of the generating edges of T, section over T),
// identified under automorphisms of T with the sign of the induced
// permutation of the enumeration.

#include <memory>

#include "dendro/presheaf.hpp"

namespace dendro {

// finite window of target trees: at most max_vertices vertices, arities <= max_arity
struct Window {
  int max_vertices = 4;
  int max_arity = 3;
};

// cobar-side degrees >= -(this bound) are unaffected by the window truncation
int safe_degree_bound(const Window& w, const Tree& s);

// generating edges in canonical (ascending) order: inner edges on site A,
// root + inner edges on site R; empty for the edgeless tree
std::vector<int> generating_edges(const Tree& t, Site site);

// one orbit class of maps alpha : S -> T together with its invariant sections
struct BarOrbit {
  Tree t;                      // canonical target
  Morphism alpha0;             // orbit representative S -> t
  std::string code;            // colored code identifying the orbit
  std::vector<int> en;         // generating edges, canonical order
  std::vector<Morphism> stab;  // generators of the stabilizer of alpha0
  std::map<int, SpMat> basis;   // q -> columns spanning the twisted invariants W_q
  std::map<int, SpMat> coords;  // q -> coordinates value(t)_q -> W_q
  std::map<int, int> offset;    // q -> column offset inside the ambient degree
};

class BarComplex {
 public:
  // sections in degree q over a target with p generating edges sit in degree q+p
  BarComplex(std::shared_ptr<const PresheafBase> x, const Tree& s, Window w);
  const ChainComplex& complex() const { return c_; }
  const std::vector<BarOrbit>& orbits() const { return orbits_; }
  const Tree& shape() const { return s_; }
  Site site() const { return x_->site(); }
  const Window& window() const { return w_; }
  const PresheafBase& input() const { return *x_; }
  // matrix value(alpha.dst)_q -> Bar(s)_{q+|e|} sending x to the class of (alpha,e,x)
  SpMat reduce(const Morphism& alpha, const std::vector<int>& e, int q) const;

 private:
  void build();
  void install_differential();

  std::shared_ptr<const PresheafBase> x_;
  Tree s_;
  Window w_;
  std::vector<BarOrbit> orbits_;
  std::map<std::string, std::vector<int>> by_tree_;  // canonical code -> orbit ids
  ChainComplex c_;
};

class CobarComplex {
 public:
  // sections in degree q over a target with p generating edges sit in degree q-p;
  // the differential is only guaranteed to square to zero in safe degrees
  CobarComplex(std::shared_ptr<const CopresheafBase> y, const Tree& s, Window w);
  const ChainComplex& complex() const { return c_; }
  const std::vector<BarOrbit>& orbits() const { return orbits_; }
  const Tree& shape() const { return s_; }
  Site site() const { return y_->site(); }
  const Window& window() const { return w_; }
  const CopresheafBase& input() const { return *y_; }
  SpMat reduce(const Morphism& alpha, const std::vector<int>& e, int q) const;

 private:
  void build();
  void install_differential();

  std::shared_ptr<const CopresheafBase> y_;
  Tree s_;
  Window w_;
  std::vector<BarOrbit> orbits_;
  std::map<std::string, std::vector<int>> by_tree_;
  ChainComplex c_;
};

// Bar(X) as a copresheaf: the pushforward along beta : S -> R transfers a
// class (gamma,e,x) over S to the sum of the classes over R pulling back to it
class BarCopresheaf : public CopresheafBase {
 public:
  BarCopresheaf(std::shared_ptr<const PresheafBase> x, Window w);
  std::string name() const override { return "Bar(" + x_->name() + ")"; }
  Site site() const override { return x_->site(); }
  const BarComplex& at(const Tree& t) const;
  const PresheafBase& input() const { return *x_; }
  const Window& window() const { return w_; }

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_push(const Morphism& m, int deg) const override;

 private:
  std::shared_ptr<const PresheafBase> x_;
  Window w_;
  mutable std::map<std::string, std::unique_ptr<BarComplex>> cache_;
};

// Cobar(Y) as a presheaf: restriction along beta : S -> R precomposes the class
class CobarPresheaf : public PresheafBase {
 public:
  CobarPresheaf(std::shared_ptr<const CopresheafBase> y, Window w);
  std::string name() const override { return "Cobar(" + y_->name() + ")"; }
  Site site() const override { return y_->site(); }
  const CobarComplex& at(const Tree& t) const;
  const CopresheafBase& input() const { return *y_; }
  const Window& window() const { return w_; }

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_restrict(const Morphism& m, int deg) const override;

 private:
  std::shared_ptr<const CopresheafBase> y_;
  Window w_;
  mutable std::map<std::string, std::unique_ptr<CobarComplex>> cache_;
};

}  // namespace dendro
