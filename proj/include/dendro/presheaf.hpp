#pragma once
// Presheaves (contravariant) and copresheaves (covariant) on the tree
// categories, valued in chain complexes, together with the nerve
// constructions on classical (co)operads and (co)algebras.
//
// Values are computed for arbitrary trees (not just canonical ones) so that
// intermediate trees arising from faces and cuts can be handled uniformly;
// everything is cached by a structural key.

#include <memory>
#include <string>

#include "dendro/complex.hpp"
#include "dendro/morphism.hpp"
#include "dendro/operad.hpp"

namespace dendro {

std::string structural_key(const Tree& t);
std::string structural_key(const Morphism& m);

class PresheafBase {
 public:
  virtual ~PresheafBase() = default;
  virtual std::string name() const = 0;
  virtual Site site() const = 0;

  const ChainComplex& value(const Tree& t) const;
  // restriction along m : S -> T, matrix value(T)_deg -> value(S)_deg
  SpMat restrict(const Morphism& m, int deg) const;
  // transport along an isomorphism c : S -> T, matrix value(S) -> value(T)
  SpMat transport(const Morphism& c, int deg) const { return restrict(inverse(c), deg); }

 protected:
  virtual ChainComplex compute_value(const Tree& t) const = 0;
  virtual SpMat compute_restrict(const Morphism& m, int deg) const = 0;

 private:
  mutable std::map<std::string, ChainComplex> vcache_;
  mutable std::map<std::string, SpMat> rcache_;
};

class CopresheafBase {
 public:
  virtual ~CopresheafBase() = default;
  virtual std::string name() const = 0;
  virtual Site site() const = 0;

  const ChainComplex& value(const Tree& t) const;
  // pushforward along m : S -> T, matrix value(S)_deg -> value(T)_deg
  SpMat push(const Morphism& m, int deg) const;
  SpMat transport(const Morphism& c, int deg) const { return push(c, deg); }
  // conilpotency certificate: pushforwards from s to trees with more than
  // this many vertices vanish (INT_MAX when no certificate applies)
  virtual int support_bound(const Tree& s) const;

 protected:
  virtual ChainComplex compute_value(const Tree& t) const = 0;
  virtual SpMat compute_push(const Morphism& m, int deg) const = 0;

 private:
  mutable std::map<std::string, ChainComplex> vcache_;
  mutable std::map<std::string, SpMat> pcache_;
};

// --- nerves -----------------------------------------------------------

// NP(T) = tensor over vertices of P(arity v), site A
class NerveOperad : public PresheafBase {
 public:
  explicit NerveOperad(Operad p) : p_(std::move(p)) {}
  std::string name() const override { return "N" + p_.name; }
  Site site() const override { return Site::A; }
  const Operad& operad() const { return p_; }
  // theta for cutting S at inner edge a: value(S) -> value(bottom)(x)value(top)
  // with the pieces canonicalized via cut_at; pure permutation/relabel matrix
  SpMat theta(const Tree& S, int a, int deg) const;

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_restrict(const Morphism& m, int deg) const override;

 private:
  Operad p_;
};

// N(P,A)(T) = NP(T) (x) A^{(x)leaves}, site R
class NerveAlgebra : public PresheafBase {
 public:
  NerveAlgebra(Operad p, Algebra a) : p_(std::move(p)), a_(std::move(a)) {}
  std::string name() const override { return "N(" + p_.name + "," + a_.name + ")"; }
  Site site() const override { return Site::R; }
  const Operad& operad() const { return p_; }
  const Algebra& algebra() const { return a_; }
  // tau for a pruning eps : V -> U: value(U) -> NP(V) (x) (x)_l value(U_l),
  // ordered by ascending leaf edge of V; pure regrouping (degree 0)
  // matrix columns: value(U); rows: the tensor layout over
  // (NerveOperad(V), value(U_l1), ..): all degree 0 here
  SpMat tau(const Morphism& eps) const;

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_restrict(const Morphism& m, int deg) const override;

 private:
  Operad p_;
  Algebra a_;
};

// NC(T) for C = truncated coCom (1-dim per arity), site A
class NerveCocom : public CopresheafBase {
 public:
  explicit NerveCocom(Cooperad c) : c_(std::move(c)) {}
  std::string name() const override { return "N" + c_.name; }
  Site site() const override { return Site::A; }
  const Cooperad& cooperad() const { return c_; }
  SpMat theta(const Tree& S, int a, int deg) const;  // iso (1x1) when in range

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_push(const Morphism& m, int deg) const override;

 private:
  Cooperad c_;
};

// N(C,E)(T) = NC(T) (x) E^{(x)leaves}, site R, conilpotent when E is
class NerveCoalgebra : public CopresheafBase {
 public:
  NerveCoalgebra(Cooperad c, Coalgebra e);
  std::string name() const override { return "N(" + c_.name + "," + e_.name + ")"; }
  Site site() const override { return Site::R; }
  const Cooperad& cooperad() const { return c_; }
  const Coalgebra& coalgebra() const { return e_; }
  int support_bound(const Tree& s) const override;
  // nabla for a pruning eps : V -> U: value(U) -> NC(V) (x) (x)_l value(U_l),
  // a pure regrouping (the nerve coalgebra is strict); ordering as in tau
  SpMat nabla(const Morphism& eps) const;

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_push(const Morphism& m, int deg) const override;

 private:
  Cooperad c_;
  Coalgebra e_;
  int depth_;  // coaction depth certificate
};

// k . R(-, R0): free presheaf on the representable, site R, degree 0
class Representable : public PresheafBase {
 public:
  explicit Representable(Tree r0) : r0_(canonicalize(r0).tree) {}
  std::string name() const override { return "repr:" + serialize(r0_); }
  Site site() const override { return Site::R; }
  const Tree& base() const { return r0_; }

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_restrict(const Morphism& m, int deg) const override;

 private:
  Tree r0_;
};

// degree shift by k with differential sign twist (-1)^k; matrices unchanged
class SuspendPresheaf : public PresheafBase {
 public:
  SuspendPresheaf(std::shared_ptr<const PresheafBase> x, int k) : x_(std::move(x)), k_(k) {}
  std::string name() const override;
  Site site() const override { return x_->site(); }
  int shift() const { return k_; }
  const PresheafBase& inner() const { return *x_; }

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_restrict(const Morphism& m, int deg) const override;

 private:
  std::shared_ptr<const PresheafBase> x_;
  int k_;
};

class SuspendCopresheaf : public CopresheafBase {
 public:
  SuspendCopresheaf(std::shared_ptr<const CopresheafBase> y, int k) : y_(std::move(y)), k_(k) {}
  std::string name() const override;
  Site site() const override { return y_->site(); }
  int shift() const { return k_; }
  const CopresheafBase& inner() const { return *y_; }
  int support_bound(const Tree& s) const override { return y_->support_bound(s); }

 protected:
  ChainComplex compute_value(const Tree& t) const override;
  SpMat compute_push(const Morphism& m, int deg) const override;

 private:
  std::shared_ptr<const CopresheafBase> y_;
  int k_;
};

// functoriality / structure validation; returns first violated identity or ""
std::string validate_presheaf(const PresheafBase& x, int max_vertices, int max_arity);
std::string validate_copresheaf(const CopresheafBase& y, int max_vertices, int max_arity);

}  // namespace dendro
