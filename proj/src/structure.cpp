#include "dendro/structure.hpp"

#include <algorithm>
#include <stdexcept>

namespace dendro {

namespace {

using GM = std::map<int, SpMat>;

// composite (1 (x) ... f ... (x) 1) o outer, where f = inner is applied to
// factor `pos` of outer's two-factor target, landing in the three-factor
// layout L3; all maps have degree 0, so no Koszul signs appear
GM expand(const StructMap& outer, const StructMap& inner, int pos, const TensorLayout& L3) {
  GM out;
  for (auto& [n, m] : outer.mats) {
    SpMat res = SpMat::zero(L3.dim(n) >= 0 ? [&] {
      int d = 0;
      auto it = L3.basis.find(n);
      if (it != L3.basis.end()) d = (int)it->second.size();
      return d;
    }() : 0, m.n_cols);
    auto bit = outer.layout->basis.find(n);
    if (bit == outer.layout->basis.end()) {
      out[n] = res;
      continue;
    }
    for (auto& [rc, v] : m.entries) {
      auto& [degs, inds] = bit->second[rc.first];
      auto mi = inner.mats.find(degs[pos]);
      if (mi == inner.mats.end()) continue;
      for (auto& [rc2, v2] : mi->second.entries) {
        if (rc2.second != inds[pos]) continue;
        auto& [pd, pi] = inner.layout->basis.at(degs[pos])[rc2.first];
        std::vector<int> td, ti;
        if (pos == 0) {
          td = {pd[0], pd[1], degs[1]};
          ti = {pi[0], pi[1], inds[1]};
        } else {
          td = {degs[0], pd[0], pd[1]};
          ti = {inds[0], pi[0], pi[1]};
        }
        res.add(L3.idx(n, td, ti), rc.second, v * v2);
      }
    }
    out[n] = res;
  }
  return out;
}

// reindex a map into Ldst whose factors are Lsrc's factors permuted by perm
// (dst factor j = src factor perm[j]), with Koszul signs
GM permute_target(const GM& m, const TensorLayout& Lsrc, const TensorLayout& Ldst,
                  const std::vector<int>& perm) {
  GM out;
  for (auto& [n, mat] : m) {
    auto bit = Lsrc.basis.find(n);
    SpMat res = SpMat::zero(bit == Lsrc.basis.end() ? 0 : Ldst.dim(n), mat.n_cols);
    if (bit != Lsrc.basis.end()) {
      res = SpMat::zero(Ldst.dim(n), mat.n_cols);
      for (auto& [rc, v] : mat.entries) {
        auto& [degs, inds] = bit->second[rc.first];
        std::vector<int> td(perm.size()), ti(perm.size());
        for (size_t j = 0; j < perm.size(); ++j) {
          td[j] = degs[perm[j]];
          ti[j] = inds[perm[j]];
        }
        // Koszul sign: pairs out of order after permuting
        int s = 1;
        for (size_t i = 0; i < perm.size(); ++i)
          for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j] && (degs[perm[i]] * degs[perm[j]]) % 2) s = -s;
        res.add(Ldst.idx(n, td, ti), rc.second, v * rat(s));
      }
    }
    out[n] = res;
  }
  return out;
}

// composite of edge embeddings: (outer o inner)(e) = outer[inner[e]]
std::vector<int> compose_emb(const std::vector<int>& outer, const std::vector<int>& inner) {
  std::vector<int> r(inner.size());
  for (size_t e = 0; e < inner.size(); ++e) r[e] = outer[inner[e]];
  return r;
}

// the automorphism phi of u with e1[phi(e)] = e2[e], for two embeddings of u
// into a common ambient tree with the same image
Morphism matching_auto(const Tree& u, const std::vector<int>& e1, const std::vector<int>& e2) {
  std::map<int, int> inv;
  for (int e = 0; e < (int)e1.size(); ++e) inv[e1[e]] = e;
  Morphism phi{u, u, std::vector<int>(u.n_edges)};
  for (int e = 0; e < u.n_edges; ++e) phi.edge_map[e] = inv.at(e2[e]);
  return phi;
}

bool is_identity(const Morphism& m) {
  for (int e = 0; e < (int)m.edge_map.size(); ++e)
    if (m.edge_map[e] != e) return false;
  return true;
}

// apply factor-wise transports along the automorphisms phi (all degree 0, so
// no Koszul signs) to a map landing in the three-factor layout L
GM tensor_transport(const GM& m, const TensorLayout& L, const std::array<Morphism, 3>& phi,
                    const std::function<SpMat(const Morphism&, int)>& tr) {
  if (is_identity(phi[0]) && is_identity(phi[1]) && is_identity(phi[2])) return m;
  std::map<std::pair<int, int>, SpMat> cache;
  auto T = [&](int f, int d) -> const SpMat& {
    auto key = std::make_pair(f, d);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, tr(phi[f], d)).first;
    return it->second;
  };
  GM out;
  for (auto& [n, mat] : m) {
    SpMat res = SpMat::zero(mat.n_rows, mat.n_cols);
    auto bit = L.basis.find(n);
    if (bit != L.basis.end()) {
      for (auto& [rc, v] : mat.entries) {
        auto& [degs, inds] = bit->second[rc.first];
        for (auto& [rc0, v0] : T(0, degs[0]).entries) {
          if (rc0.second != inds[0]) continue;
          for (auto& [rc1, v1] : T(1, degs[1]).entries) {
            if (rc1.second != inds[1]) continue;
            for (auto& [rc2, v2] : T(2, degs[2]).entries) {
              if (rc2.second != inds[2]) continue;
              res.add(L.idx(n, degs, {rc0.first, rc1.first, rc2.first}), rc.second,
                      v * v0 * v1 * v2);
            }
          }
        }
      }
    }
    out[n] = res;
  }
  return out;
}

int local_edge(const std::vector<int>& emb, int global) {
  for (int e = 0; e < (int)emb.size(); ++e)
    if (emb[e] == global) return e;
  throw std::logic_error("local_edge: edge not in piece");
}

bool gm_equal(const GM& a, const GM& b) {
  for (auto& [n, m] : a) {
    auto it = b.find(n);
    if (it == b.end()) {
      if (!m.is_zero()) return false;
    } else if (!(m == it->second)) {
      return false;
    }
  }
  for (auto& [n, m] : b)
    if (!a.count(n) && !m.is_zero()) return false;
  return true;
}

// shared implementation of the coassociativity check over any cutting
// functor; tr gives the transport of the system's complexes along
// automorphisms, used to align the two paths' identifications of the pieces
bool coassoc_impl(const std::function<StructMap(const Grafting&)>& F,
                  const std::function<SpMat(const Morphism&, int)>& tr, const Tree& s, int a,
                  int b) {
  if (a == b) throw std::invalid_argument("coassociativity: edges must differ");
  if (s.weakly_below(b, a)) std::swap(a, b);  // ensure not (a above b)
  Grafting ga = grafting_at(s, a);
  StructMap da = F(ga);
  Grafting gb = grafting_at(s, b);
  StructMap db = F(gb);
  if (s.weakly_below(a, b)) {
    // nested: b lies above a, inside the top piece of the a-cut
    Grafting g1 = grafting_at(ga.s2, local_edge(ga.emb2, b));
    StructMap d1 = F(g1);
    Grafting g2 = grafting_at(gb.s1, local_edge(gb.emb1, a));
    StructMap d2 = F(g2);
    std::vector<const ChainComplex*> fac{da.factors[0].get(), d1.factors[0].get(),
                                         d1.factors[1].get()};
    TensorLayout L3(fac);
    GM path1 = expand(da, d1, 1, L3);
    GM path2 = expand(db, d2, 0, L3);
    std::array<Morphism, 3> phi{
        matching_auto(ga.s1, ga.emb1, compose_emb(gb.emb1, g2.emb1)),
        matching_auto(g1.s1, compose_emb(ga.emb2, g1.emb1), compose_emb(gb.emb1, g2.emb2)),
        matching_auto(g1.s2, compose_emb(ga.emb2, g1.emb2), gb.emb2)};
    return gm_equal(path1, tensor_transport(path2, L3, phi, tr));
  }
  // parallel: a and b are incomparable; both second cuts happen in the
  // bottom pieces, and the top pieces swap
  Grafting g1 = grafting_at(ga.s1, local_edge(ga.emb1, b));
  StructMap d1 = F(g1);
  Grafting g2 = grafting_at(gb.s1, local_edge(gb.emb1, a));
  StructMap d2 = F(g2);
  std::vector<const ChainComplex*> fac1{d1.factors[0].get(), d1.factors[1].get(),
                                        da.factors[1].get()};
  TensorLayout L3a(fac1);
  std::vector<const ChainComplex*> fac2{d2.factors[0].get(), d2.factors[1].get(),
                                        db.factors[1].get()};
  TensorLayout L3b(fac2);
  GM path1 = expand(da, d1, 0, L3a);
  GM path2 = expand(db, d2, 0, L3b);
  GM path2s = permute_target(path2, L3b, L3a, {0, 2, 1});
  std::array<Morphism, 3> phi{
      matching_auto(g1.s1, compose_emb(ga.emb1, g1.emb1), compose_emb(gb.emb1, g2.emb1)),
      matching_auto(g1.s2, compose_emb(ga.emb1, g1.emb2), gb.emb2),
      matching_auto(ga.s2, ga.emb2, compose_emb(gb.emb1, g2.emb2))};
  path2s = tensor_transport(path2s, L3a, phi, tr);
  return gm_equal(path1, path2s);
}

// permutation sign for reordering o.en into `arranged`
int enum_reorder_sign(const std::vector<int>& en, const std::vector<int>& arranged) {
  std::vector<int> perm(arranged.size());
  for (size_t k = 0; k < arranged.size(); ++k) {
    auto it = std::find(en.begin(), en.end(), arranged[k]);
    if (it == en.end()) throw std::logic_error("enum_reorder_sign: edge not in enumeration");
    perm[k] = (int)(it - en.begin());
  }
  return permutation_sign(perm);
}

}  // namespace

Grafting make_grafting(const Tree& s1, int leaf, const Tree& s2) {
  Grafting g;
  g.s1 = canonicalize(s1).tree;
  g.s2 = canonicalize(s2).tree;
  g.leaf = leaf;
  std::vector<int> t_edge_map;
  Tree raw = graft(g.s1, leaf, g.s2, &t_edge_map);
  auto cr = canonicalize(raw);
  g.s = cr.tree;
  g.emb1.resize(g.s1.n_edges);
  for (int e = 0; e < g.s1.n_edges; ++e) g.emb1[e] = cr.edge_iso[e];
  g.emb2.resize(g.s2.n_edges);
  for (int e = 0; e < g.s2.n_edges; ++e) g.emb2[e] = cr.edge_iso[t_edge_map[e]];
  g.a = g.emb1[leaf];
  return g;
}

Grafting grafting_at(const Tree& s, int a) {
  if (s.is_leaf(a) || a == 0) throw std::invalid_argument("grafting_at: not an inner edge");
  Grafting g;
  g.s = s;
  g.a = a;
  Cut cut = cut_at(s, a);
  auto cb = canonicalize(cut.bottom);
  auto ct = canonicalize(cut.top);
  g.s1 = cb.tree;
  g.s2 = ct.tree;
  g.leaf = cb.edge_iso[cut.a_in_bottom];
  g.emb1.assign(g.s1.n_edges, -1);
  for (int le = 0; le < cut.bottom.n_edges; ++le)
    g.emb1[cb.edge_iso[le]] = cut.bottom_edge_from_t[le];
  g.emb1[g.leaf] = a;
  g.emb2.assign(g.s2.n_edges, -1);
  for (int le = 0; le < cut.top.n_edges; ++le)
    g.emb2[ct.edge_iso[le]] = cut.top_edge_from_t[le];
  return g;
}

ChainMap StructMap::chain_map() const {
  ChainMap f;
  f.src = src.get();
  f.dst = dst.get();
  f.mats = mats;
  return f;
}

bool StructMap::is_chain_map_above(int lo) const {
  auto mat = [&](int n, int rows, int cols) {
    auto it = mats.find(n);
    return it != mats.end() ? it->second : SpMat::zero(rows, cols);
  };
  for (auto& [n, dim] : src->dims) {
    if (n - 1 < lo) continue;
    SpMat lhs = dst->boundary(n) * mat(n, dst->dim(n), dim);
    SpMat rhs = mat(n - 1, dst->dim(n - 1), src->dim(n - 1)) * src->boundary(n);
    if (!(lhs == rhs)) return false;
  }
  return true;
}

SpMat presheaf_theta(const PresheafBase& x, const Tree& T, int a, int q, int* q1, int* q2) {
  if (auto* s = dynamic_cast<const SuspendPresheaf*>(&x)) {
    int k = s->shift();
    SpMat th = presheaf_theta(s->inner(), T, a, q - k, q1, q2);
    if ((k * *q1) % 2) th = th * rat(-1);
    *q1 += k;
    *q2 += k;
    return th;
  }
  if (auto* n = dynamic_cast<const NerveOperad*>(&x)) {
    *q1 = *q2 = 0;
    if (q != 0) return SpMat::zero(0, 0);
    return n->theta(T, a, 0);
  }
  throw std::invalid_argument("presheaf_theta: unsupported input " + x.name());
}

SpMat copresheaf_theta(const CopresheafBase& y, const Tree& T, int a, int q, int* q1, int* q2) {
  if (auto* s = dynamic_cast<const SuspendCopresheaf*>(&y)) {
    int k = s->shift();
    SpMat th = copresheaf_theta(s->inner(), T, a, q - k, q1, q2);
    if ((k * *q1) % 2) th = th * rat(-1);
    *q1 += k;
    *q2 += k;
    return th;
  }
  if (auto* n = dynamic_cast<const NerveCocom*>(&y)) {
    *q1 = *q2 = 0;
    if (q != 0) return SpMat::zero(0, 0);
    return n->theta(T, a, 0);
  }
  throw std::invalid_argument("copresheaf_theta: unsupported input " + y.name());
}

// --- BarSystem ---------------------------------------------------------

BarSystem::BarSystem(std::shared_ptr<const PresheafBase> x, Window w)
    : x_(std::move(x)), w_(w), cop_(std::make_shared<BarCopresheaf>(x_, w)) {}

std::shared_ptr<const BarComplex> BarSystem::at(const Tree& s) const {
  return std::shared_ptr<const BarComplex>(cop_, &cop_->at(s));
}

std::shared_ptr<const ChainComplex> BarSystem::complex_at(const Tree& s) const {
  return std::shared_ptr<const ChainComplex>(cop_, &cop_->at(s).complex());
}

StructMap BarSystem::delta(const Grafting& g) const {
  auto bs = at(g.s);
  auto b1 = at(g.s1);
  auto b2 = at(g.s2);
  StructMap r;
  r.src = complex_at(g.s);
  r.factors = {complex_at(g.s1), complex_at(g.s2)};
  r.layout = std::make_shared<TensorLayout>(
      std::vector<const ChainComplex*>{r.factors[0].get(), r.factors[1].get()});
  r.dst = std::make_shared<ChainComplex>(r.layout->complex());
  for (auto& [n, dim] : r.src->dims) r.mats.emplace(n, SpMat::zero(r.dst->dim(n), dim));

  for (const BarOrbit& o : bs->orbits()) {
    const Tree& t = o.t;
    int p = (int)o.en.size();
    int c = o.alpha0.edge_map[g.a];
    Cut cut = cut_at(t, c);
    auto cb = canonicalize(cut.bottom);
    auto ct = canonicalize(cut.top);
    std::vector<int> btol(t.n_edges, -1), ttol(t.n_edges, -1);
    for (int le = 0; le < cut.bottom.n_edges; ++le) btol[cut.bottom_edge_from_t[le]] = le;
    btol[c] = cut.a_in_bottom;
    for (int le = 0; le < cut.top.n_edges; ++le) ttol[cut.top_edge_from_t[le]] = le;

    Morphism a1{g.s1, cb.tree, std::vector<int>(g.s1.n_edges)};
    for (int e = 0; e < g.s1.n_edges; ++e)
      a1.edge_map[e] = cb.edge_iso[btol[o.alpha0.edge_map[g.emb1[e]]]];
    Morphism a2{g.s2, ct.tree, std::vector<int>(g.s2.n_edges)};
    for (int e = 0; e < g.s2.n_edges; ++e)
      a2.edge_map[e] = ct.edge_iso[ttol[o.alpha0.edge_map[g.emb2[e]]]];

    std::vector<int> e1glob, e2glob, e1loc, e2loc;
    for (int e : o.en) {
      if (e == c) continue;
      if (btol[e] >= 0 && e != c) {
        e1glob.push_back(e);
        e1loc.push_back(cb.edge_iso[btol[e]]);
      } else {
        e2glob.push_back(e);
        e2loc.push_back(ct.edge_iso[ttol[e]]);
      }
    }
    std::vector<int> arranged{c};
    arranged.insert(arranged.end(), e1glob.begin(), e1glob.end());
    arranged.insert(arranged.end(), e2glob.begin(), e2glob.end());
    int sigma = enum_reorder_sign(o.en, arranged);
    int p1 = (int)e1glob.size(), p2 = (int)e2glob.size();

    for (auto& [q, basis] : o.basis) {
      if (basis.n_cols == 0) continue;
      int q1 = 0, q2 = 0;
      SpMat th = presheaf_theta(*x_, t, c, q, &q1, &q2);
      if (th.is_zero()) continue;
      SpMat v = th * basis;  // rows: bottom-major pairs, cols: orbit classes
      if (v.is_zero()) continue;
      int dt = x_->value(ct.tree).dim(q2);
      SpMat r1 = b1->reduce(a1, e1loc, q1);
      SpMat r2 = b2->reduce(a2, e2loc, q2);
      int n = q + p, n1 = q1 + p1, n2 = q2 + p2;
      int sgn = sigma;
      if ((p + q + p1 * (p2 + q2)) % 2) sgn = -sgn;
      SpMat& out = r.mats.at(n);
      for (auto& [rc1, v1] : r1.entries)
        for (auto& [rc2, v2] : r2.entries) {
          int row = r.layout->idx(n, {n1, n2}, {rc1.first, rc2.first});
          int mid = rc1.second * dt + rc2.second;
          for (auto& [rcv, vv] : v.entries) {
            if (rcv.first != mid) continue;
            out.add(row, o.offset.at(q) + rcv.second, v1 * v2 * vv * sgn);
          }
        }
    }
  }
  return r;
}

// --- CobarSystem -------------------------------------------------------

CobarSystem::CobarSystem(std::shared_ptr<const CopresheafBase> y, Window w)
    : y_(std::move(y)), w_(w), pre_(std::make_shared<CobarPresheaf>(y_, w)) {}

std::shared_ptr<const CobarComplex> CobarSystem::at(const Tree& s) const {
  return std::shared_ptr<const CobarComplex>(pre_, &pre_->at(s));
}

std::shared_ptr<const ChainComplex> CobarSystem::complex_at(const Tree& s) const {
  return std::shared_ptr<const ChainComplex>(pre_, &pre_->at(s).complex());
}

StructMap CobarSystem::nabla(const Grafting& g) const {
  auto cs = at(g.s);
  auto c1 = at(g.s1);
  auto c2 = at(g.s2);
  StructMap r;
  r.src = complex_at(g.s);
  r.factors = {complex_at(g.s1), complex_at(g.s2)};
  r.layout = std::make_shared<TensorLayout>(
      std::vector<const ChainComplex*>{r.factors[0].get(), r.factors[1].get()});
  r.dst = std::make_shared<ChainComplex>(r.layout->complex());
  for (auto& [n, dim] : r.src->dims) r.mats.emplace(n, SpMat::zero(r.dst->dim(n), dim));

  for (const BarOrbit& o : cs->orbits()) {
    const Tree& t = o.t;
    int p = (int)o.en.size();
    int c = o.alpha0.edge_map[g.a];
    Cut cut = cut_at(t, c);
    auto cb = canonicalize(cut.bottom);
    auto ct = canonicalize(cut.top);
    std::vector<int> btol(t.n_edges, -1), ttol(t.n_edges, -1);
    for (int le = 0; le < cut.bottom.n_edges; ++le) btol[cut.bottom_edge_from_t[le]] = le;
    btol[c] = cut.a_in_bottom;
    for (int le = 0; le < cut.top.n_edges; ++le) ttol[cut.top_edge_from_t[le]] = le;

    Morphism a1{g.s1, cb.tree, std::vector<int>(g.s1.n_edges)};
    for (int e = 0; e < g.s1.n_edges; ++e)
      a1.edge_map[e] = cb.edge_iso[btol[o.alpha0.edge_map[g.emb1[e]]]];
    Morphism a2{g.s2, ct.tree, std::vector<int>(g.s2.n_edges)};
    for (int e = 0; e < g.s2.n_edges; ++e)
      a2.edge_map[e] = ct.edge_iso[ttol[o.alpha0.edge_map[g.emb2[e]]]];

    std::vector<int> e1glob, e2glob, e1loc, e2loc;
    for (int e : o.en) {
      if (e == c) continue;
      if (btol[e] >= 0) {
        e1glob.push_back(e);
        e1loc.push_back(cb.edge_iso[btol[e]]);
      } else {
        e2glob.push_back(e);
        e2loc.push_back(ct.edge_iso[ttol[e]]);
      }
    }
    std::vector<int> arranged{c};
    arranged.insert(arranged.end(), e1glob.begin(), e1glob.end());
    arranged.insert(arranged.end(), e2glob.begin(), e2glob.end());
    int sigma = enum_reorder_sign(o.en, arranged);
    int p1 = (int)e1glob.size(), p2 = (int)e2glob.size();

    for (auto& [q, basis] : o.basis) {
      if (basis.n_cols == 0) continue;
      int q1 = 0, q2 = 0;
      SpMat th = copresheaf_theta(*y_, t, c, q, &q1, &q2);
      if (th.is_zero()) continue;
      SpMat v = th * basis;
      if (v.is_zero()) continue;
      int dt = y_->value(ct.tree).dim(q2);
      SpMat r1 = c1->reduce(a1, e1loc, q1);
      SpMat r2 = c2->reduce(a2, e2loc, q2);
      int n = q - p, n1 = q1 - p1, n2 = q2 - p2;
      int sgn = sigma;
      if ((q + p1 * q2) % 2) sgn = -sgn;
      SpMat& out = r.mats.at(n);
      for (auto& [rc1, v1] : r1.entries)
        for (auto& [rc2, v2] : r2.entries) {
          int row = r.layout->idx(n, {n1, n2}, {rc1.first, rc2.first});
          int mid = rc1.second * dt + rc2.second;
          for (auto& [rcv, vv] : v.entries) {
            if (rcv.first != mid) continue;
            out.add(row, o.offset.at(q) + rcv.second, v1 * v2 * vv * sgn);
          }
        }
    }
  }
  return r;
}

// --- BarAlgebraSystem --------------------------------------------------

BarAlgebraSystem::BarAlgebraSystem(std::shared_ptr<const NerveAlgebra> m, Window w)
    : m_(std::move(m)),
      w_(w),
      bm_(std::make_shared<BarCopresheaf>(m_, w)),
      bx_(std::make_shared<SuspendPresheaf>(std::make_shared<NerveOperad>(m_->operad()), 1),
          w) {}

std::shared_ptr<const BarComplex> BarAlgebraSystem::at(const Tree& t) const {
  return std::shared_ptr<const BarComplex>(bm_, &bm_->at(t));
}

StructMap BarAlgebraSystem::nabla_bar(const Morphism& alpha) const {
  if (!valid_morphism(alpha, Site::R)) throw std::invalid_argument("nabla_bar: bad morphism");
  if (!factor_inner_external(alpha).inner.is_iso())
    throw std::invalid_argument("nabla_bar: not a pruning");
  const Tree& S = alpha.src;
  const Tree& T = alpha.dst;
  bool seta = S.n_vertices() == 0;
  auto slvs = S.leaves();
  int nl = (int)slvs.size();

  // canonical pieces of T above the leaves of S
  std::vector<Subtree> suT(nl);
  std::vector<CanonResult> canT(nl);
  std::vector<std::vector<int>> canT_inv(nl);  // canonical edge -> local edge
  for (int j = 0; j < nl; ++j) {
    suT[j] = subtree_above(T, alpha.edge_map[slvs[j]]);
    canT[j] = canonicalize(suT[j].tree);
    canT_inv[j].assign(suT[j].tree.n_edges, -1);
    for (int e = 0; e < suT[j].tree.n_edges; ++e) canT_inv[j][canT[j].edge_iso[e]] = e;
  }

  StructMap r;
  r.src = std::shared_ptr<const ChainComplex>(bm_, &bm_->at(T).complex());
  r.factors.push_back(bx_.complex_at(S));
  for (int j = 0; j < nl; ++j)
    r.factors.push_back(std::shared_ptr<const ChainComplex>(bm_, &bm_->at(canT[j].tree).complex()));
  std::vector<const ChainComplex*> fp;
  for (auto& f : r.factors) fp.push_back(f.get());
  r.degree = seta ? 1 : 0;
  // only the degrees the source can reach are materialized
  r.layout = std::make_shared<TensorLayout>(fp, r.src->dims.begin()->first + r.degree - 1,
                                            r.src->dims.rbegin()->first + r.degree);
  r.dst = std::make_shared<ChainComplex>(r.layout->complex());
  for (auto& [n, dim] : r.src->dims) r.mats.emplace(n, SpMat::zero(r.dst->dim(n + r.degree), dim));

  auto bs = bx_.at(S);
  const PresheafBase& nx =
      dynamic_cast<const SuspendPresheaf&>(*bx_.input()).inner();  // operad nerve

  for (const BarOrbit& o : bm_->at(T).orbits()) {
    const Tree& U = o.t;
    auto bit = o.basis.find(0);  // algebra nerves are concentrated in degree 0
    if (bit == o.basis.end() || bit->second.n_cols == 0) continue;
    Morphism chi = compose(o.alpha0, alpha);
    auto fac = factor_inner_external(chi);
    const Tree& V = fac.inner.dst;
    const Morphism& eps = fac.external;
    auto canV = canonicalize(V);
    Morphism gammac{S, canV.tree, std::vector<int>(S.n_edges)};
    for (int e = 0; e < S.n_edges; ++e) gammac.edge_map[e] = canV.edge_iso[fac.inner.edge_map[e]];

    // marked inner edges of the coefficient piece
    std::vector<int> f_loc, f_glob;
    for (int e : V.inner_edges()) {
      f_loc.push_back(canV.edge_iso[e]);
      f_glob.push_back(eps.edge_map[e]);
    }
    std::vector<int> arranged;
    if (!seta) arranged.push_back(0);
    arranged.insert(arranged.end(), f_glob.begin(), f_glob.end());

    Morphism cV{V, canV.tree, canV.edge_iso};
    std::vector<SpMat> A;
    A.push_back(bs->reduce(gammac, f_loc, 1) * nx.transport(cV, 0));
    std::vector<int> ndeg{1 + (int)f_loc.size()};

    auto vlvs = V.leaves();
    std::vector<int> rowcomp(nl);     // tau row slot of the j-th factor
    std::vector<int> leafdims;        // tau per-V-leaf row dims, V-leaf order
    for (int le : vlvs)
      leafdims.push_back(m_->value(subtree_above(U, eps.edge_map[le]).tree).dim(0));
    int sum_g = 0;
    for (int j = 0; j < nl; ++j) {
      int l = slvs[j];
      int chil = chi.edge_map[l];
      rowcomp[j] =
          (int)(std::find(vlvs.begin(), vlvs.end(), fac.inner.edge_map[l]) - vlvs.begin());
      auto suU = subtree_above(U, chil);
      auto canU = canonicalize(suU.tree);
      std::vector<int> inv_suU(U.n_edges, -1);
      for (int e = 0; e < suU.tree.n_edges; ++e) inv_suU[suU.edge_from_t[e]] = e;
      std::vector<int> g_loc;
      for (int e : o.en)
        if (U.weakly_below(chil, e)) {
          arranged.push_back(e);
          g_loc.push_back(canU.edge_iso[inv_suU[e]]);
        }
      Morphism bj{canT[j].tree, canU.tree, std::vector<int>(canT[j].tree.n_edges)};
      for (int e = 0; e < canT[j].tree.n_edges; ++e) {
        int te = suT[j].edge_from_t[canT_inv[j][e]];
        bj.edge_map[e] = canU.edge_iso[inv_suU[o.alpha0.edge_map[te]]];
      }
      Morphism cU{suU.tree, canU.tree, canU.edge_iso};
      A.push_back(bm_->at(canT[j].tree).reduce(bj, g_loc, 0) * m_->transport(cU, 0));
      ndeg.push_back((int)g_loc.size());
      sum_g += (int)g_loc.size();
    }

    int sigma = enum_reorder_sign(o.en, arranged);
    int expo = (int)f_loc.size() * sum_g + (int)o.en.size();
    int sgn = (expo % 2) ? -sigma : sigma;

    SpMat v = m_->tau(eps) * bit->second;
    if (v.is_zero()) continue;
    int n = (int)o.en.size();
    SpMat& out = r.mats.at(n);
    int leafprod = 1;
    for (int d : leafdims) leafprod *= d;
    for (auto& [rc, vv] : v.entries) {
      // decode the tau row: operad-piece tuple, then per-V-leaf values
      int ix = rc.first / leafprod, rest = rc.first % leafprod;
      std::vector<int> iv(vlvs.size());
      for (int k = (int)vlvs.size() - 1; k >= 0; --k) {
        iv[k] = rest % leafdims[k];
        rest /= leafdims[k];
      }
      std::vector<int> rows(nl + 1);
      std::function<void(int, Rational)> emit = [&](int k, Rational coeff) {
        if (k == nl + 1) {
          out.add(r.layout->idx(n + r.degree, ndeg, rows), o.offset.at(0) + rc.second,
                  coeff * sgn);
          return;
        }
        int col = k == 0 ? ix : iv[rowcomp[k - 1]];
        for (auto& [rc2, v2] : A[k].entries) {
          if (rc2.second != col) continue;
          rows[k] = rc2.first;
          emit(k + 1, coeff * v2);
        }
      };
      emit(0, vv);
    }
  }
  return r;
}

// --- CobarCoalgebraSystem ----------------------------------------------

CobarCoalgebraSystem::CobarCoalgebraSystem(std::shared_ptr<const NerveCoalgebra> n, Window w)
    : n_(std::move(n)),
      w_(w),
      pn_(std::make_shared<CobarPresheaf>(n_, w)),
      cy_(std::make_shared<SuspendCopresheaf>(std::make_shared<NerveCocom>(n_->cooperad()), -1),
          w) {}

std::shared_ptr<const CobarComplex> CobarCoalgebraSystem::at(const Tree& t) const {
  return std::shared_ptr<const CobarComplex>(pn_, &pn_->at(t));
}

StructMap CobarCoalgebraSystem::theta_cobar(const Morphism& alpha) const {
  if (!valid_morphism(alpha, Site::R)) throw std::invalid_argument("theta_cobar: bad morphism");
  if (!factor_inner_external(alpha).inner.is_iso())
    throw std::invalid_argument("theta_cobar: not a pruning");
  const Tree& S = alpha.src;
  const Tree& T = alpha.dst;
  bool seta = S.n_vertices() == 0;
  auto slvs = S.leaves();
  int nl = (int)slvs.size();

  std::vector<Subtree> suT(nl);
  std::vector<CanonResult> canT(nl);
  std::vector<std::vector<int>> canT_inv(nl);
  for (int j = 0; j < nl; ++j) {
    suT[j] = subtree_above(T, alpha.edge_map[slvs[j]]);
    canT[j] = canonicalize(suT[j].tree);
    canT_inv[j].assign(suT[j].tree.n_edges, -1);
    for (int e = 0; e < suT[j].tree.n_edges; ++e) canT_inv[j][canT[j].edge_iso[e]] = e;
  }

  StructMap r;
  r.src = std::shared_ptr<const ChainComplex>(pn_, &pn_->at(T).complex());
  r.factors.push_back(cy_.complex_at(S));
  for (int j = 0; j < nl; ++j)
    r.factors.push_back(std::shared_ptr<const ChainComplex>(pn_, &pn_->at(canT[j].tree).complex()));
  std::vector<const ChainComplex*> fp;
  for (auto& f : r.factors) fp.push_back(f.get());
  r.degree = seta ? -1 : 0;
  // only the degrees the source can reach are materialized
  r.layout = std::make_shared<TensorLayout>(fp, r.src->dims.begin()->first + r.degree - 1,
                                            r.src->dims.rbegin()->first + r.degree);
  r.dst = std::make_shared<ChainComplex>(r.layout->complex());
  for (auto& [n, dim] : r.src->dims) r.mats.emplace(n, SpMat::zero(r.dst->dim(n + r.degree), dim));

  auto cs = cy_.at(S);
  const CopresheafBase& ny =
      dynamic_cast<const SuspendCopresheaf&>(*cy_.input()).inner();  // cooperad nerve

  for (const BarOrbit& o : pn_->at(T).orbits()) {
    const Tree& U = o.t;
    auto bit = o.basis.find(0);  // coalgebra nerves are concentrated in degree 0
    if (bit == o.basis.end() || bit->second.n_cols == 0) continue;
    Morphism chi = compose(o.alpha0, alpha);
    auto fac = factor_inner_external(chi);
    const Tree& V = fac.inner.dst;
    const Morphism& eps = fac.external;
    auto canV = canonicalize(V);
    Morphism gammac{S, canV.tree, std::vector<int>(S.n_edges)};
    for (int e = 0; e < S.n_edges; ++e) gammac.edge_map[e] = canV.edge_iso[fac.inner.edge_map[e]];

    std::vector<int> f_loc, f_glob;
    for (int e : V.inner_edges()) {
      f_loc.push_back(canV.edge_iso[e]);
      f_glob.push_back(eps.edge_map[e]);
    }
    std::vector<int> arranged;
    if (!seta) arranged.push_back(0);
    arranged.insert(arranged.end(), f_glob.begin(), f_glob.end());

    Morphism cV{V, canV.tree, canV.edge_iso};
    std::vector<SpMat> A;
    A.push_back(cs->reduce(gammac, f_loc, -1) * ny.transport(cV, 0));
    std::vector<int> ndeg{-1 - (int)f_loc.size()};

    auto vlvs = V.leaves();
    std::vector<int> rowcomp(nl);
    std::vector<int> leafdims;
    for (int le : vlvs)
      leafdims.push_back(n_->value(subtree_above(U, eps.edge_map[le]).tree).dim(0));
    int sum_g = 0;
    for (int j = 0; j < nl; ++j) {
      int l = slvs[j];
      int chil = chi.edge_map[l];
      rowcomp[j] =
          (int)(std::find(vlvs.begin(), vlvs.end(), fac.inner.edge_map[l]) - vlvs.begin());
      auto suU = subtree_above(U, chil);
      auto canU = canonicalize(suU.tree);
      std::vector<int> inv_suU(U.n_edges, -1);
      for (int e = 0; e < suU.tree.n_edges; ++e) inv_suU[suU.edge_from_t[e]] = e;
      std::vector<int> g_loc;
      for (int e : o.en)
        if (U.weakly_below(chil, e)) {
          arranged.push_back(e);
          g_loc.push_back(canU.edge_iso[inv_suU[e]]);
        }
      Morphism bj{canT[j].tree, canU.tree, std::vector<int>(canT[j].tree.n_edges)};
      for (int e = 0; e < canT[j].tree.n_edges; ++e) {
        int te = suT[j].edge_from_t[canT_inv[j][e]];
        bj.edge_map[e] = canU.edge_iso[inv_suU[o.alpha0.edge_map[te]]];
      }
      Morphism cU{suU.tree, canU.tree, canU.edge_iso};
      A.push_back(pn_->at(canT[j].tree).reduce(bj, g_loc, 0) * n_->transport(cU, 0));
      ndeg.push_back(-(int)g_loc.size());
      sum_g += (int)g_loc.size();
    }

    int sigma = enum_reorder_sign(o.en, arranged);
    int expo = (int)f_loc.size() * sum_g + (int)o.en.size();
    int sgn = (expo % 2) ? -sigma : sigma;

    SpMat v = n_->nabla(eps) * bit->second;
    if (v.is_zero()) continue;
    int n = -(int)o.en.size();
    SpMat& out = r.mats.at(n);
    int leafprod = 1;
    for (int d : leafdims) leafprod *= d;
    for (auto& [rc, vv] : v.entries) {
      int ix = rc.first / leafprod, rest = rc.first % leafprod;
      std::vector<int> iv(vlvs.size());
      for (int k = (int)vlvs.size() - 1; k >= 0; --k) {
        iv[k] = rest % leafdims[k];
        rest /= leafdims[k];
      }
      std::vector<int> rows(nl + 1);
      std::function<void(int, Rational)> emit = [&](int k, Rational coeff) {
        if (k == nl + 1) {
          out.add(r.layout->idx(n + r.degree, ndeg, rows), o.offset.at(0) + rc.second,
                  coeff * sgn);
          return;
        }
        int col = k == 0 ? ix : iv[rowcomp[k - 1]];
        for (auto& [rc2, v2] : A[k].entries) {
          if (rc2.second != col) continue;
          rows[k] = rc2.first;
          emit(k + 1, coeff * v2);
        }
      };
      emit(0, vv);
    }
  }
  return r;
}

bool delta_coassociative(const BarSystem& sys, const Tree& s, int a, int b) {
  return coassoc_impl([&](const Grafting& g) { return sys.delta(g); },
                      [&](const Morphism& c, int d) { return sys.copresheaf()->transport(c, d); },
                      s, a, b);
}

bool nabla_coassociative(const CobarSystem& sys, const Tree& s, int a, int b) {
  return coassoc_impl([&](const Grafting& g) { return sys.nabla(g); },
                      [&](const Morphism& c, int d) { return sys.presheaf()->transport(c, d); },
                      s, a, b);
}

}  // namespace dendro
