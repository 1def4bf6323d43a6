#include "dendro/presheaf.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <sstream>

namespace dendro {

std::string structural_key(const Tree& t) {
  std::ostringstream os;
  os << t.n_edges << ";";
  for (size_t v = 0; v < t.vert_out.size(); ++v) {
    os << t.vert_out[v] << ":";
    for (int i : t.vert_in[v]) os << i << ",";
    os << ";";
  }
  return os.str();
}

std::string structural_key(const Morphism& m) {
  std::ostringstream os;
  os << structural_key(m.src) << "|" << structural_key(m.dst) << "|";
  for (int e : m.edge_map) os << e << ",";
  return os.str();
}

const ChainComplex& PresheafBase::value(const Tree& t) const {
  std::string k = structural_key(t);
  auto it = vcache_.find(k);
  if (it == vcache_.end()) it = vcache_.emplace(k, compute_value(t)).first;
  return it->second;
}

SpMat PresheafBase::restrict(const Morphism& m, int deg) const {
  std::string k = structural_key(m) + "@" + std::to_string(deg);
  auto it = rcache_.find(k);
  if (it == rcache_.end()) it = rcache_.emplace(k, compute_restrict(m, deg)).first;
  return it->second;
}

const ChainComplex& CopresheafBase::value(const Tree& t) const {
  std::string k = structural_key(t);
  auto it = vcache_.find(k);
  if (it == vcache_.end()) it = vcache_.emplace(k, compute_value(t)).first;
  return it->second;
}

SpMat CopresheafBase::push(const Morphism& m, int deg) const {
  std::string k = structural_key(m) + "@" + std::to_string(deg);
  auto it = pcache_.find(k);
  if (it == pcache_.end()) it = pcache_.emplace(k, compute_push(m, deg)).first;
  return it->second;
}

int CopresheafBase::support_bound(const Tree&) const { return INT_MAX; }

namespace {

// mixed-radix index helpers: index = sum with last factor fastest
int tuple_index(const std::vector<int>& dims, const std::vector<int>& tup) {
  int idx = 0;
  for (size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + tup[i];
  return idx;
}

void tuple_decode(const std::vector<int>& dims, int idx, std::vector<int>& tup) {
  tup.resize(dims.size());
  for (int i = (int)dims.size() - 1; i >= 0; --i) {
    tup[i] = idx % dims[i];
    idx /= dims[i];
  }
}

int product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

// vertices of b.tree (local order) as vertices of the ambient tree
std::vector<int> local_vertices(const Tree& local, const std::vector<int>& edge_from,
                                const Tree& ambient) {
  std::vector<int> out;
  for (int v = 0; v < local.n_vertices(); ++v)
    out.push_back(ambient.top_vertex(edge_from[local.vert_out[v]]));
  return out;
}

// per-vertex factor matrix for a blow-up: (x)_{w in local order} P -> P(arity v),
// with the result's inputs matching v's inputs in order
SpMat blowup_factor(const Operad& p, const Morphism& m, int v) {
  BlowUp b = blow_up(m, v);
  SpMat comp = operad_tree_composite(p, b.tree);
  auto lvs = b.tree.leaves();  // ascending local edge order: slot j <-> lvs[j]
  int k = m.src.arity(v);
  std::vector<int> rho(k);
  for (int i = 0; i < k; ++i)
    rho[i] = (int)(std::find(lvs.begin(), lvs.end(), b.leaf_of_src_input[i]) - lvs.begin());
  return p.relabel(k, rho) * comp;
}

}  // namespace

// --- NerveOperad ------------------------------------------------------

ChainComplex NerveOperad::compute_value(const Tree& t) const {
  ChainComplex c;
  int d = 1;
  for (int v = 0; v < t.n_vertices(); ++v) d *= p_.dim(t.arity(v));
  c.set_dim(0, d);
  return c;
}

SpMat NerveOperad::compute_restrict(const Morphism& m, int deg) const {
  int rows = value(m.src).dim(deg), cols = value(m.dst).dim(deg);
  SpMat out(rows, cols);
  if (deg != 0 || !rows || !cols) return out;
  const Tree &s = m.src, &t = m.dst;
  int ns = s.n_vertices();
  std::vector<SpMat> factor(ns);
  std::vector<std::vector<int>> members(ns);  // t-vertices consumed, local order
  for (int v = 0; v < ns; ++v) {
    BlowUp b = blow_up(m, v);
    factor[v] = blowup_factor(p_, m, v);
    members[v] = local_vertices(b.tree, b.edge_from_dst, t);
  }
  std::vector<int> tdims, sdims;
  for (int w = 0; w < t.n_vertices(); ++w) tdims.push_back(p_.dim(t.arity(w)));
  for (int v = 0; v < ns; ++v) sdims.push_back(p_.dim(s.arity(v)));
  std::vector<int> tup;
  for (int col = 0; col < cols; ++col) {
    tuple_decode(tdims, col, tup);
    // per-s-vertex vectors
    std::vector<std::vector<std::pair<int, Rational>>> vecs(ns);
    bool dead = false;
    for (int v = 0; v < ns && !dead; ++v) {
      std::vector<int> sub;
      std::vector<int> subdims;
      for (int w : members[v]) {
        sub.push_back(tup[w]);
        subdims.push_back(tdims[w]);
      }
      int fc = tuple_index(subdims, sub);
      for (int r = 0; r < factor[v].n_rows; ++r) {
        Rational x = factor[v].at(r, fc);
        if (x != 0) vecs[v].emplace_back(r, x);
      }
      if (vecs[v].empty()) dead = true;
    }
    if (dead) continue;
    std::vector<int> pick(ns, 0), stup(ns);
    std::function<void(int, Rational)> emit = [&](int v, Rational coeff) {
      if (v == ns) {
        out.add(tuple_index(sdims, stup), col, coeff);
        return;
      }
      for (auto& [r, x] : vecs[v]) {
        stup[v] = r;
        emit(v + 1, coeff * x);
      }
    };
    emit(0, Rational(1));
  }
  return out;
}

SpMat NerveOperad::theta(const Tree& S, int a, int deg) const {
  Cut c = cut_at(S, a);
  auto cb = canonicalize(c.bottom), ct = canonicalize(c.top);
  int rows = value(cb.tree).dim(0) * value(ct.tree).dim(0);
  int cols = value(S).dim(0);
  SpMat out(rows, cols);
  if (deg != 0 || !rows || !cols) return out;
  // transport factors along the two extraction+canonicalization isos
  Morphism mb{c.bottom, S, c.bottom_edge_from_t};
  Morphism mt{c.top, S, c.top_edge_from_t};
  // value(S) -> value(c.bottom) (x) value(c.top): the vertex factors of S are
  // split by membership; each piece is then transported to its canonical form
  const Tree& t = S;
  std::vector<int> tdims;
  for (int w = 0; w < t.n_vertices(); ++w) tdims.push_back(p_.dim(t.arity(w)));
  auto bverts = local_vertices(c.bottom, c.bottom_edge_from_t, t);
  auto tverts = local_vertices(c.top, c.top_edge_from_t, t);
  // raw split matrix into value(c.bottom) (x) value(c.top)
  std::vector<int> bdims, vdims;
  for (int v = 0; v < c.bottom.n_vertices(); ++v) bdims.push_back(p_.dim(c.bottom.arity(v)));
  for (int v = 0; v < c.top.n_vertices(); ++v) vdims.push_back(p_.dim(c.top.arity(v)));
  int bdim = product(bdims), vdim = product(vdims);
  SpMat split(bdim * vdim, cols);
  std::vector<int> tup, btup(bverts.size()), vtup(tverts.size());
  for (int col = 0; col < cols; ++col) {
    tuple_decode(tdims, col, tup);
    for (size_t i = 0; i < bverts.size(); ++i) btup[i] = tup[bverts[i]];
    for (size_t i = 0; i < tverts.size(); ++i) vtup[i] = tup[tverts[i]];
    split.set(tuple_index(bdims, btup) * vdim + tuple_index(vdims, vtup), col, 1);
  }
  SpMat tb = transport(Morphism{c.bottom, cb.tree, cb.edge_iso}, 0);
  SpMat tt = transport(Morphism{c.top, ct.tree, ct.edge_iso}, 0);
  // (tb (x) tt) . split
  SpMat big(rows, bdim * vdim);
  for (auto& [rc1, v1] : tb.entries)
    for (auto& [rc2, v2] : tt.entries)
      big.add(rc1.first * tt.n_rows + rc2.first, rc1.second * vdim + rc2.second, v1 * v2);
  return big * split;
}

// --- NerveAlgebra -----------------------------------------------------

ChainComplex NerveAlgebra::compute_value(const Tree& t) const {
  ChainComplex c;
  int d = 1;
  for (int v = 0; v < t.n_vertices(); ++v) d *= p_.dim(t.arity(v));
  for (size_t j = 0; j < t.leaves().size(); ++j) d *= a_.dim();
  c.set_dim(0, d);
  return c;
}

SpMat NerveAlgebra::compute_restrict(const Morphism& m, int deg) const {
  int rows = value(m.src).dim(deg), cols = value(m.dst).dim(deg);
  SpMat out(rows, cols);
  if (deg != 0 || !rows || !cols) return out;
  const Tree &s = m.src, &t = m.dst;
  int ns = s.n_vertices();
  auto slvs = s.leaves();
  auto tlvs = t.leaves();
  int nl = (int)slvs.size(), d = a_.dim();
  // factor matrices for vertices
  std::vector<SpMat> vfac(ns);
  std::vector<std::vector<int>> vmembers(ns);
  for (int v = 0; v < ns; ++v) {
    BlowUp b = blow_up(m, v);
    vfac[v] = blowup_factor(p_, m, v);
    vmembers[v] = local_vertices(b.tree, b.edge_from_dst, t);
  }
  // factor matrices for leaves: evaluate the subtree above m(l)
  std::vector<SpMat> lfac(nl);
  std::vector<std::vector<int>> lvmembers(nl);  // t-vertices, local order
  std::vector<std::vector<int>> llmembers(nl);  // t-leaf positions, ascending local order
  for (int j = 0; j < nl; ++j) {
    Subtree sub = subtree_above(t, m.edge_map[slvs[j]]);
    lfac[j] = algebra_tree_action(p_, a_, sub.tree);
    lvmembers[j] = local_vertices(sub.tree, sub.edge_from_t, t);
    for (int le : sub.tree.leaves()) {
      int te = sub.edge_from_t[le];
      llmembers[j].push_back((int)(std::find(tlvs.begin(), tlvs.end(), te) - tlvs.begin()));
    }
  }
  std::vector<int> tdims, sdims;
  for (int w = 0; w < t.n_vertices(); ++w) tdims.push_back(p_.dim(t.arity(w)));
  for (size_t f = 0; f < tlvs.size(); ++f) tdims.push_back(d);
  for (int v = 0; v < ns; ++v) sdims.push_back(p_.dim(s.arity(v)));
  for (int j = 0; j < nl; ++j) sdims.push_back(d);
  int ntv = t.n_vertices();
  std::vector<int> tup;
  for (int col = 0; col < cols; ++col) {
    tuple_decode(tdims, col, tup);
    std::vector<std::vector<std::pair<int, Rational>>> vecs(ns + nl);
    bool dead = false;
    for (int v = 0; v < ns && !dead; ++v) {
      std::vector<int> sub, subdims;
      for (int w : vmembers[v]) {
        sub.push_back(tup[w]);
        subdims.push_back(tdims[w]);
      }
      int fc = tuple_index(subdims, sub);
      for (int r = 0; r < vfac[v].n_rows; ++r) {
        Rational x = vfac[v].at(r, fc);
        if (x != 0) vecs[v].emplace_back(r, x);
      }
      if (vecs[v].empty()) dead = true;
    }
    for (int j = 0; j < nl && !dead; ++j) {
      std::vector<int> sub, subdims;
      for (int w : lvmembers[j]) {
        sub.push_back(tup[w]);
        subdims.push_back(tdims[w]);
      }
      for (int pos : llmembers[j]) {
        sub.push_back(tup[ntv + pos]);
        subdims.push_back(d);
      }
      int fc = tuple_index(subdims, sub);
      for (int r = 0; r < d; ++r) {
        Rational x = lfac[j].at(r, fc);
        if (x != 0) vecs[ns + j].emplace_back(r, x);
      }
      if (vecs[ns + j].empty()) dead = true;
    }
    if (dead) continue;
    std::vector<int> stup(ns + nl);
    std::function<void(int, Rational)> emit = [&](int i, Rational coeff) {
      if (i == ns + nl) {
        out.add(tuple_index(sdims, stup), col, coeff);
        return;
      }
      for (auto& [r, x] : vecs[i]) {
        stup[i] = r;
        emit(i + 1, coeff * x);
      }
    };
    emit(0, Rational(1));
  }
  return out;
}

SpMat NerveAlgebra::tau(const Morphism& eps) const {
  const Tree &V = eps.src, &U = eps.dst;
  auto fac = factor_inner_external(eps);
  if (!fac.inner.is_iso()) throw std::invalid_argument("tau: not a pruning");
  auto vlvs = V.leaves();
  auto ulvs = U.leaves();
  int nl = (int)vlvs.size(), d = a_.dim();
  // rows: NP(V) tuple, then per V-leaf the value(U_l) index, last fastest
  std::vector<int> rdims;
  for (int v = 0; v < V.n_vertices(); ++v) rdims.push_back(p_.dim(V.arity(v)));
  int np_len = V.n_vertices();
  std::vector<Subtree> subs(nl);
  std::vector<std::vector<int>> lvmembers(nl), llmembers(nl);
  for (int j = 0; j < nl; ++j) {
    subs[j] = subtree_above(U, eps.edge_map[vlvs[j]]);
    rdims.push_back(value(subs[j].tree).dim(0));
    lvmembers[j] = local_vertices(subs[j].tree, subs[j].edge_from_t, U);
    for (int le : subs[j].tree.leaves()) {
      int te = subs[j].edge_from_t[le];
      llmembers[j].push_back((int)(std::find(ulvs.begin(), ulvs.end(), te) - ulvs.begin()));
    }
  }
  int rows = product(rdims);
  int cols = value(U).dim(0);
  SpMat out(rows, cols);
  if (!rows || !cols) return out;
  // per-V-vertex relabel: vertex v maps to the U-vertex above eps(out v)
  int ntv = U.n_vertices();
  std::vector<int> tdims;
  for (int w = 0; w < ntv; ++w) tdims.push_back(p_.dim(U.arity(w)));
  for (size_t f = 0; f < ulvs.size(); ++f) tdims.push_back(d);
  std::vector<int> uvert_of(V.n_vertices());
  std::vector<SpMat> rel(V.n_vertices());
  for (int v = 0; v < V.n_vertices(); ++v) {
    int w = U.top_vertex(eps.edge_map[V.vert_out[v]]);
    uvert_of[v] = w;
    int k = V.arity(v);
    // input i of v lands on slot rho[i] of w
    std::vector<int> rho(k);
    for (int i = 0; i < k; ++i) {
      int ue = eps.edge_map[V.vert_in[v][i]];
      for (int j = 0; j < k; ++j)
        if (U.vert_in[w][j] == ue) rho[i] = j;
    }
    rel[v] = p_.relabel(k, rho);
  }
  std::vector<int> tup;
  for (int col = 0; col < cols; ++col) {
    tuple_decode(tdims, col, tup);
    std::vector<std::vector<std::pair<int, Rational>>> vecs(np_len + nl);
    bool dead = false;
    for (int v = 0; v < np_len && !dead; ++v) {
      for (int r = 0; r < rel[v].n_rows; ++r) {
        Rational x = rel[v].at(r, tup[uvert_of[v]]);
        if (x != 0) vecs[v].emplace_back(r, x);
      }
      if (vecs[v].empty()) dead = true;
    }
    for (int j = 0; j < nl && !dead; ++j) {
      // index of value(U_l): vertex factors (local order) then leaves
      std::vector<int> sub, subdims;
      for (int w : lvmembers[j]) {
        sub.push_back(tup[w]);
        subdims.push_back(tdims[w]);
      }
      for (int pos : llmembers[j]) {
        sub.push_back(tup[ntv + pos]);
        subdims.push_back(d);
      }
      vecs[np_len + j].emplace_back(tuple_index(subdims, sub), Rational(1));
    }
    if (dead) continue;
    std::vector<int> rtup(np_len + nl);
    std::function<void(int, Rational)> emit = [&](int i, Rational coeff) {
      if (i == np_len + nl) {
        out.add(tuple_index(rdims, rtup), col, coeff);
        return;
      }
      for (auto& [r, x] : vecs[i]) {
        rtup[i] = r;
        emit(i + 1, coeff * x);
      }
    };
    emit(0, Rational(1));
  }
  return out;
}

// --- NerveCocom -------------------------------------------------------

ChainComplex NerveCocom::compute_value(const Tree& t) const {
  ChainComplex c;
  int d = 1;
  for (int v = 0; v < t.n_vertices(); ++v)
    if (!c_.dim(t.arity(v))) d = 0;
  c.set_dim(0, d);
  return c;
}

SpMat NerveCocom::compute_push(const Morphism& m, int deg) const {
  int rows = value(m.dst).dim(deg), cols = value(m.src).dim(deg);
  SpMat out(rows, cols);
  if (deg == 0 && rows && cols) out.set(0, 0, 1);
  return out;
}

SpMat NerveCocom::theta(const Tree& S, int a, int deg) const {
  Cut c = cut_at(S, a);
  auto cb = canonicalize(c.bottom), ct = canonicalize(c.top);
  int rows = value(cb.tree).dim(0) * value(ct.tree).dim(0);
  int cols = value(S).dim(0);
  SpMat out(rows, cols);
  if (deg == 0 && rows && cols) out.set(0, 0, 1);
  return out;
}

// --- NerveCoalgebra ---------------------------------------------------

NerveCoalgebra::NerveCoalgebra(Cooperad c, Coalgebra e) : c_(std::move(c)), e_(std::move(e)) {
  depth_ = e_.coaction_depth();
}

ChainComplex NerveCoalgebra::compute_value(const Tree& t) const {
  ChainComplex c;
  int d = 1;
  for (int v = 0; v < t.n_vertices(); ++v)
    if (!c_.dim(t.arity(v))) d = 0;
  if (d)
    for (size_t j = 0; j < t.leaves().size(); ++j) d *= e_.dim();
  c.set_dim(0, d);
  return c;
}

int NerveCoalgebra::support_bound(const Tree& s) const {
  int nl = (int)s.leaves().size();
  return (nl - 1) + nl * depth_;
}

SpMat NerveCoalgebra::compute_push(const Morphism& m, int deg) const {
  int rows = value(m.dst).dim(deg), cols = value(m.src).dim(deg);
  SpMat out(rows, cols);
  if (deg != 0 || !rows || !cols) return out;
  const Tree &s = m.src, &t = m.dst;
  auto slvs = s.leaves();
  auto tlvs = t.leaves();
  int nl = (int)slvs.size(), d = e_.dim();
  std::vector<SpMat> lfac(nl);
  std::vector<std::vector<int>> llmembers(nl);
  for (int j = 0; j < nl; ++j) {
    Subtree sub = subtree_above(t, m.edge_map[slvs[j]]);
    lfac[j] = coalgebra_tree_coaction(e_, sub.tree);
    for (int le : sub.tree.leaves()) {
      int te = sub.edge_from_t[le];
      llmembers[j].push_back((int)(std::find(tlvs.begin(), tlvs.end(), te) - tlvs.begin()));
    }
  }
  std::vector<int> sdims(nl, d), tdims(tlvs.size(), d);
  std::vector<int> tup;
  for (int col = 0; col < cols; ++col) {
    tuple_decode(sdims, col, tup);
    // expand each source label along its subtree; combine into target tuple
    std::vector<std::vector<std::pair<std::vector<int>, Rational>>> exps(nl);
    bool dead = false;
    for (int j = 0; j < nl && !dead; ++j) {
      int k = (int)llmembers[j].size();
      std::vector<int> rdims(k, d), rtup;
      for (int r = 0; r < lfac[j].n_rows; ++r) {
        Rational x = lfac[j].at(r, tup[j]);
        if (x == 0) continue;
        tuple_decode(rdims, r, rtup);
        exps[j].emplace_back(rtup, x);
      }
      if (exps[j].empty()) dead = true;
    }
    if (dead) continue;
    std::vector<int> ttup(tlvs.size(), 0);
    std::function<void(int, Rational)> emit = [&](int j, Rational coeff) {
      if (j == nl) {
        out.add(tuple_index(tdims, ttup), col, coeff);
        return;
      }
      for (auto& [rtup, x] : exps[j]) {
        for (size_t q = 0; q < rtup.size(); ++q) ttup[llmembers[j][q]] = rtup[q];
        emit(j + 1, coeff * x);
      }
    };
    emit(0, Rational(1));
  }
  return out;
}

SpMat NerveCoalgebra::nabla(const Morphism& eps) const {
  const Tree &V = eps.src, &U = eps.dst;
  auto fac = factor_inner_external(eps);
  if (!fac.inner.is_iso()) throw std::invalid_argument("nabla: not a pruning");
  auto vlvs = V.leaves();
  auto ulvs = U.leaves();
  int nl = (int)vlvs.size(), d = e_.dim();
  std::vector<int> rdims{NerveCocom(c_).value(V).dim(0) ? 1 : 0};
  std::vector<std::vector<int>> llmembers(nl);
  for (int j = 0; j < nl; ++j) {
    Subtree sub = subtree_above(U, eps.edge_map[vlvs[j]]);
    rdims.push_back(value(sub.tree).dim(0));
    for (int le : sub.tree.leaves()) {
      int te = sub.edge_from_t[le];
      llmembers[j].push_back((int)(std::find(ulvs.begin(), ulvs.end(), te) - ulvs.begin()));
    }
  }
  int rows = product(rdims);
  int cols = value(U).dim(0);
  SpMat out(rows, cols);
  if (!rows || !cols) return out;
  std::vector<int> tdims(ulvs.size(), d), tup;
  for (int col = 0; col < cols; ++col) {
    tuple_decode(tdims, col, tup);
    std::vector<int> rtup(1 + nl);
    rtup[0] = 0;
    for (int j = 0; j < nl; ++j) {
      std::vector<int> sub, subdims;
      for (int pos : llmembers[j]) {
        sub.push_back(tup[pos]);
        subdims.push_back(d);
      }
      rtup[1 + j] = tuple_index(subdims, sub);
    }
    out.set(tuple_index(rdims, rtup), col, 1);
  }
  return out;
}

// --- Representable ----------------------------------------------------

ChainComplex Representable::compute_value(const Tree& t) const {
  ChainComplex c;
  c.set_dim(0, (int)hom(t, r0_, Site::R).size());
  return c;
}

SpMat Representable::compute_restrict(const Morphism& m, int deg) const {
  auto hsrc = hom(m.src, r0_, Site::R);
  auto hdst = hom(m.dst, r0_, Site::R);
  SpMat out((int)hsrc.size(), (int)hdst.size());
  if (deg != 0) return SpMat(value(m.src).dim(deg), value(m.dst).dim(deg));
  for (size_t c = 0; c < hdst.size(); ++c) {
    Morphism g = compose(hdst[c], m);
    for (size_t r = 0; r < hsrc.size(); ++r)
      if (hsrc[r].edge_map == g.edge_map) out.set((int)r, (int)c, 1);
  }
  return out;
}

// --- suspensions ------------------------------------------------------

std::string SuspendPresheaf::name() const {
  std::ostringstream os;
  os << "s";
  if (k_ != 1) os << "^" << k_;
  os << x_->name();
  return os.str();
}

ChainComplex SuspendPresheaf::compute_value(const Tree& t) const {
  const ChainComplex& in = x_->value(t);
  ChainComplex c;
  for (auto& [n, k] : in.dims) c.set_dim(n + k_, k);
  for (auto& [n, m] : in.d) {
    SpMat sm = (k_ % 2 == 0) ? m : m * Rational(-1);
    if (!sm.is_zero()) c.d[n + k_] = sm;
  }
  return c;
}

SpMat SuspendPresheaf::compute_restrict(const Morphism& m, int deg) const {
  return x_->restrict(m, deg - k_);
}

std::string SuspendCopresheaf::name() const {
  std::ostringstream os;
  os << "s";
  if (k_ != 1) os << "^" << k_;
  os << y_->name();
  return os.str();
}

ChainComplex SuspendCopresheaf::compute_value(const Tree& t) const {
  const ChainComplex& in = y_->value(t);
  ChainComplex c;
  for (auto& [n, k] : in.dims) c.set_dim(n + k_, k);
  for (auto& [n, m] : in.d) {
    SpMat sm = (k_ % 2 == 0) ? m : m * Rational(-1);
    if (!sm.is_zero()) c.d[n + k_] = sm;
  }
  return c;
}

SpMat SuspendCopresheaf::compute_push(const Morphism& m, int deg) const {
  return y_->push(m, deg - k_);
}

// --- validation -------------------------------------------------------

namespace {

template <typename F>
std::string check_pairs(int max_vertices, int max_arity, F&& fn) {
  auto trees = enumerate_trees(max_vertices, max_arity);
  for (auto& a : trees)
    for (auto& b : trees) {
      std::string err = fn(a, b, trees);
      if (!err.empty()) return err;
    }
  return "";
}

}  // namespace

std::string validate_presheaf(const PresheafBase& x, int max_vertices, int max_arity) {
  Site site = x.site();
  return check_pairs(max_vertices, max_arity, [&](const Tree& a, const Tree& b,
                                                  const std::vector<Tree>& trees) -> std::string {
    for (auto& f : hom(a, b, site)) {
      // chain-map property of restriction
      const ChainComplex &va = x.value(a), &vb = x.value(b);
      for (auto& [n, dim] : vb.dims) {
        SpMat lhs = va.boundary(n) * x.restrict(f, n);
        SpMat rhs = x.restrict(f, n - 1) * vb.boundary(n);
        if (!(lhs == rhs))
          return "restriction not a chain map: " + serialize(a) + " -> " + serialize(b);
      }
      // functoriality against further morphisms
      for (auto& c : trees) {
        if (c.n_vertices() < b.n_vertices()) continue;
        for (auto& g : hom(b, c, site)) {
          Morphism gf = compose(g, f);
          for (auto& [n, dim] : x.value(c).dims)
            if (!(x.restrict(gf, n) == x.restrict(f, n) * x.restrict(g, n)))
              return "functoriality fails: " + serialize(a) + " -> " + serialize(b) + " -> " +
                     serialize(c);
        }
      }
    }
    return "";
  });
}

std::string validate_copresheaf(const CopresheafBase& y, int max_vertices, int max_arity) {
  Site site = y.site();
  return check_pairs(max_vertices, max_arity, [&](const Tree& a, const Tree& b,
                                                  const std::vector<Tree>& trees) -> std::string {
    for (auto& f : hom(a, b, site)) {
      const ChainComplex &va = y.value(a), &vb = y.value(b);
      for (auto& [n, dim] : va.dims) {
        SpMat lhs = vb.boundary(n) * y.push(f, n);
        SpMat rhs = y.push(f, n - 1) * va.boundary(n);
        if (!(lhs == rhs))
          return "pushforward not a chain map: " + serialize(a) + " -> " + serialize(b);
      }
      for (auto& c : trees) {
        if (c.n_vertices() < b.n_vertices()) continue;
        for (auto& g : hom(b, c, site)) {
          Morphism gf = compose(g, f);
          for (auto& [n, dim] : y.value(a).dims)
            if (!(y.push(gf, n) == y.push(g, n) * y.push(f, n)))
              return "functoriality fails: " + serialize(a) + " -> " + serialize(b) + " -> " +
                     serialize(c);
        }
      }
    }
    return "";
  });
}

}  // namespace dendro
