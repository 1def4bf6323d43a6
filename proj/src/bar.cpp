#include "dendro/bar.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace dendro {

int safe_degree_bound(const Window& w, const Tree& s) {
  return w.max_vertices - s.n_vertices() - 1;
}

std::vector<int> generating_edges(const Tree& t, Site site) {
  if (t.n_vertices() == 0) return {};
  std::vector<int> out;
  if (site == Site::R) out.push_back(0);
  for (int e : t.inner_edges()) out.push_back(e);
  return out;
}

namespace {

int find_pos(const std::vector<int>& v, int x) {
  return (int)(std::find(v.begin(), v.end(), x) - v.begin());
}

// sign of the permutation g induces on the enumeration en
int enum_sign(const Morphism& g, const std::vector<int>& en) {
  std::vector<int> perm(en.size());
  for (size_t i = 0; i < en.size(); ++i) perm[i] = find_pos(en, g.edge_map[en[i]]);
  return permutation_sign(perm);
}

// unique h with face . h = alpha (both into face.dst), by pointwise preimage
std::optional<Morphism> through(const Morphism& alpha, const Morphism& face) {
  std::vector<int> inv(face.dst.n_edges, -1);
  for (int a = 0; a < face.src.n_edges; ++a) inv[face.edge_map[a]] = a;
  Morphism h{alpha.src, face.src, {}};
  for (int a : alpha.edge_map) {
    if (inv[a] < 0) return std::nullopt;
    h.edge_map.push_back(inv[a]);
  }
  return h;
}

// the enumeration with entry i dropped, carried through the face's preimage
std::vector<int> drop_through(const std::vector<int>& en, int i, const Morphism& face) {
  std::vector<int> inv(face.dst.n_edges, -1);
  for (int a = 0; a < face.src.n_edges; ++a) inv[face.edge_map[a]] = a;
  std::vector<int> out;
  for (size_t j = 0; j < en.size(); ++j)
    if ((int)j != i) out.push_back(inv[en[j]]);
  return out;
}

using TransportFn = std::function<SpMat(const Morphism&, int)>;  // along an iso
using ValueFn = std::function<const ChainComplex&(const Tree&)>;

struct Model {
  std::vector<BarOrbit> orbits;
  std::map<std::string, std::vector<int>> by_tree;
  ChainComplex c;
};

// sgn = +1: degree q+p (bar); sgn = -1: degree q-p (cobar)
Model build_model(const Tree& s, Site site, const Window& w, const ValueFn& value,
                  const TransportFn& transport, int sgn) {
  Model m;
  for (auto& t : enumerate_trees(w.max_vertices, w.max_arity)) {
    auto reps = hom_up_to_iso(s, t, site);
    if (reps.empty()) continue;
    auto en = generating_edges(t, site);
    std::string code = serialize(t);
    for (auto& alpha0 : reps) {
      BarOrbit o;
      o.t = t;
      o.alpha0 = alpha0;
      o.code = colored_code(t, image_colors(alpha0));
      o.en = en;
      o.stab = stabilizer_generators(alpha0);
      const ChainComplex& val = value(t);
      for (auto& [q, dim] : val.dims) {
        if (!dim) continue;
        if (o.stab.empty()) {
          o.basis[q] = SpMat::ident(dim);
          o.coords[q] = SpMat::ident(dim);
          continue;
        }
        // sign-twisted invariants: joint kernel of (sign(g) g - 1) over generators
        SpMat k((int)o.stab.size() * dim, dim);
        for (size_t gi = 0; gi < o.stab.size(); ++gi) {
          SpMat rel = transport(o.stab[gi], q) * rat(enum_sign(o.stab[gi], en)) +
                      SpMat::ident(dim) * rat(-1);
          k.insert_block((int)gi * dim, 0, rel);
        }
        SpMat basis = kernel_basis(k);
        if (!basis.n_cols) continue;
        // rescale each column to the orbit average (entries +-1/orbit),
        // matching the averaging-projector normalization
        SpMat scale(basis.n_cols, basis.n_cols);
        for (int j = 0; j < basis.n_cols; ++j) {
          long nz = 0;
          for (int i = 0; i < basis.n_rows; ++i)
            if (basis.at(i, j) != 0) ++nz;
          scale.set(j, j, rat(1, nz));
        }
        basis = basis * scale;
        // transports are signed permutations, so orthogonal projection gives the class map
        SpMat bt = basis.transpose();
        o.basis[q] = basis;
        o.coords[q] = solve_matrix(bt * basis, bt);
      }
      if (o.basis.empty()) continue;
      m.by_tree[code].push_back((int)m.orbits.size());
      m.orbits.push_back(std::move(o));
    }
  }
  std::map<int, int> tot;
  for (auto& o : m.orbits) {
    int p = (int)o.en.size();
    for (auto& [q, basis] : o.basis) {
      int n = q + sgn * p;
      o.offset[q] = tot[n];
      tot[n] += basis.n_cols;
    }
  }
  for (auto& [n, d] : tot) m.c.set_dim(n, d);
  return m;
}

SpMat model_reduce(const std::vector<BarOrbit>& orbits,
                   const std::map<std::string, std::vector<int>>& by_tree,
                   const ChainComplex& c, Site site, const Window& w, const ValueFn& value,
                   const TransportFn& transport, int sgn, const Morphism& alpha,
                   const std::vector<int>& e, int q) {
  int p = (int)e.size();
  int n = q + sgn * p;
  int cols = value(alpha.dst).dim(q);
  SpMat out(c.dim(n), cols);
  if (!cols || !out.n_rows) return out;
  auto cr = canonicalize(alpha.dst);
  if (cr.tree.n_vertices() > w.max_vertices || !cr.tree.valid(w.max_arity)) return out;
  auto it = by_tree.find(serialize(cr.tree));
  if (it == by_tree.end()) return out;
  Morphism mc{alpha.dst, cr.tree, cr.edge_iso};
  Morphism ac = compose(mc, alpha);
  auto en = generating_edges(cr.tree, site);
  std::vector<int> perm(p);
  for (int i = 0; i < p; ++i) perm[i] = find_pos(en, cr.edge_iso[e[i]]);
  int sign = permutation_sign(perm);
  std::string acode = colored_code(cr.tree, image_colors(ac));
  for (int oi : it->second) {
    const BarOrbit& o = orbits[oi];
    if (o.code != acode) continue;
    auto g = colored_automorphism(cr.tree, image_colors(ac), image_colors(o.alpha0));
    if (!g) continue;
    auto bit = o.coords.find(q);
    if (bit == o.coords.end()) return out;
    SpMat block =
        bit->second * transport(*g, q) * transport(mc, q) * rat(sign * enum_sign(*g, en));
    out.insert_block(o.offset.at(q), 0, block);
    return out;
  }
  return out;
}

}  // namespace

// --- BarComplex -------------------------------------------------------

BarComplex::BarComplex(std::shared_ptr<const PresheafBase> x, const Tree& s, Window w)
    : x_(std::move(x)), s_(s), w_(w) {
  build();
  install_differential();
}

void BarComplex::build() {
  ValueFn value = [this](const Tree& t) -> const ChainComplex& { return x_->value(t); };
  TransportFn transport = [this](const Morphism& g, int q) { return x_->transport(g, q); };
  Model m = build_model(s_, site(), w_, value, transport, +1);
  orbits_ = std::move(m.orbits);
  by_tree_ = std::move(m.by_tree);
  c_ = std::move(m.c);
}

SpMat BarComplex::reduce(const Morphism& alpha, const std::vector<int>& e, int q) const {
  ValueFn value = [this](const Tree& t) -> const ChainComplex& { return x_->value(t); };
  TransportFn transport = [this](const Morphism& g, int q2) { return x_->transport(g, q2); };
  return model_reduce(orbits_, by_tree_, c_, site(), w_, value, transport, +1, alpha, e, q);
}

void BarComplex::install_differential() {
  for (auto& o : orbits_) {
    int p = (int)o.en.size();
    const ChainComplex& val = x_->value(o.t);
    for (auto& [q, basis] : o.basis) {
      int n = q + p;
      SpMat total(c_.dim(n - 1), val.dim(q));
      total = total + reduce(o.alpha0, o.en, q - 1) * val.boundary(q);
      int base = ((p + q) % 2 == 0) ? 1 : -1;
      for (int i = 0; i < p; ++i) {
        int ei = o.en[i];
        int s1 = base * (i % 2 == 0 ? 1 : -1);
        bool in_image = std::find(o.alpha0.edge_map.begin(), o.alpha0.edge_map.end(), ei) !=
                        o.alpha0.edge_map.end();
        if (!in_image) {
          Morphism delta = inner_face(o.t, ei);
          auto ap = through(o.alpha0, delta);
          if (ap)
            total = total + reduce(*ap, drop_through(o.en, i, delta), q) *
                                x_->restrict(delta, q) * rat(s1);
        }
        if (site() == Site::R) {
          int vi = o.t.top_vertex(ei);
          bool top = true;
          for (int in : o.t.vert_in[vi]) top = top && o.t.is_leaf(in);
          bool outside = false;
          for (int l : s_.leaves())
            outside = outside || o.t.weakly_below(o.alpha0.edge_map[l], ei);
          if (top && outside) {
            Morphism phi = top_face(o.t, vi);
            auto ap = through(o.alpha0, phi);
            if (ap)
              total = total + reduce(*ap, drop_through(o.en, i, phi), q) *
                                  x_->restrict(phi, q) * rat(-s1);
          }
        }
      }
      SpMat block = total * basis;
      if (block.is_zero()) continue;
      SpMat& d = c_.d[n];
      if (d.n_rows == 0 && d.n_cols == 0) d = SpMat(c_.dim(n - 1), c_.dim(n));
      d.insert_block(0, o.offset.at(q), block);
    }
  }
}

// --- CobarComplex -----------------------------------------------------

CobarComplex::CobarComplex(std::shared_ptr<const CopresheafBase> y, const Tree& s, Window w)
    : y_(std::move(y)), s_(s), w_(w) {
  build();
  install_differential();
}

void CobarComplex::build() {
  ValueFn value = [this](const Tree& t) -> const ChainComplex& { return y_->value(t); };
  TransportFn transport = [this](const Morphism& g, int q) { return y_->transport(g, q); };
  Model m = build_model(s_, site(), w_, value, transport, -1);
  orbits_ = std::move(m.orbits);
  by_tree_ = std::move(m.by_tree);
  c_ = std::move(m.c);
}

SpMat CobarComplex::reduce(const Morphism& alpha, const std::vector<int>& e, int q) const {
  ValueFn value = [this](const Tree& t) -> const ChainComplex& { return y_->value(t); };
  TransportFn transport = [this](const Morphism& g, int q2) { return y_->transport(g, q2); };
  return model_reduce(orbits_, by_tree_, c_, site(), w_, value, transport, -1, alpha, e, q);
}

void CobarComplex::install_differential() {
  auto trees = enumerate_trees(w_.max_vertices, w_.max_arity);
  for (auto& o : orbits_) {
    int p = (int)o.en.size();
    const ChainComplex& val = y_->value(o.t);
    int nl = (int)o.t.leaves().size();
    for (auto& [q, basis] : o.basis) {
      int n = q - p;
      SpMat total(c_.dim(n - 1), val.dim(q));
      total = total + reduce(o.alpha0, o.en, q - 1) * val.boundary(q);
      int sq = (q % 2 == 0) ? 1 : -1;
      for (auto& t2 : trees) {
        if (t2.n_vertices() != o.t.n_vertices() + 1) continue;
        auto gen2 = generating_edges(t2, site());
        for (auto& d : hom_up_to_iso(o.t, t2, site())) {
          // the one generating edge not hit by d, listed first
          std::vector<int> de;
          for (int e2 : gen2) {
            bool hit = false;
            for (int e : o.en) hit = hit || (d.edge_map[e] == e2);
            if (!hit) de.push_back(e2);
          }
          if (de.size() != 1) continue;
          for (int e : o.en) de.push_back(d.edge_map[e]);
          bool topext = (int)t2.leaves().size() != nl;
          total = total + reduce(compose(d, o.alpha0), de, q) * y_->push(d, q) *
                              rat(topext ? -sq : sq);
        }
      }
      SpMat block = total * basis;
      if (block.is_zero()) continue;
      SpMat& dm = c_.d[n];
      if (dm.n_rows == 0 && dm.n_cols == 0) dm = SpMat(c_.dim(n - 1), c_.dim(n));
      dm.insert_block(0, o.offset.at(q), block);
    }
  }
}

// --- adapters ---------------------------------------------------------

BarCopresheaf::BarCopresheaf(std::shared_ptr<const PresheafBase> x, Window w)
    : x_(std::move(x)), w_(w) {}

const BarComplex& BarCopresheaf::at(const Tree& t) const {
  std::string k = structural_key(t);
  auto it = cache_.find(k);
  if (it == cache_.end())
    it = cache_.emplace(k, std::make_unique<BarComplex>(x_, t, w_)).first;
  return *it->second;
}

ChainComplex BarCopresheaf::compute_value(const Tree& t) const { return at(t).complex(); }

SpMat BarCopresheaf::compute_push(const Morphism& m, int deg) const {
  const BarComplex& ms = at(m.src);
  const BarComplex& mr = at(m.dst);
  SpMat out(mr.complex().dim(deg), ms.complex().dim(deg));
  for (auto& o : ms.orbits()) {
    int p = (int)o.en.size();
    for (auto& [q, basis] : o.basis) {
      if (q + p != deg) continue;
      for (auto& a : mr.orbits()) {
        if (!(a.t == o.t)) continue;
        auto bit = a.coords.find(q);
        if (bit == a.coords.end()) continue;
        // one transfer term per target class pulling back to this one
        Morphism am = compose(a.alpha0, m);
        auto g = colored_automorphism(o.t, image_colors(am), image_colors(o.alpha0));
        if (!g) continue;
        Morphism gi = inverse(*g);
        SpMat block = bit->second * x_->transport(gi, q) * basis * rat(enum_sign(gi, o.en));
        out.insert_block(a.offset.at(q), o.offset.at(q), block);
      }
    }
  }
  return out;
}

CobarPresheaf::CobarPresheaf(std::shared_ptr<const CopresheafBase> y, Window w)
    : y_(std::move(y)), w_(w) {}

const CobarComplex& CobarPresheaf::at(const Tree& t) const {
  std::string k = structural_key(t);
  auto it = cache_.find(k);
  if (it == cache_.end())
    it = cache_.emplace(k, std::make_unique<CobarComplex>(y_, t, w_)).first;
  return *it->second;
}

ChainComplex CobarPresheaf::compute_value(const Tree& t) const { return at(t).complex(); }

SpMat CobarPresheaf::compute_restrict(const Morphism& m, int deg) const {
  const CobarComplex& ms = at(m.src);
  const CobarComplex& mr = at(m.dst);
  SpMat out(ms.complex().dim(deg), mr.complex().dim(deg));
  for (auto& a : mr.orbits()) {
    int p = (int)a.en.size();
    for (auto& [q, basis] : a.basis) {
      if (q - p != deg) continue;
      SpMat block = ms.reduce(compose(a.alpha0, m), a.en, q) * basis;
      out.insert_block(0, a.offset.at(q), block);
    }
  }
  return out;
}

}  // namespace dendro
