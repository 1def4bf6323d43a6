#include "dendro/homotopy.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "dendro/bar.hpp"

namespace dendro {

namespace {

// d h + h d as per-degree matrices
std::map<int, SpMat> commutator(const ChainComplex& c, const std::map<int, SpMat>& h) {
  std::map<int, SpMat> out;
  for (auto& [n, dim] : c.dims) {
    SpMat m = SpMat::zero(dim, dim);
    auto hn = h.find(n);
    if (hn != h.end()) m = m + c.boundary(n + 1) * hn->second;
    auto hb = h.find(n - 1);
    if (hb != h.end()) m = m + hb->second * c.boundary(n);
    out[n] = m;
  }
  return out;
}

// 0 if not +/- identity in every degree, else the common sign
int identity_sign(const ChainComplex& c, const std::map<int, SpMat>& m) {
  int sign = 0;
  for (auto& [n, dim] : c.dims) {
    if (dim == 0) continue;
    auto it = m.find(n);
    SpMat mat = it == m.end() ? SpMat::zero(dim, dim) : it->second;
    for (int s : {1, -1}) {
      if (mat == SpMat::ident(dim) * rat(s)) {
        if (sign == 0) sign = s;
        if (sign != s) return 0;
        goto next;
      }
    }
    return 0;
  next:;
  }
  return sign == 0 ? 1 : sign;
}

std::map<int, SpMat> scale(std::map<int, SpMat> h, int s) {
  if (s == 1) return h;
  for (auto& [n, m] : h) m = m * rat(s);
  return h;
}

std::map<int, SpMat> add(const std::map<int, SpMat>& a, const std::map<int, SpMat>& b) {
  std::map<int, SpMat> out = a;
  for (auto& [n, m] : b) {
    auto it = out.find(n);
    if (it == out.end())
      out[n] = m;
    else
      it->second = it->second + m;
  }
  return out;
}

}  // namespace

int FactComplex::face_index(unsigned P, unsigned E) const {
  auto it = index_.find({P, E});
  return it == index_.end() ? -1 : it->second.second;
}

std::vector<int> FactComplex::gens(const FactFace& f) const {
  std::vector<int> g;
  if (f.P == 0) return g;
  g.push_back(0);
  const Tree& t = gamma_.dst;
  for (int e = 1; e < t.n_edges; ++e)
    if (f.E & (1u << e)) g.push_back(e);
  std::sort(g.begin(), g.end(), [&](int a, int b) { return fpos_[a] < fpos_[b]; });
  return g;
}

// vertices reachable from top_vertex(edge) through contracted edges
// (inner edges of P that are not in E)
unsigned FactComplex::block_above(unsigned P, unsigned E, int edge) const {
  const Tree& t = gamma_.dst;
  unsigned block = 0;
  std::vector<int> stack{t.top_vertex(edge)};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v < 0 || !(P & (1u << v)) || (block & (1u << v))) continue;
    block |= 1u << v;
    for (int e : t.vert_in[v])
      if (!(E & (1u << e))) stack.push_back(t.top_vertex(e));
    int out = t.vert_out[v];
    if (out != edge && !(E & (1u << out))) stack.push_back(t.bottom_vertex(out));
  }
  return block;
}

// For a generating edge a absent from the face: insert a (and the vertex
// above it), with sign (-1)^{j+1} where j is the 0-based position of a among
// the new generators.  Pairs each face with its a-extension.
std::map<int, SpMat> FactComplex::add_gen_op(int a) const {
  const Tree& t = gamma_.dst;
  std::map<int, SpMat> h;
  for (int n = 0; n < (int)faces_.size(); ++n) {
    if (faces_[n].empty() || n + 1 >= (int)faces_.size()) continue;
    SpMat m = SpMat::zero((int)faces_[n + 1].size(), (int)faces_[n].size());
    for (int j0 = 0; j0 < (int)faces_[n].size(); ++j0) {
      const FactFace& f = faces_[n][j0];
      unsigned P2, E2;
      if (a == 0) {
        if (f.P != 0) continue;  // root insertion only applies to the edgeless face
        P2 = 1u << t.top_vertex(0);
        E2 = 0;
      } else {
        if (f.P == 0 || (f.E & (1u << a))) continue;
        int bv = t.bottom_vertex(a);
        if (bv < 0 || !(f.P & (1u << bv))) continue;
        P2 = f.P | (1u << t.top_vertex(a));
        E2 = f.E | (1u << a);
      }
      int i2 = face_index(P2, E2);
      if (i2 < 0) continue;
      auto g = gens({P2, E2, n + 1});
      int j = (int)(std::find(g.begin(), g.end(), a) - g.begin());
      m.add(i2, j0, rat(j % 2 == 0 ? -1 : 1));
    }
    h[n] = m;
  }
  return h;
}

// Contracting homotopy for the stratum of faces whose surviving vertices
// above edge a lie in vmask.  Recursion: pick an inner edge inside the
// allowed region; faces containing its top vertex are matched by toggling
// that edge, the rest are handled with a smaller region, and a corrector
// term glues the two homotopies.  Normalized so that d h + h d = -id.
std::map<int, SpMat> FactComplex::build_region(int a, unsigned vmask) const {
  const Tree& t = gamma_.dst;
  unsigned region = 0;
  for (int v = 0; v < t.n_vertices(); ++v)
    if (t.weakly_below(a, t.vert_out[v])) region |= 1u << v;
  auto in_stratum = [&](const FactFace& f) { return (f.P & region & ~vmask) == 0; };

  auto restrict_cols = [&](std::map<int, SpMat> h, auto pred) {
    for (auto& [n, m] : h)
      for (int j = 0; j < (int)faces_[n].size(); ++j)
        if (!pred(faces_[n][j]))
          for (int i = 0; i < (int)faces_[n + 1].size(); ++i) m.set(i, j, rat(0));
    return h;
  };
  // sign of d h + h d on the faces selected by pred (must be +/- id there)
  auto stratum_sign = [&](const std::map<int, SpMat>& h, auto pred) {
    ChainComplex qc;
    std::map<int, std::vector<int>> idx;
    for (int n = 0; n < (int)faces_.size(); ++n) {
      for (int j = 0; j < (int)faces_[n].size(); ++j)
        if (pred(faces_[n][j])) idx[n].push_back(j);
      qc.dims[n] = (int)idx[n].size();
    }
    for (int n = 1; n < (int)faces_.size(); ++n) {
      SpMat bd = SpMat::zero(qc.dims[n - 1], qc.dims[n]);
      const SpMat& full = c_.boundary(n);
      for (int jj = 0; jj < (int)idx[n].size(); ++jj)
        for (int ii = 0; ii < (int)idx[n - 1].size(); ++ii)
          bd.set(ii, jj, full.at(idx[n - 1][ii], idx[n][jj]));
      qc.d[n] = bd;
    }
    std::map<int, SpMat> qh;
    for (auto& [n, m] : h) {
      SpMat hh = SpMat::zero((int)idx[n + 1].size(), (int)idx[n].size());
      for (int jj = 0; jj < (int)idx[n].size(); ++jj)
        for (int ii = 0; ii < (int)idx[n + 1].size(); ++ii)
          hh.set(ii, jj, m.at(idx[n + 1][ii], idx[n][jj]));
      qh[n] = hh;
    }
    int s = identity_sign(qc, commutator(qc, qh));
    if (s == 0) throw std::logic_error("fact complex: partial homotopy is not +/- id");
    return s;
  };

  // an inner edge of the region whose endpoints are both still allowed
  unsigned allow = vmask & region;
  int arec = -1;
  for (int e : t.inner_edges())
    if ((allow & (1u << t.top_vertex(e))) &&
        (t.bottom_vertex(e) >= 0 && (allow & (1u << t.bottom_vertex(e))))) {
      arec = e;
      break;
    }
  if (arec < 0) {
    // base case: the region is a single block; toggle a itself
    auto h = restrict_cols(add_gen_op(a), in_stratum);
    return scale(std::move(h), -stratum_sign(h, in_stratum));
  }

  unsigned above = 0;
  for (int v = 0; v < t.n_vertices(); ++v)
    if (t.weakly_below(arec, t.vert_out[v])) above |= 1u << v;
  unsigned rest = vmask & ~above;

  auto in_d = [&](const FactFace& f) {
    return in_stratum(f) && (f.P & (1u << t.top_vertex(arec)));
  };
  auto in_c = [&](const FactFace& f) { return (f.P & region & ~rest) == 0; };

  auto hq = restrict_cols(add_gen_op(arec), in_d);
  hq = scale(std::move(hq), -stratum_sign(hq, in_d));

  std::map<int, SpMat> hp = build_region(a, rest);

  // corrector x = hp * b * hq where b is the component of d from D into C';
  // then d(hp + hq + x) + (hp + hq + x)d = -id on the whole span
  std::map<int, SpMat> corr;
  for (int n = 0; n + 1 < (int)faces_.size(); ++n) {
    auto itq = hq.find(n);
    auto itp = hp.find(n);
    if (itq == hq.end() || itp == hp.end()) continue;
    const SpMat& full = c_.boundary(n + 1);
    SpMat b = SpMat::zero((int)faces_[n].size(), (int)faces_[n + 1].size());
    for (int jj = 0; jj < (int)faces_[n + 1].size(); ++jj) {
      if (!in_d(faces_[n + 1][jj])) continue;
      for (int ii = 0; ii < (int)faces_[n].size(); ++ii)
        if (in_c(faces_[n][ii])) b.set(ii, jj, full.at(ii, jj));
    }
    corr[n] = itp->second * (b * itq->second);
  }
  return add(add(hp, hq), corr);
}

FactComplex::FactComplex(const Morphism& gamma, std::vector<int> f) : gamma_(gamma) {
  const Tree& t = gamma.dst;
  const Tree& r = gamma.src;
  if (!valid_morphism(gamma, Site::R)) throw std::invalid_argument("fact complex: invalid morphism");
  if (gamma.is_iso()) throw std::invalid_argument("fact complex: gamma is an isomorphism");
  if (t.n_edges > 30) throw std::invalid_argument("fact complex: tree too large");

  f_ = f.empty() ? generating_edges(t, Site::R) : std::move(f);
  fpos_.assign(t.n_edges, -1);
  for (int i = 0; i < (int)f_.size(); ++i) fpos_[f_[i]] = i;

  im_edge_.assign(t.n_edges, 0);
  im_inner_.assign(t.n_edges, 0);
  for (int e = 0; e < r.n_edges; ++e) im_edge_[gamma.edge_map[e]] = 1;
  for (int e : r.inner_edges()) im_inner_[gamma.edge_map[e]] = 1;
  std::vector<char> im_leaf(t.n_edges, 0);
  for (int e : r.leaves()) im_leaf[gamma.edge_map[e]] = 1;

  // enumerate downward closed vertex sets P and edge sets E inside P, keeping
  // the faces through which gamma factors
  int nv = t.n_vertices();
  auto inner = t.inner_edges();
  faces_.assign(nv + 2, {});
  for (unsigned P = 0; P < (1u << nv); ++P) {
    bool down = true;
    for (int v = 0; v < nv && down; ++v)
      if (P & (1u << v)) {
        int b = t.bottom_vertex(t.vert_out[v]);
        if (b >= 0 && !(P & (1u << b))) down = false;
      }
    if (!down) continue;
    std::vector<int> pe;  // inner edges inside P
    for (int e : inner)
      if ((P & (1u << t.top_vertex(e))) && (P & (1u << t.bottom_vertex(e)))) pe.push_back(e);
    for (unsigned sel = 0; sel < (1u << pe.size()); ++sel) {
      unsigned E = 0;
      for (int k = 0; k < (int)pe.size(); ++k)
        if (sel & (1u << k)) E |= 1u << pe[k];
      // factorization test
      bool ok = true;
      for (int e = 1; e < t.n_edges && ok; ++e) {
        if (im_inner_[e] && !(E & (1u << e))) ok = false;
        if (im_leaf[e] && !(E & (1u << e))) {
          int bv = t.bottom_vertex(e);
          int tv = t.top_vertex(e);
          if (bv < 0 || !(P & (1u << bv)) || (tv >= 0 && (P & (1u << tv)))) ok = false;
        }
      }
      if (P == 0) {
        // the edgeless face: only when gamma comes from eta
        if (r.n_edges != 1) ok = false;
      }
      if (!ok) continue;
      int deg = P == 0 ? 0 : std::popcount(E) + 1;
      index_[{P, E}] = {deg, (int)faces_[deg].size()};
      faces_[deg].push_back({P, E, deg});
    }
  }
  while (!faces_.empty() && faces_.back().empty()) faces_.pop_back();

  for (int n = 0; n < (int)faces_.size(); ++n) c_.dims[n] = (int)faces_[n].size();

  // differential
  for (int n = 1; n < (int)faces_.size(); ++n) {
    SpMat d = SpMat::zero((int)faces_[n - 1].size(), (int)faces_[n].size());
    for (int j = 0; j < (int)faces_[n].size(); ++j) {
      const FactFace& fc = faces_[n][j];
      auto g = gens(fc);
      for (int i = 0; i < (int)g.size(); ++i) {
        int e = g[i];
        int sgn = (i % 2 == 0) ? -1 : 1;  // (-1)^{i+1}, i 1-based
        if (e != 0 && !im_edge_[e]) {
          // contract e: merge the blocks at its endpoints
          int tgt = face_index(fc.P, fc.E & ~(1u << e));
          if (tgt >= 0) d.add(tgt, j, rat(sgn));
        }
        // chop the block above e
        unsigned blk = block_above(fc.P, fc.E, e);
        bool top = true;
        for (int e2 = 1; e2 < gamma_.dst.n_edges && top; ++e2) {
          if ((fc.E & (1u << e2)) && e2 != e) {
            int bv = gamma_.dst.bottom_vertex(e2);
            if (bv >= 0 && (blk & (1u << bv))) top = false;
          }
          if (im_edge_[e2]) {
            int bv = gamma_.dst.bottom_vertex(e2);
            if (bv >= 0 && (blk & (1u << bv))) top = false;
          }
        }
        if (im_inner_[e] || (e == 0 && gamma_.src.n_edges != 1)) top = false;
        if (top) {
          int tgt = face_index(fc.P & ~blk, fc.E & ~(1u << e));
          if (tgt >= 0) d.add(tgt, j, rat(-sgn));
        }
      }
    }
    c_.d[n] = d;
  }
  if (!c_.validate_d_squared()) throw std::logic_error("fact complex: d^2 != 0");

  // contracting homotopy
  auto fac = factor_inner_external(gamma);
  if (!fac.inner.is_iso()) {
    // an inner edge of the middle tree not hit by gamma
    int a = -1;
    std::vector<char> mid_inner(t.n_edges, 0);
    for (int e : fac.external.src.inner_edges()) mid_inner[fac.external.edge_map[e]] = 1;
    for (int e = 1; e < t.n_edges && a < 0; ++e)
      if (mid_inner[e] && !im_edge_[e]) a = e;
    if (a < 0) throw std::logic_error("fact complex: no free inner edge");
    h_ = add_gen_op(a);
  } else if (r.n_edges > 1) {
    // external non-iso: work above the image of a leaf of r that is an
    // inner edge of t
    int a = -1;
    for (int e : r.leaves())
      if (!t.is_leaf(gamma.edge_map[e]) && gamma.edge_map[e] != 0) {
        a = gamma.edge_map[e];
        break;
      }
    if (a < 0) throw std::logic_error("fact complex: no graftable leaf");
    h_ = build_region(a, (1u << nv) - 1);
  } else {
    h_ = build_region(0, (1u << nv) - 1);
  }

  sign_ = identity_sign(c_, commutator(c_, h_));
  if (sign_ == 0) {
#ifdef FACT_DEBUG
    fprintf(stderr, "faces per degree:");
    for (auto& fs : faces_) fprintf(stderr, " %d", (int)fs.size());
    fprintf(stderr, "\n");
    for (auto& [n, m] : c_.d)
      for (int i = 0; i < m.n_rows; ++i)
        for (int j = 0; j < m.n_cols; ++j)
          if (m.at(i, j) != 0) fprintf(stderr, "d[%d](%d,%d)=%s\n", n, i, j, m.at(i, j).get_str().c_str());
    for (auto& [n, m] : h_)
      for (int i = 0; i < m.n_rows; ++i)
        for (int j = 0; j < m.n_cols; ++j)
          if (m.at(i, j) != 0) fprintf(stderr, "h[%d](%d,%d)=%s\n", n, i, j, m.at(i, j).get_str().c_str());
#endif
    throw std::logic_error("fact complex: homotopy identity failed");
  }
}

bool FactComplex::identity_holds() const { return sign_ != 0; }

}  // namespace dendro
