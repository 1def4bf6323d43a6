#include "dendro/morphism.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace dendro {

Morphism identity(const Tree& t) {
  Morphism m{t, t, {}};
  m.edge_map.resize(t.n_edges);
  for (int e = 0; e < t.n_edges; ++e) m.edge_map[e] = e;
  return m;
}

Morphism compose(const Morphism& g, const Morphism& f) {
  if (!(f.dst == g.src)) throw std::invalid_argument("compose: mismatched trees");
  Morphism m{f.src, g.dst, {}};
  m.edge_map.resize(f.src.n_edges);
  for (int e = 0; e < f.src.n_edges; ++e) m.edge_map[e] = g.edge_map[f.edge_map[e]];
  return m;
}

Morphism inverse(const Morphism& iso) {
  if (!iso.is_iso()) throw std::invalid_argument("inverse: not an isomorphism");
  Morphism m{iso.dst, iso.src, {}};
  m.edge_map.resize(iso.dst.n_edges, -1);
  for (int e = 0; e < iso.src.n_edges; ++e) m.edge_map[iso.edge_map[e]] = e;
  return m;
}

namespace {

// check that E is a full antichain cut of the subtree of t above eps
bool cut_ok(const Tree& t, int eps, const std::set<int>& E) {
  std::set<int> hit;
  std::function<bool(int)> covered = [&](int e) -> bool {
    if (E.count(e)) {
      hit.insert(e);
      return true;
    }
    int v = t.top_vertex(e);
    if (v < 0) return false;
    for (int i : t.vert_in[v])
      if (!covered(i)) return false;
    return true;
  };
  if (E.count(eps)) return false;
  int v = t.top_vertex(eps);
  if (v < 0) return false;  // nothing above a leaf
  for (int i : t.vert_in[v])
    if (!covered(i)) return false;
  return hit.size() == E.size();
}

}  // namespace

bool valid_morphism(const Morphism& m, Site site) {
  const Tree &s = m.src, &t = m.dst;
  if ((int)m.edge_map.size() != s.n_edges) return false;
  for (int e : m.edge_map)
    if (e < 0 || e >= t.n_edges) return false;
  if (m.edge_map[0] != 0) return false;
  std::set<int> img(m.edge_map.begin(), m.edge_map.end());
  if ((int)img.size() != s.n_edges) return false;
  for (int v = 0; v < s.n_vertices(); ++v) {
    std::set<int> E;
    for (int i : s.vert_in[v]) E.insert(m.edge_map[i]);
    if (!cut_ok(t, m.edge_map[s.vert_out[v]], E)) return false;
  }
  if (site == Site::A) {
    auto sl = s.leaves(), tl = t.leaves();
    if (sl.size() != tl.size()) return false;
    for (int l : sl)
      if (!t.is_leaf(m.edge_map[l])) return false;
  }
  return true;
}

namespace {

// all antichain cuts above edge e (including {e} itself)
void cuts_above(const Tree& t, int e, std::vector<std::vector<int>>& out) {
  out.push_back({e});
  int v = t.top_vertex(e);
  if (v < 0) return;
  std::vector<std::vector<std::vector<int>>> per_input;
  for (int i : t.vert_in[v]) {
    per_input.emplace_back();
    cuts_above(t, i, per_input.back());
  }
  std::vector<int> acc;
  std::function<void(size_t)> combine = [&](size_t k) {
    if (k == per_input.size()) {
      out.push_back(acc);
      return;
    }
    for (auto& c : per_input[k]) {
      acc.insert(acc.end(), c.begin(), c.end());
      combine(k + 1);
      acc.resize(acc.size() - c.size());
    }
  };
  combine(0);
}

}  // namespace

std::vector<Morphism> hom(const Tree& src, const Tree& dst, Site site) {
  std::vector<Morphism> out;
  if (site == Site::A && src.leaves().size() != dst.leaves().size()) return out;
  // vertices of src in an order where the output edge is assigned first
  std::vector<int> order;
  std::function<void(int)> visit = [&](int e) {
    int v = src.top_vertex(e);
    if (v < 0) return;
    order.push_back(v);
    for (int i : src.vert_in[v]) visit(i);
  };
  visit(0);
  std::vector<int> assign(src.n_edges, -1);
  assign[0] = 0;
  std::function<void(size_t)> rec = [&](size_t idx) {
    if (idx == order.size()) {
      Morphism m{src, dst, assign};
      if (site == Site::A) {
        for (int l : src.leaves())
          if (!dst.is_leaf(assign[l])) return;
      }
      out.push_back(m);
      return;
    }
    int v = order[idx];
    int eps = assign[src.vert_out[v]];
    int k = src.arity(v);
    std::vector<std::vector<int>> cuts;
    cuts_above(dst, eps, cuts);
    for (auto& cut : cuts) {
      if ((int)cut.size() != k) continue;
      std::sort(cut.begin(), cut.end());
      do {
        for (int i = 0; i < k; ++i) assign[src.vert_in[v][i]] = cut[i];
        rec(idx + 1);
      } while (std::next_permutation(cut.begin(), cut.end()));
    }
    for (int i : src.vert_in[v]) assign[i] = -1;
  };
  rec(0);
  std::sort(out.begin(), out.end(),
            [](const Morphism& a, const Morphism& b) { return a.edge_map < b.edge_map; });
  return out;
}

std::vector<Morphism> automorphisms(const Tree& t) { return hom(t, t, Site::A); }

namespace {

std::string ccode(const Tree& t, int e, const std::vector<int>& col) {
  std::string s = "<" + std::to_string(col[e]);
  if (!t.is_leaf(e)) {
    std::vector<std::string> kids;
    for (int i : t.vert_in[t.top_vertex(e)]) kids.push_back(ccode(t, i, col));
    std::sort(kids.begin(), kids.end());
    s += "(";
    for (auto& k : kids) s += k;
    s += ")";
  }
  return s + ">";
}

bool cmatch(const Tree& t, int e1, int e2, const std::vector<int>& c1, const std::vector<int>& c2,
            std::vector<int>& gamma) {
  if (c1[e1] != c2[e2]) return false;
  if (t.is_leaf(e1) != t.is_leaf(e2)) return false;
  gamma[e1] = e2;
  if (t.is_leaf(e1)) return true;
  auto &k1 = t.vert_in[t.top_vertex(e1)], &k2 = t.vert_in[t.top_vertex(e2)];
  if (k1.size() != k2.size()) return false;
  // pair children with equal colored codes; equal codes are interchangeable
  std::vector<std::pair<std::string, int>> a, b;
  for (int i : k1) a.emplace_back(ccode(t, i, c1), i);
  for (int i : k2) b.emplace_back(ccode(t, i, c2), i);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (size_t j = 0; j < a.size(); ++j) {
    if (a[j].first != b[j].first) return false;
    if (!cmatch(t, a[j].second, b[j].second, c1, c2, gamma)) return false;
  }
  return true;
}

// automorphism of t exchanging the isomorphic subtrees above e1 and e2
Morphism swap_subtrees(const Tree& t, int e1, int e2) {
  Subtree s1 = subtree_above(t, e1), s2 = subtree_above(t, e2);
  auto c1 = canonicalize(s1.tree);
  auto c2 = canonicalize(s2.tree);
  std::vector<int> from_canon2(s2.tree.n_edges);
  for (int le = 0; le < s2.tree.n_edges; ++le) from_canon2[c2.edge_iso[le]] = le;
  std::vector<int> em(t.n_edges);
  for (int e = 0; e < t.n_edges; ++e) em[e] = e;
  for (int le = 0; le < s1.tree.n_edges; ++le) {
    int le2 = from_canon2[c1.edge_iso[le]];
    em[s1.edge_from_t[le]] = s2.edge_from_t[le2];
    em[s2.edge_from_t[le2]] = s1.edge_from_t[le];
  }
  return Morphism{t, t, em};
}

}  // namespace

std::string colored_code(const Tree& t, const std::vector<int>& colors) {
  return ccode(t, 0, colors);
}

std::vector<int> image_colors(const Morphism& m) {
  std::vector<int> col(m.dst.n_edges, -1);
  for (size_t a = 0; a < m.edge_map.size(); ++a) col[m.edge_map[a]] = (int)a;
  return col;
}

std::optional<Morphism> colored_automorphism(const Tree& t, const std::vector<int>& src_colors,
                                             const std::vector<int>& dst_colors) {
  std::vector<int> gamma(t.n_edges, -1);
  if (!cmatch(t, 0, 0, src_colors, dst_colors, gamma)) return std::nullopt;
  return Morphism{t, t, gamma};
}

std::vector<Morphism> stabilizer_generators(const Morphism& alpha) {
  std::vector<Morphism> gens;
  const Tree& t = alpha.dst;
  for (int l : alpha.src.leaves()) {
    Subtree sub = subtree_above(t, alpha.edge_map[l]);
    for (int v = 0; v < sub.tree.n_vertices(); ++v) {
      std::vector<std::pair<std::string, int>> tagged;
      for (int e : sub.tree.vert_in[v])
        tagged.emplace_back(serialize(canonicalize(subtree_above(sub.tree, e).tree).tree), e);
      std::stable_sort(tagged.begin(), tagged.end());
      for (size_t j = 0; j + 1 < tagged.size(); ++j) {
        if (tagged[j].first != tagged[j + 1].first) continue;
        gens.push_back(swap_subtrees(t, sub.edge_from_t[tagged[j].second],
                                     sub.edge_from_t[tagged[j + 1].second]));
      }
    }
  }
  return gens;
}

std::vector<Morphism> hom_up_to_iso(const Tree& src, const Tree& dst, Site site) {
  auto all = hom(src, dst, site);
  std::vector<std::string> order;
  std::map<std::string, Morphism> reps;
  auto id = identity(src).edge_map;
  for (auto& m : all) {
    std::string key = colored_code(dst, image_colors(m));
    auto it = reps.find(key);
    if (it == reps.end()) {
      reps.emplace(key, m);
      order.push_back(key);
    } else if (src == dst && m.edge_map == id) {
      it->second = m;
    }
  }
  std::vector<Morphism> out;
  for (auto& k : order) out.push_back(reps.at(k));
  return out;
}

Morphism inner_face(const Tree& t, int e) {
  if (e == 0 || t.is_leaf(e)) throw std::invalid_argument("inner_face: not an inner edge");
  int w = t.top_vertex(e), u = t.bottom_vertex(e);
  Morphism m;
  m.dst = t;
  std::vector<int> to_new(t.n_edges, -1);
  Tree& s = m.src;
  s.n_edges = 0;
  for (int ed = 0; ed < t.n_edges; ++ed)
    if (ed != e) {
      to_new[ed] = s.n_edges++;
      m.edge_map.push_back(ed);
    }
  for (int v = 0; v < t.n_vertices(); ++v) {
    if (v == w) continue;
    s.vert_out.push_back(to_new[t.vert_out[v]]);
    s.vert_in.emplace_back();
    for (int i : t.vert_in[v]) {
      if (v == u && i == e) {
        for (int j : t.vert_in[w]) s.vert_in.back().push_back(to_new[j]);
      } else {
        s.vert_in.back().push_back(to_new[i]);
      }
    }
  }
  return m;
}

Morphism top_face(const Tree& t, int v) {
  for (int i : t.vert_in[v])
    if (!t.is_leaf(i)) throw std::invalid_argument("top_face: vertex is not a top vertex");
  std::set<int> drop(t.vert_in[v].begin(), t.vert_in[v].end());
  Morphism m;
  m.dst = t;
  std::vector<int> to_new(t.n_edges, -1);
  Tree& s = m.src;
  s.n_edges = 0;
  for (int ed = 0; ed < t.n_edges; ++ed)
    if (!drop.count(ed)) {
      to_new[ed] = s.n_edges++;
      m.edge_map.push_back(ed);
    }
  for (int u = 0; u < t.n_vertices(); ++u) {
    if (u == v) continue;
    s.vert_out.push_back(to_new[t.vert_out[u]]);
    s.vert_in.emplace_back();
    for (int i : t.vert_in[u]) s.vert_in.back().push_back(to_new[i]);
  }
  return m;
}

InnerExternal factor_inner_external(const Morphism& m) {
  const Tree& t = m.dst;
  std::set<int> cut;
  for (int l : m.src.leaves()) cut.insert(m.edge_map[l]);
  // middle tree: edges with no cut edge strictly below them
  std::vector<char> keep(t.n_edges, 0);
  std::function<void(int, bool)> walk = [&](int e, bool below_cut) {
    keep[e] = below_cut ? 0 : 1;
    if (cut.count(e)) below_cut = true;
    int v = t.top_vertex(e);
    if (v < 0) return;
    for (int i : t.vert_in[v]) walk(i, below_cut);
  };
  walk(0, false);
  InnerExternal r;
  std::vector<int> to_new(t.n_edges, -1);
  Tree& mid = r.external.src;
  mid.n_edges = 0;
  r.external.dst = t;
  for (int e = 0; e < t.n_edges; ++e)
    if (keep[e]) {
      to_new[e] = mid.n_edges++;
      r.external.edge_map.push_back(e);
    }
  for (int v = 0; v < t.n_vertices(); ++v) {
    if (!keep[t.vert_out[v]] || cut.count(t.vert_out[v])) continue;
    mid.vert_out.push_back(to_new[t.vert_out[v]]);
    mid.vert_in.emplace_back();
    for (int i : t.vert_in[v]) mid.vert_in.back().push_back(to_new[i]);
  }
  r.inner.src = m.src;
  r.inner.dst = mid;
  for (int e = 0; e < m.src.n_edges; ++e) r.inner.edge_map.push_back(to_new[m.edge_map[e]]);
  return r;
}

BlowUp blow_up(const Morphism& m, int v) {
  const Tree& t = m.dst;
  std::set<int> E;
  for (int i : m.src.vert_in[v]) E.insert(m.edge_map[i]);
  BlowUp b;
  std::vector<int> to_new(t.n_edges, -1);
  std::function<void(int)> walk = [&](int e) {
    to_new[e] = (int)b.edge_from_dst.size();
    b.edge_from_dst.push_back(e);
    if (E.count(e)) return;  // cut edges become leaves
    int w = t.top_vertex(e);
    if (w < 0) return;
    for (int i : t.vert_in[w]) walk(i);
  };
  walk(m.edge_map[m.src.vert_out[v]]);
  b.tree.n_edges = (int)b.edge_from_dst.size();
  for (int w = 0; w < t.n_vertices(); ++w) {
    int oe = t.vert_out[w];
    if (to_new[oe] < 0 || E.count(oe)) continue;
    b.tree.vert_out.push_back(to_new[oe]);
    b.tree.vert_in.emplace_back();
    for (int i : t.vert_in[w]) b.tree.vert_in.back().push_back(to_new[i]);
  }
  for (int i : m.src.vert_in[v]) b.leaf_of_src_input.push_back(to_new[m.edge_map[i]]);
  return b;
}

std::optional<Morphism> factor_through(const Morphism& g, const Morphism& f, Site site) {
  for (auto& a : hom(f.dst, g.dst, site))
    if (compose(a, f).edge_map == g.edge_map) return a;
  return std::nullopt;
}

int permutation_sign(const std::vector<int>& perm) {
  int s = 1;
  for (size_t i = 0; i < perm.size(); ++i)
    for (size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) s = -s;
  return s;
}

}  // namespace dendro
