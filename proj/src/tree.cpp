#include "dendro/tree.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace dendro {

const Tree eta{};

int Tree::top_vertex(int e) const {
  for (int v = 0; v < n_vertices(); ++v)
    if (vert_out[v] == e) return v;
  return -1;
}

int Tree::bottom_vertex(int e) const {
  for (int v = 0; v < n_vertices(); ++v)
    for (int i : vert_in[v])
      if (i == e) return v;
  return -1;
}

std::vector<int> Tree::leaves() const {
  std::vector<int> out;
  for (int e = 0; e < n_edges; ++e)
    if (is_leaf(e)) out.push_back(e);
  return out;
}

std::vector<int> Tree::inner_edges() const {
  std::vector<int> out;
  for (int e = 1; e < n_edges; ++e)
    if (!is_leaf(e)) out.push_back(e);
  return out;
}

bool Tree::weakly_below(int b, int a) const {
  int e = a;
  while (true) {
    if (e == b) return true;
    int v = bottom_vertex(e);
    if (v < 0) return false;
    e = vert_out[v];
  }
}

bool Tree::valid(int max_arity) const {
  if (n_edges < 1) return false;
  int expected = 1;
  for (auto& in : vert_in) expected += (int)in.size();
  if (expected != n_edges) return false;
  std::vector<int> seen(n_edges, 0);
  for (int e : vert_out) {
    if (e < 0 || e >= n_edges) return false;
    ++seen[e];
  }
  // every edge except the root is an input of exactly one vertex
  std::vector<int> as_input(n_edges, 0);
  for (auto& in : vert_in)
    for (int e : in) {
      if (e < 0 || e >= n_edges) return false;
      ++as_input[e];
    }
  if (as_input[0] != 0) return false;
  for (int e = 1; e < n_edges; ++e)
    if (as_input[e] != 1) return false;
  for (int e = 0; e < n_edges; ++e)
    if (seen[e] > 1) return false;
  for (auto& in : vert_in)
    if ((int)in.size() < 2 || (int)in.size() > max_arity) return false;
  // connectivity: walk up from the root must reach every edge
  std::vector<char> reach(n_edges, 0);
  std::function<void(int)> walk = [&](int e) {
    reach[e] = 1;
    int v = top_vertex(e);
    if (v >= 0)
      for (int i : vert_in[v]) walk(i);
  };
  walk(0);
  for (int e = 0; e < n_edges; ++e)
    if (!reach[e]) return false;
  return true;
}

Tree corolla(int n) {
  Tree t;
  t.n_edges = n + 1;
  t.vert_out = {0};
  t.vert_in.resize(1);
  for (int i = 1; i <= n; ++i) t.vert_in[0].push_back(i);
  return t;
}

namespace {

std::string code_of(const Tree& t, int e) {
  int v = t.top_vertex(e);
  if (v < 0) return "*";
  std::vector<std::string> kids;
  for (int i : t.vert_in[v]) kids.push_back(code_of(t, i));
  std::sort(kids.begin(), kids.end());
  std::string s = "(";
  for (size_t k = 0; k < kids.size(); ++k) {
    if (k) s += ' ';
    s += kids[k];
  }
  return s + ")";
}

}  // namespace

CanonResult canonicalize(const Tree& t) {
  CanonResult r;
  r.edge_iso.assign(t.n_edges, -1);
  Tree& c = r.tree;
  c.n_edges = t.n_edges;
  int next_edge = 0;
  std::function<void(int)> walk = [&](int e) {
    r.edge_iso[e] = next_edge++;
    int v = t.top_vertex(e);
    if (v < 0) return;
    std::vector<std::pair<std::string, int>> kids;
    for (int i : t.vert_in[v]) kids.emplace_back(code_of(t, i), i);
    std::stable_sort(kids.begin(), kids.end(),
                     [](auto& a, auto& b) { return a.first < b.first; });
    int nv = (int)c.vert_out.size();
    c.vert_out.push_back(r.edge_iso[e]);
    c.vert_in.emplace_back();
    // reserve consecutive edge ids for the children before recursing
    for (auto& [code, i] : kids) c.vert_in[nv].push_back(0);
    std::vector<int> order;
    for (auto& [code, i] : kids) order.push_back(i);
    for (size_t k = 0; k < order.size(); ++k) {
      c.vert_in[nv][k] = next_edge;  // child edge id assigned by recursion
      walk(order[k]);
    }
  };
  walk(0);
  return r;
}

bool is_canonical(const Tree& t) { return canonicalize(t).tree == t; }

std::string serialize(const Tree& t) { return code_of(t, 0); }

namespace {

Tree parse_at(const std::string& s, size_t& pos);

Tree parse_at(const std::string& s, size_t& pos) {
  if (pos >= s.size()) throw std::invalid_argument("unexpected end of tree code");
  if (s[pos] == '*') {
    ++pos;
    return eta;
  }
  if (s[pos] != '(') throw std::invalid_argument("expected '(' or '*' in tree code");
  ++pos;
  std::vector<Tree> kids;
  while (true) {
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (pos >= s.size()) throw std::invalid_argument("unterminated '(' in tree code");
    if (s[pos] == ')') {
      ++pos;
      break;
    }
    kids.push_back(parse_at(s, pos));
  }
  if (kids.size() < 2) throw std::invalid_argument("vertex of arity < 2 in tree code");
  Tree t = corolla((int)kids.size());
  for (size_t k = 0; k < kids.size(); ++k) t = graft(t, (int)k + 1, kids[k]);
  return t;
}

}  // namespace

Tree parse_tree(const std::string& s) {
  size_t pos = 0;
  while (pos < s.size() && s[pos] == ' ') ++pos;
  Tree t = parse_at(s, pos);
  while (pos < s.size() && s[pos] == ' ') ++pos;
  if (pos != s.size()) throw std::invalid_argument("trailing characters in tree code");
  return canonicalize(t).tree;
}

Tree graft(const Tree& s, int leaf, const Tree& t, std::vector<int>* t_edge_map) {
  if (!s.is_leaf(leaf)) throw std::invalid_argument("graft: not a leaf");
  Tree r = s;
  std::vector<int> emap(t.n_edges, -1);
  emap[0] = leaf;
  for (int e = 1; e < t.n_edges; ++e) emap[e] = r.n_edges++;
  for (int v = 0; v < t.n_vertices(); ++v) {
    r.vert_out.push_back(emap[t.vert_out[v]]);
    r.vert_in.emplace_back();
    for (int i : t.vert_in[v]) r.vert_in.back().push_back(emap[i]);
  }
  if (t_edge_map) *t_edge_map = emap;
  return r;
}

Subtree subtree_above(const Tree& t, int e) {
  Subtree r;
  std::vector<int> to_new(t.n_edges, -1);
  std::function<void(int)> walk = [&](int old) {
    to_new[old] = (int)r.edge_from_t.size();
    r.edge_from_t.push_back(old);
    int v = t.top_vertex(old);
    if (v < 0) return;
    for (int i : t.vert_in[v]) walk(i);
  };
  // assign ids: root first, then by the same walk used elsewhere
  walk(e);
  r.tree.n_edges = (int)r.edge_from_t.size();
  for (int v = 0; v < t.n_vertices(); ++v) {
    if (to_new[t.vert_out[v]] < 0) continue;
    r.tree.vert_out.push_back(to_new[t.vert_out[v]]);
    r.tree.vert_in.emplace_back();
    for (int i : t.vert_in[v]) r.tree.vert_in.back().push_back(to_new[i]);
  }
  return r;
}

Cut cut_at(const Tree& t, int a) {
  if (a == 0 || t.is_leaf(a)) throw std::invalid_argument("cut_at: not an inner edge");
  Cut c;
  Subtree top = subtree_above(t, a);
  c.top = top.tree;
  c.top_edge_from_t = top.edge_from_t;
  std::set<int> above(top.edge_from_t.begin(), top.edge_from_t.end());
  above.erase(a);
  std::vector<int> to_new(t.n_edges, -1);
  for (int e = 0; e < t.n_edges; ++e)
    if (!above.count(e)) {
      to_new[e] = (int)c.bottom_edge_from_t.size();
      c.bottom_edge_from_t.push_back(e);
    }
  c.bottom.n_edges = (int)c.bottom_edge_from_t.size();
  for (int v = 0; v < t.n_vertices(); ++v) {
    if (above.count(t.vert_out[v]) || t.vert_out[v] == a) continue;
    c.bottom.vert_out.push_back(to_new[t.vert_out[v]]);
    c.bottom.vert_in.emplace_back();
    for (int i : t.vert_in[v]) c.bottom.vert_in.back().push_back(to_new[i]);
  }
  c.a_in_bottom = to_new[a];
  return c;
}

std::vector<Tree> enumerate_trees(int max_vertices, int max_arity) {
  // grow by grafting corollas onto leaves, dedup by canonical code
  std::map<std::string, Tree> seen;
  std::vector<Tree> frontier{eta};
  seen[serialize(eta)] = eta;
  for (int step = 0; step < max_vertices; ++step) {
    std::vector<Tree> next;
    for (const Tree& t : frontier) {
      for (int leaf : t.leaves()) {
        for (int n = 2; n <= max_arity; ++n) {
          Tree g = canonicalize(graft(t, leaf, corolla(n))).tree;
          std::string code = serialize(g);
          if (!seen.count(code)) {
            seen[code] = g;
            next.push_back(g);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<Tree> out;
  for (auto& [code, t] : seen) out.push_back(t);
  std::sort(out.begin(), out.end(), [](const Tree& a, const Tree& b) {
    if (a.n_vertices() != b.n_vertices()) return a.n_vertices() < b.n_vertices();
    return serialize(a) < serialize(b);
  });
  return out;
}

}  // namespace dendro
