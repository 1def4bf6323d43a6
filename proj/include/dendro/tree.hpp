#pragma once
// Finite rooted trees without unary vertices and without nullary vertices
// ("open reduced" trees).  Edges are numbered 0..n_edges-1 with edge 0 the
// root edge.  A leaf is an edge with no vertex above it; the tree with no
// vertices has a single edge that is both root and leaf.

#include <string>
#include <vector>

namespace dendro {

struct Tree {
  // vert_out[v]  : the output edge of vertex v (the edge below v)
  // vert_in[v]   : the input edges of v, in storage order
  int n_edges = 1;
  std::vector<int> vert_out;
  std::vector<std::vector<int>> vert_in;

  int n_vertices() const { return (int)vert_out.size(); }

  // vertex whose output edge is e, or -1 if e is a leaf
  int top_vertex(int e) const;
  // vertex having e among its inputs, or -1 if e is the root edge
  int bottom_vertex(int e) const;

  bool is_leaf(int e) const { return top_vertex(e) < 0; }
  std::vector<int> leaves() const;         // in edge order
  std::vector<int> inner_edges() const;    // in edge order
  int arity(int v) const { return (int)vert_in[v].size(); }

  // true if b lies on the path from a to the root (inclusive)
  bool weakly_below(int b, int a) const;

  bool valid(int max_arity = 1 << 20) const;
  bool operator==(const Tree&) const = default;
};

extern const Tree eta;
Tree corolla(int n);

// Canonical form: edges renumbered by a preorder walk that visits the
// children of each vertex in sorted subtree-code order; vertices renumbered
// in the same walk.  Two trees are isomorphic iff their canonical forms are
// equal.  `edge_iso` maps old edge ids to new ones.
struct CanonResult {
  Tree tree;
  std::vector<int> edge_iso;
};
CanonResult canonicalize(const Tree& t);
bool is_canonical(const Tree& t);

// Nested-parenthesis code, e.g. "*" (no vertices), "(* *)", "((* *) * *)".
std::string serialize(const Tree& t);
Tree parse_tree(const std::string& s);  // throws std::invalid_argument

// All canonical trees with n_vertices <= max_vertices and every vertex of
// arity in [2, max_arity], sorted by (n_vertices, code).
std::vector<Tree> enumerate_trees(int max_vertices, int max_arity);

// Graft t onto the leaf `leaf` of s (identify t's root edge with that leaf).
// Result is not canonicalized; its edge ids are: edges of s keep their ids,
// edges of t (minus the root) get fresh ids in t's order.  `t_edge_map`
// reports where each edge of t went.
Tree graft(const Tree& s, int leaf, const Tree& t, std::vector<int>* t_edge_map = nullptr);

// Extract the subtree of t with root edge `e` (everything weakly above e).
// `edge_from_t[new_edge] = old edge id`.
struct Subtree {
  Tree tree;
  std::vector<int> edge_from_t;
};
Subtree subtree_above(const Tree& t, int e);

// Cut t along inner edge a: bottom piece (a becomes a leaf) and top piece
// (the subtree above a).
struct Cut {
  Tree bottom;
  std::vector<int> bottom_edge_from_t;
  Tree top;
  std::vector<int> top_edge_from_t;
  int a_in_bottom;  // id of the cut edge inside `bottom`
};
Cut cut_at(const Tree& t, int a);

}  // namespace dendro
