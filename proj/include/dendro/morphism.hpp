#pragma once
// Morphisms between trees, recorded by their (injective) action on edges.
//
// Two sites are used throughout:
//   SiteA : isomorphisms and inner faces; preserves the set of leaves.
//   SiteR : isomorphisms, inner faces and top-vertex faces; preserves the
//           root edge but may send leaves to arbitrary edges.

#include <optional>
#include <vector>

#include "dendro/tree.hpp"

namespace dendro {

enum class Site { A, R };

struct Morphism {
  Tree src;
  Tree dst;
  std::vector<int> edge_map;  // size src.n_edges, values in dst's edges

  int operator()(int e) const { return edge_map[e]; }
  bool operator==(const Morphism&) const = default;
  bool is_iso() const { return src.n_edges == dst.n_edges; }
};

Morphism identity(const Tree& t);
Morphism compose(const Morphism& g, const Morphism& f);  // g after f
Morphism inverse(const Morphism& iso);

// A valid map sends root to root, is injective, and sends the inputs of each
// source vertex to a full antichain cut above the image of its output edge.
bool valid_morphism(const Morphism& m, Site site);

// All morphisms src -> dst in the given site.
std::vector<Morphism> hom(const Tree& src, const Tree& dst, Site site);
std::vector<Morphism> automorphisms(const Tree& t);

// One representative of each orbit of hom(src,dst) under postcomposition
// with automorphisms of dst (the identity is chosen when its orbit occurs).
std::vector<Morphism> hom_up_to_iso(const Tree& src, const Tree& dst, Site site);

// Canonical code of t with an integer color attached to every edge; two
// colorings have equal codes iff an automorphism carries one to the other.
std::string colored_code(const Tree& t, const std::vector<int>& colors);

// Edge colors of m.dst induced by m: the source edge index, -1 off the image.
std::vector<int> image_colors(const Morphism& m);

// An automorphism g of t with dst_colors[g(e)] == src_colors[e], if any.
std::optional<Morphism> colored_automorphism(const Tree& t, const std::vector<int>& src_colors,
                                             const std::vector<int>& dst_colors);

// Generators of the subgroup of Aut(alpha.dst) fixing the image of alpha
// edgewise: transpositions of isomorphic sibling subtrees strictly above the
// leaf images.  For site A morphisms this stabilizer is trivial.
std::vector<Morphism> stabilizer_generators(const Morphism& alpha);

// Elementary faces.  inner_face contracts the inner edge e of t; top_face
// chops the vertex v (all of whose inputs must be leaves).  Both return the
// face inclusion  (smaller tree) -> t; the smaller tree is not canonical,
// its edges keep their ids in t.
Morphism inner_face(const Tree& t, int e);
Morphism top_face(const Tree& t, int v);

// Factor m : S -> T as  S --inner--> M --external--> T  with `inner` in
// SiteA and `external` a composite of top faces.  m == compose(external, inner).
struct InnerExternal {
  Morphism inner;
  Morphism external;
};
InnerExternal factor_inner_external(const Morphism& m);

// The subtree of m.dst induced by vertex v of m.src: root edge m(out v),
// leaves m(in v).  `leaf_of_src_input[i]` is the blown-up tree's edge
// corresponding to input i of v.
struct BlowUp {
  Tree tree;                       // extracted, ids local
  std::vector<int> edge_from_dst;  // local id -> edge of m.dst
  std::vector<int> leaf_of_src_input;
};
BlowUp blow_up(const Morphism& m, int v);

// Unique alpha with compose(alpha, f) == g, if any (f and g share a source).
std::optional<Morphism> factor_through(const Morphism& g, const Morphism& f, Site site);

int permutation_sign(const std::vector<int>& perm);

}  // namespace dendro
