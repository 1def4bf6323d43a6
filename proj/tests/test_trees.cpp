#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "dendro/morphism.hpp"
#include "dendro/tree.hpp"

using namespace dendro;

namespace {

// independent generator: canonical codes built as sorted child-code multisets
void gen_codes(int max_v, int max_a, std::set<std::string>& out) {
  out.insert("*");
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::string> cur(out.begin(), out.end());
    auto vertices = [](const std::string& s) {
      return (int)std::count(s.begin(), s.end(), '(');
    };
    std::function<void(std::vector<std::string>&, int, size_t)> pick =
        [&](std::vector<std::string>& kids, int vleft, size_t start) {
          if ((int)kids.size() >= 2 && (int)kids.size() <= max_a) {
            auto sorted = kids;
            std::sort(sorted.begin(), sorted.end());
            std::string code = "(";
            for (size_t i = 0; i < sorted.size(); ++i) {
              if (i) code += ' ';
              code += sorted[i];
            }
            code += ")";
            if (!out.count(code)) {
              out.insert(code);
              grew = true;
            }
          }
          if ((int)kids.size() >= max_a) return;
          for (size_t i = start; i < cur.size(); ++i) {
            int v = vertices(cur[i]);
            if (v > vleft) continue;
            kids.push_back(cur[i]);
            pick(kids, vleft - v, i);
            kids.pop_back();
          }
        };
    std::vector<std::string> kids;
    pick(kids, max_v - 1, 0);
  }
  // prune codes exceeding the vertex budget
  for (auto it = out.begin(); it != out.end();) {
    if ((int)std::count(it->begin(), it->end(), '(') > max_v)
      it = out.erase(it);
    else
      ++it;
  }
}

// brute-force morphism oracle: all injective edge maps passing the validity check
int brute_hom_count(const Tree& s, const Tree& t, Site site) {
  int count = 0;
  std::vector<int> perm(s.n_edges, -1);
  std::vector<char> used(t.n_edges, 0);
  std::function<void(int)> rec = [&](int e) {
    if (e == s.n_edges) {
      if (valid_morphism(Morphism{s, t, perm}, site)) ++count;
      return;
    }
    for (int f = 0; f < t.n_edges; ++f) {
      if (used[f]) continue;
      used[f] = 1;
      perm[e] = f;
      rec(e + 1);
      used[f] = 0;
    }
  };
  perm[0] = 0;
  used[0] = 1;
  rec(1);
  return count;
}

}  // namespace

TEST_CASE("serialize / parse round trip") {
  for (const Tree& t : enumerate_trees(4, 3)) {
    CHECK(t.valid());
    CHECK(is_canonical(t));
    CHECK(parse_tree(serialize(t)) == t);
  }
  CHECK(serialize(eta) == "*");
  CHECK(serialize(corolla(2)) == "(* *)");
  CHECK_THROWS(parse_tree("(*)"));
  CHECK_THROWS(parse_tree("(* *"));
  CHECK_THROWS(parse_tree(""));
}

TEST_CASE("tree enumeration matches independent code generator") {
  for (auto [mv, ma] : {std::pair{3, 3}, {4, 2}, {3, 4}, {5, 4}}) {
    std::set<std::string> expect;
    gen_codes(mv, ma, expect);
    auto got = enumerate_trees(mv, ma);
    std::set<std::string> codes;
    for (auto& t : got) codes.insert(serialize(t));
    CHECK(codes == expect);
    CHECK(got.size() == expect.size());
  }
  // trees sorted by (vertex count, code)
  auto ts = enumerate_trees(2, 3);
  CHECK(serialize(ts[0]) == "*");
  CHECK(ts[1].n_vertices() == 1);
}

TEST_CASE("hom counts against brute-force oracle") {
  auto trees = enumerate_trees(3, 3);
  for (auto& s : trees)
    for (auto& t : trees) {
      if (t.n_vertices() > 3 && s.n_vertices() > 2) continue;
      for (Site site : {Site::A, Site::R}) {
        auto h = hom(s, t, site);
        for (auto& m : h) CHECK(valid_morphism(m, site));
        CHECK((int)h.size() == brute_hom_count(s, t, site));
      }
    }
}

TEST_CASE("known hom and automorphism counts") {
  Tree c2 = corolla(2), c3 = corolla(3);
  Tree bin = parse_tree("((* *) *)");
  Tree bal4 = parse_tree("((* *) (* *))");
  CHECK(hom(c3, bin, Site::A).size() == 6);
  CHECK(hom_up_to_iso(c3, bin, Site::A).size() == 3);
  CHECK(automorphisms(bin).size() == 2);
  CHECK(automorphisms(bal4).size() == 8);
  CHECK(automorphisms(corolla(4)).size() == 24);
  CHECK(hom(eta, bal4, Site::R).size() == 1);
  CHECK(hom(eta, bal4, Site::A).empty());
  CHECK(hom(bin, c2, Site::R).empty());
  CHECK(hom(corolla(4), bal4, Site::A).size() == 24);
  CHECK(hom_up_to_iso(corolla(4), bal4, Site::A).size() == 3);
}

TEST_CASE("composition closes and identities act trivially") {
  Tree c3 = corolla(3);
  Tree bin = parse_tree("((* *) *)");
  for (auto& m : hom(c3, bin, Site::A)) {
    CHECK(compose(m, identity(c3)) == m);
    CHECK(compose(identity(bin), m) == m);
    for (auto& g : automorphisms(bin)) CHECK(valid_morphism(compose(g, m), Site::A));
  }
  for (auto& g : automorphisms(bin)) {
    CHECK(compose(inverse(g), g) == identity(bin));
  }
}

TEST_CASE("faces") {
  Tree bin = parse_tree("((* *) *)");
  int inner = bin.inner_edges()[0];
  Morphism f = inner_face(bin, inner);
  CHECK(f.src.n_vertices() == 1);
  CHECK(canonicalize(f.src).tree == corolla(3));
  CHECK(valid_morphism(f, Site::A));

  Morphism g = top_face(corolla(2), 0);
  CHECK(g.src == eta);
  CHECK(valid_morphism(g, Site::R));

  // chopping the top vertex of the binary tree leaves a 2-corolla
  int top = -1;
  for (int v = 0; v < bin.n_vertices(); ++v) {
    bool all_leaves = true;
    for (int i : bin.vert_in[v]) all_leaves &= bin.is_leaf(i);
    if (all_leaves) top = v;
  }
  Morphism h = top_face(bin, top);
  CHECK(canonicalize(h.src).tree == corolla(2));
  CHECK(valid_morphism(h, Site::R));
}

TEST_CASE("inner-then-external factorization") {
  auto trees = enumerate_trees(3, 3);
  for (auto& s : trees)
    for (auto& t : trees)
      for (auto& m : hom(s, t, Site::R)) {
        auto [inner, external] = factor_inner_external(m);
        CHECK(valid_morphism(inner, Site::A));
        CHECK(valid_morphism(external, Site::R));
        CHECK(compose(external, inner) == m);
        // external part is a pruning: its source's leaves hit the cut edges
        std::set<int> cut, ext_leaf_img;
        for (int l : s.leaves()) cut.insert(m.edge_map[l]);
        for (int l : external.src.leaves()) ext_leaf_img.insert(external.edge_map[l]);
        CHECK(cut == ext_leaf_img);
      }
}

TEST_CASE("blow-up reconstructs the morphism") {
  Tree c3 = corolla(3);
  Tree big = parse_tree("((* *) (* *))");
  for (auto& m : hom(c3, big, Site::R)) {
    for (int v = 0; v < c3.n_vertices(); ++v) {
      BlowUp b = blow_up(m, v);
      CHECK(b.tree.valid());
      CHECK((int)b.leaf_of_src_input.size() == c3.arity(v));
      for (size_t i = 0; i < b.leaf_of_src_input.size(); ++i)
        CHECK(b.edge_from_dst[b.leaf_of_src_input[i]] == m.edge_map[c3.vert_in[v][i]]);
    }
  }
}

TEST_CASE("graft and cut are inverse") {
  Tree s = corolla(2), t = corolla(3);
  std::vector<int> emap;
  Tree g = graft(s, 1, t, &emap);
  CHECK(g.n_vertices() == 2);
  CHECK(canonicalize(g).tree == parse_tree("((* * *) *)"));
  int a = emap[0];
  Cut c = cut_at(g, a);
  CHECK(canonicalize(c.bottom).tree == corolla(2));
  CHECK(canonicalize(c.top).tree == corolla(3));
  CHECK(c.bottom_edge_from_t[c.a_in_bottom] == a);
}

TEST_CASE("factor_through finds unique factorizations") {
  Tree c3 = corolla(3);
  Tree bin = parse_tree("((* *) *)");
  for (auto& m : hom(c3, bin, Site::A)) {
    auto a = factor_through(m, identity(c3), Site::A);
    REQUIRE(a.has_value());
    CHECK(*a == m);
  }
  Morphism root{eta, bin, {0}};
  auto a = factor_through(root, Morphism{eta, corolla(2), {0}}, Site::R);
  REQUIRE(a.has_value());
  CHECK(compose(*a, Morphism{eta, corolla(2), {0}}) == root);
}

TEST_CASE("permutation sign") {
  CHECK(permutation_sign({0, 1, 2}) == 1);
  CHECK(permutation_sign({1, 0, 2}) == -1);
  CHECK(permutation_sign({2, 0, 1}) == 1);
}
