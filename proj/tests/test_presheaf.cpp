#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "dendro/presheaf.hpp"

using namespace dendro;

namespace {

bool is_permutation_matrix(const SpMat& m) {
  if (m.n_rows != m.n_cols) return false;
  std::set<int> rows;
  std::set<int> cols;
  for (auto& [rc, v] : m.entries) {
    if (v == 0) continue;
    if (v != 1) return false;
    if (!rows.insert(rc.first).second) return false;
    if (!cols.insert(rc.second).second) return false;
  }
  return (int)rows.size() == m.n_rows;
}

Morphism only_hom(const Tree& s, const Tree& t, Site site) {
  auto h = hom(s, t, site);
  REQUIRE(h.size() == 1);
  return h[0];
}

}  // namespace

TEST_CASE("com and ass operads validate; corrupted ass does not") {
  Operad com = com_operad(4);
  CHECK(com.validate() == "");
  CHECK(com.dim(2) == 1);
  CHECK(com.dim(3) == 1);
  CHECK(com.dim(5) == 0);

  Operad ass = ass_operad(4);
  CHECK(ass.validate() == "");
  CHECK(ass.dim(2) == 2);
  CHECK(ass.dim(3) == 6);
  CHECK(ass.dim(4) == 24);

  Operad bad = ass;
  bad.comps[{2, 1, 2}].set(0, 0, rat(5));
  CHECK(bad.validate() != "");
}

TEST_CASE("ass transpositions are involutive permutations") {
  Operad ass = ass_operad(3);
  for (int n = 2; n <= 3; ++n)
    for (auto& s : ass.transpositions[n]) {
      CHECK(is_permutation_matrix(s));
      CHECK(s * s == SpMat::ident(ass.dim(n)));
    }
  // relabel by identity is the identity
  CHECK(ass.relabel(3, {0, 1, 2}) == SpMat::ident(6));
}

TEST_CASE("tree composites: com collapses to 1, ass embeds injectively") {
  Operad com = com_operad(4);
  Tree t2 = parse_tree("((**)*)");
  SpMat c = operad_tree_composite(com, t2);
  CHECK(c.n_rows == 1);
  CHECK(c.n_cols == 1);
  CHECK(c.at(0, 0) == 1);

  Operad ass = ass_operad(4);
  SpMat a = operad_tree_composite(ass, t2);
  CHECK(a.n_rows == 6);
  CHECK(a.n_cols == 4);
  // each column is a distinct basis permutation, and (id,id) composes to id
  std::set<int> hit;
  for (int col = 0; col < 4; ++col) {
    int ones = 0, row = -1;
    for (int r = 0; r < 6; ++r)
      if (a.at(r, col) != 0) {
        CHECK(a.at(r, col) == 1);
        ++ones;
        row = r;
      }
    CHECK(ones == 1);
    hit.insert(row);
  }
  CHECK(hit.size() == 4);
  CHECK(a.at(0, 0) == 1);
}

TEST_CASE("algebra actions along trees") {
  Operad com = com_operad(4);
  Algebra kx3 = kx3_algebra(com);
  CHECK(kx3.validate() == "");

  Tree c2 = corolla(2);
  SpMat m = algebra_tree_action(com, kx3, c2);
  CHECK(m.n_rows == 2);
  CHECK(m.n_cols == 4);
  CHECK(m.at(1, 0) == 1);  // x.x = x^2
  CHECK(m.at(0, 0) == 0);
  CHECK(m.at(1, 1) == 0);  // x.x^2 = 0
  CHECK(m.at(1, 2) == 0);
  CHECK(m.at(1, 3) == 0);

  // x^3 = 0: every ternary product vanishes
  CHECK(algebra_tree_action(com, kx3, parse_tree("((**)*)")).is_zero());

  Algebra sq0 = sq0_algebra(com, 2);
  CHECK(sq0.validate() == "");
  CHECK(algebra_tree_action(com, sq0, c2).is_zero());

  // eta acts as the identity
  CHECK(algebra_tree_action(com, kx3, eta) == SpMat::ident(2));
}

TEST_CASE("coalgebra coactions along trees") {
  Cooperad c = cocom_cooperad(3);
  Coalgebra xy = xy_coalgebra(c);
  CHECK(xy.validate() == "");
  CHECK(xy.coaction_depth() == 1);

  SpMat m = coalgebra_tree_coaction(xy, corolla(2));
  CHECK(m.n_rows == 4);
  CHECK(m.n_cols == 2);
  CHECK(m.at(3, 0) == 1);  // x -> y (x) y
  CHECK(m.entries.size() == 1);

  CHECK(coalgebra_tree_coaction(xy, parse_tree("((**)*)")).is_zero());

  Coalgebra dz = delta_zero_coalgebra(c, 3);
  CHECK(dz.coaction_depth() == 0);
  CHECK(coalgebra_tree_coaction(dz, corolla(2)).is_zero());
  CHECK(coalgebra_tree_coaction(dz, eta) == SpMat::ident(3));
}

TEST_CASE("json round trips") {
  Operad ass = ass_operad(3);
  Operad back = operad_from_json(operad_to_json(ass));
  CHECK(back.validate() == "");
  CHECK(back.max_arity == 3);
  CHECK(back.dim(3) == 6);
  for (auto& [key, m] : ass.comps) CHECK(back.comp(std::get<0>(key), std::get<1>(key), std::get<2>(key)) == m);

  Operad com = com_operad(3);
  Algebra kx3 = kx3_algebra(com);
  Algebra aback = algebra_from_json(algebra_to_json(kx3));
  CHECK(aback.validate() == "");
  CHECK(aback.dim() == 2);
  CHECK(aback.act(2) == kx3.act(2));

  CHECK_THROWS_AS(operad_from_json("{\"kind\":\"nope\"}"), std::invalid_argument);
  CHECK_THROWS_AS(operad_from_json("not json"), std::invalid_argument);
}

TEST_CASE("nerve of com: one-dimensional everywhere, trivial restrictions") {
  NerveOperad n(com_operad(4));
  CHECK(n.value(eta).dim(0) == 1);
  CHECK(n.value(corolla(3)).dim(0) == 1);
  CHECK(n.value(parse_tree("((**)(**))")).dim(0) == 1);
  CHECK(n.value(corolla(5)).dim(0) == 0);

  Tree t2 = parse_tree("((**)*)");
  for (auto& f : hom(corolla(3), t2, Site::A)) {
    SpMat r = n.restrict(f, 0);
    CHECK(r.n_rows == 1);
    CHECK(r.at(0, 0) == 1);
  }
  CHECK(validate_presheaf(n, 3, 3) == "");
}

TEST_CASE("nerve of ass: dimensions and functoriality") {
  NerveOperad n(ass_operad(4));
  Tree t2 = parse_tree("((**)*)");
  CHECK(n.value(t2).dim(0) == 4);
  CHECK(n.value(corolla(3)).dim(0) == 6);

  // inner face restrictions are injective 0/1 matrices
  for (auto& f : hom(corolla(3), t2, Site::A)) {
    SpMat r = n.restrict(f, 0);
    CHECK(r.n_rows == 6);
    CHECK(r.n_cols == 4);
    CHECK(rank(r) == 4);
  }
  CHECK(validate_presheaf(n, 3, 3) == "");
}

TEST_CASE("theta cuts are isomorphisms of the expected shape") {
  Tree t2 = parse_tree("((**)*)");
  int a = t2.inner_edges()[0];

  NerveOperad ncom(com_operad(3));
  SpMat tc = ncom.theta(t2, a, 0);
  CHECK(tc.n_rows == 1);
  CHECK(tc.at(0, 0) == 1);

  NerveOperad nass(ass_operad(3));
  SpMat ta = nass.theta(t2, a, 0);
  CHECK(is_permutation_matrix(ta));

  NerveCocom ncc(cocom_cooperad(3));
  SpMat th = ncc.theta(t2, a, 0);
  CHECK(th.n_rows == 1);
  CHECK(th.at(0, 0) == 1);
}

TEST_CASE("nerve algebra: values and restriction along the root inclusion") {
  Operad com = com_operad(4);
  NerveAlgebra n(com, kx3_algebra(com));
  CHECK(n.value(eta).dim(0) == 2);
  CHECK(n.value(corolla(2)).dim(0) == 4);
  CHECK(n.value(parse_tree("((**)*)")).dim(0) == 8);

  Morphism m = only_hom(eta, corolla(2), Site::R);
  SpMat r = n.restrict(m, 0);
  CHECK(r.n_rows == 2);
  CHECK(r.n_cols == 4);
  CHECK(r.at(1, 0) == 1);  // mu (x) x (x) x -> x^2
  CHECK(r.entries.size() == 1);

  NerveAlgebra z(com, sq0_algebra(com, 2));
  CHECK(z.restrict(m, 0).is_zero());

  CHECK(validate_presheaf(n, 3, 3) == "");
}

TEST_CASE("nerve coalgebra: pushforwards and vanishing certificate") {
  Cooperad c = cocom_cooperad(3);
  NerveCoalgebra n(c, xy_coalgebra(c));
  CHECK(n.value(eta).dim(0) == 2);
  CHECK(n.value(corolla(2)).dim(0) == 4);

  Morphism m = only_hom(eta, corolla(2), Site::R);
  SpMat p = n.push(m, 0);
  CHECK(p.n_rows == 4);
  CHECK(p.at(3, 0) == 1);  // x -> y (x) y
  CHECK(p.entries.size() == 1);

  // support bound: pushes from eta vanish past the certificate
  int bound = n.support_bound(eta);
  CHECK(bound == 1);
  for (auto& t : enumerate_trees(3, 3)) {
    if (t.n_vertices() <= bound) continue;
    for (auto& f : hom(eta, t, Site::R)) CHECK(n.push(f, 0).is_zero());
  }

  NerveCoalgebra dz(c, delta_zero_coalgebra(c, 2));
  CHECK(dz.support_bound(eta) == 0);
  CHECK(dz.push(m, 0).is_zero());

  CHECK(validate_copresheaf(n, 3, 3) == "");

  NerveCocom ncc(c);
  CHECK(validate_copresheaf(ncc, 3, 3) == "");
}

TEST_CASE("representable presheaf") {
  Representable r(corolla(2));
  CHECK(r.value(corolla(2)).dim(0) == 2);  // the two automorphisms
  CHECK(r.value(eta).dim(0) == 1);
  CHECK(r.value(corolla(3)).dim(0) == 0);

  Morphism m = only_hom(eta, corolla(2), Site::R);
  SpMat rm = r.restrict(m, 0);
  CHECK(rm.n_rows == 1);
  CHECK(rm.at(0, 0) == 1);
  CHECK(rm.at(0, 1) == 1);

  CHECK(validate_presheaf(r, 3, 3) == "");
}

TEST_CASE("suspension shifts degrees and twists the differential sign") {
  auto base = std::make_shared<NerveAlgebra>(com_operad(3), kx3_algebra(com_operad(3)));
  SuspendPresheaf s(base, 1);
  CHECK(s.value(corolla(2)).dim(1) == 4);
  CHECK(s.value(corolla(2)).dim(0) == 0);
  Morphism m = only_hom(eta, corolla(2), Site::R);
  CHECK(s.restrict(m, 1) == base->restrict(m, 0));
  CHECK(validate_presheaf(s, 3, 3) == "");

  SuspendPresheaf s2(base, 2);
  CHECK(s2.value(eta).dim(2) == 2);
}

TEST_CASE("tau and nabla regroup prunings by permutation matrices") {
  Tree u = parse_tree("((**)*)");
  Tree v = corolla(2);
  // the pruning keeping only the root vertex of u
  Morphism eps;
  bool found = false;
  for (auto& f : hom(v, u, Site::R))
    if (!f.is_iso() && factor_inner_external(f).inner.is_iso() &&
        f.edge_map[v.vert_out[0]] == 0) {
      eps = f;
      found = true;
      break;
    }
  REQUIRE(found);

  Operad com = com_operad(3);
  NerveAlgebra na(com, kx3_algebra(com));
  SpMat t = na.tau(eps);
  CHECK(t.n_rows == 8);
  CHECK(t.n_cols == 8);
  CHECK(is_permutation_matrix(t));

  Cooperad c = cocom_cooperad(3);
  NerveCoalgebra nc(c, xy_coalgebra(c));
  SpMat nb = nc.nabla(eps);
  CHECK(nb.n_rows == 8);
  CHECK(nb.n_cols == 8);
  CHECK(is_permutation_matrix(nb));

  // a genuine inner face is rejected
  Morphism inner = inner_face(u, u.inner_edges()[0]);
  CHECK_THROWS_AS(na.tau(inner), std::invalid_argument);
}
