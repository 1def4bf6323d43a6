#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dendro/bar.hpp"

using namespace dendro;

namespace {

std::shared_ptr<NerveOperad> ncom(int max_arity) {
  return std::make_shared<NerveOperad>(com_operad(max_arity));
}

std::shared_ptr<NerveOperad> nass(int max_arity) {
  return std::make_shared<NerveOperad>(ass_operad(max_arity));
}

}  // namespace

TEST_CASE("generating edges per site") {
  CHECK(generating_edges(eta, Site::A).empty());
  CHECK(generating_edges(eta, Site::R).empty());
  CHECK(generating_edges(corolla(3), Site::A).empty());
  CHECK(generating_edges(corolla(3), Site::R) == std::vector<int>{0});
  Tree t2 = parse_tree("((**)*)");
  CHECK(generating_edges(t2, Site::A).size() == 1);
  CHECK(generating_edges(t2, Site::R).size() == 2);
}

TEST_CASE("bar of the commutative nerve at three leaves") {
  BarComplex b(ncom(4), corolla(3), Window{4, 4});
  CHECK(b.complex().dim(0) == 1);
  CHECK(b.complex().dim(1) == 3);
  CHECK(b.complex().validate_d_squared());
  auto h = b.complex().homology_dims();
  CHECK(h[0] == 0);
  CHECK(h[1] == 2);
}

TEST_CASE("bar of the commutative nerve at four leaves") {
  BarComplex b(ncom(4), corolla(4), Window{4, 4});
  CHECK(b.complex().dim(0) == 1);
  CHECK(b.complex().dim(1) == 10);
  CHECK(b.complex().dim(2) == 15);
  CHECK(b.complex().validate_d_squared());
  auto h = b.complex().homology_dims();
  CHECK(h[0] == 0);
  CHECK(h[1] == 0);
  CHECK(h[2] == 6);
}

TEST_CASE("bar of the associative nerve") {
  BarComplex b3(nass(4), corolla(3), Window{4, 4});
  CHECK(b3.complex().dim(0) == 6);
  CHECK(b3.complex().dim(1) == 12);
  CHECK(b3.complex().validate_d_squared());
  auto h3 = b3.complex().homology_dims();
  CHECK(h3[0] == 0);
  CHECK(h3[1] == 6);

  BarComplex b4(nass(4), corolla(4), Window{4, 4});
  CHECK(b4.complex().dim(0) == 24);
  CHECK(b4.complex().dim(1) == 120);
  CHECK(b4.complex().dim(2) == 120);
  CHECK(b4.complex().validate_d_squared());
  auto h4 = b4.complex().homology_dims();
  CHECK(h4[0] == 0);
  CHECK(h4[1] == 0);
  CHECK(h4[2] == 24);
}

TEST_CASE("bar of a representable presheaf") {
  auto r = std::make_shared<Representable>(corolla(2));

  BarComplex at_c2(r, corolla(2), Window{3, 3});
  CHECK(at_c2.complex().dim(1) == 2);
  CHECK(at_c2.complex().total_dim() == 2);
  CHECK(at_c2.complex().boundary(1).is_zero());

  BarComplex at_eta(r, eta, Window{3, 3});
  CHECK(at_eta.complex().dim(0) == 1);
  CHECK(at_eta.complex().dim(1) == 1);
  CHECK(at_eta.complex().total_dim() == 2);
  SpMat d1 = at_eta.complex().boundary(1);
  CHECK((d1.at(0, 0) == 1 || d1.at(0, 0) == -1));
  auto h = at_eta.complex().homology_dims();
  CHECK(h[0] == 0);
  CHECK(h[1] == 0);
}

TEST_CASE("bar over the root site for algebra nerves") {
  Operad com = com_operad(4);

  auto zero = std::make_shared<NerveAlgebra>(com, sq0_algebra(com, 1));
  BarComplex bz(zero, eta, Window{4, 4});
  CHECK(bz.complex().dim(0) == 1);
  CHECK(bz.complex().dim(1) == 3);  // one orbit per corolla arity 2..4
  CHECK(bz.complex().boundary(1).is_zero());
  CHECK(bz.complex().validate_d_squared());

  auto kx = std::make_shared<NerveAlgebra>(com, kx3_algebra(com));
  BarComplex bk(kx, eta, Window{3, 3});
  CHECK(bk.complex().validate_d_squared());
  CHECK(!bk.complex().boundary(1).is_zero());  // x.x = x^2 survives
}

TEST_CASE("reduce is the identity on orbit representatives") {
  BarComplex b(nass(3), corolla(3), Window{3, 3});
  for (auto& o : b.orbits()) {
    for (auto& [q, basis] : o.basis) {
      SpMat r = b.reduce(o.alpha0, o.en, q) * basis;
      // identity block at the orbit's offset, zero elsewhere
      for (int j = 0; j < basis.n_cols; ++j)
        for (int i = 0; i < r.n_rows; ++i)
          CHECK(r.at(i, j) == ((i == o.offset.at(q) + j) ? 1 : 0));
    }
  }
}

TEST_CASE("cobar of a conilpotent coalgebra nerve is a complex") {
  Cooperad c = cocom_cooperad(3);
  auto n = std::make_shared<NerveCoalgebra>(c, xy_coalgebra(c));
  // support bound 1: the window never truncates, d^2 = 0 on the nose
  CobarComplex w(n, eta, Window{4, 3});
  CHECK(w.complex().dim(0) == 2);
  CHECK(w.complex().dim(-1) == 7);  // Sym^2 + Sym^3 over the two corollas
  // two-vertex trees, leaf labels modulo Aut: 2.Sym^2 + 2.Sym^3 + Sym^2.Sym^2
  // + Sym^3.Sym^2 = 6 + 8 + 9 + 12
  CHECK(w.complex().dim(-2) == 35);
  CHECK(w.complex().validate_d_squared());
}

TEST_CASE("bar as a copresheaf is functorial") {
  auto b = std::make_shared<BarCopresheaf>(ncom(3), Window{3, 3});
  CHECK(validate_copresheaf(*b, 2, 3) == "");
}

TEST_CASE("cobar as a presheaf is functorial") {
  Cooperad c = cocom_cooperad(3);
  auto n = std::make_shared<NerveCoalgebra>(c, xy_coalgebra(c));
  auto w = std::make_shared<CobarPresheaf>(n, Window{4, 3});
  CHECK(validate_presheaf(*w, 2, 3) == "");

  auto dz = std::make_shared<NerveCoalgebra>(c, delta_zero_coalgebra(c, 2));
  auto wz = std::make_shared<CobarPresheaf>(dz, Window{4, 3});
  CHECK(validate_presheaf(*wz, 2, 3) == "");
}

TEST_CASE("safe degree bound") {
  Window w{5, 4};
  CHECK(safe_degree_bound(w, eta) == 4);
  CHECK(safe_degree_bound(w, corolla(2)) == 3);
}
