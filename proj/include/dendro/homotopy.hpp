#pragma once
// The factorization complex of a non-isomorphism gamma : R -> T on the root
// site, with its contracting homotopy.  Basis elements in degree p are the
// factorizations R -> S -> T through a face S of T with p vertices that
// contains the image of gamma; a face is encoded by its surviving vertices P
// (a downward closed set) and surviving inner edges E.

#include <map>
#include <vector>

#include "dendro/complex.hpp"
#include "dendro/morphism.hpp"

namespace dendro {

struct FactFace {
  unsigned P = 0;  // bitmask over vertices of T
  unsigned E = 0;  // bitmask over edges of T (inner edges only)
  int degree = 0;  // number of generating edges: |E| + 1, or 0 for the edgeless face
  bool operator==(const FactFace&) const = default;
};

class FactComplex {
 public:
  // f defaults to the canonical enumeration (root, then inner edges ascending)
  explicit FactComplex(const Morphism& gamma, std::vector<int> f = {});

  const ChainComplex& complex() const { return c_; }
  const std::vector<std::vector<FactFace>>& faces() const { return faces_; }
  // h[n] : C_n -> C_{n+1};  d h + h d = sign * id
  const std::map<int, SpMat>& homotopy() const { return h_; }
  int sign() const { return sign_; }

  // exact check of the homotopy identity in every degree
  bool identity_holds() const;

 private:
  int face_index(unsigned P, unsigned E) const;
  std::vector<int> gens(const FactFace& f) const;  // sorted by position in f_
  std::map<int, SpMat> add_gen_op(int a) const;    // the edge-insertion pairing
  // contracting homotopy for the stratum of faces whose vertices above edge a
  // lie in vmask; normalized so that d h + h d = -id there
  std::map<int, SpMat> build_region(int a, unsigned vmask) const;
  unsigned block_above(unsigned P, unsigned E, int edge) const;

  Morphism gamma_;
  std::vector<int> f_;                        // enumeration of en+(T)
  std::vector<int> fpos_;                     // edge -> position in f_, or -1
  std::vector<std::vector<FactFace>> faces_;  // per degree
  std::map<std::pair<unsigned, unsigned>, std::pair<int, int>> index_;  // (P,E) -> (deg, idx)
  std::vector<char> im_edge_, im_inner_;      // over edges of T
  ChainComplex c_;
  std::map<int, SpMat> h_;
  int sign_ = 0;
};

}  // namespace dendro
