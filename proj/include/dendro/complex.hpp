#pragma once
// Chain complexes of finite-dimensional rational vector spaces, graded by
// arbitrary integers.  d[n] : C_n -> C_{n-1}.

#include <climits>
#include <map>
#include <string>
#include <vector>

#include "dendro/matrix.hpp"

namespace dendro {

struct ChainComplex {
  std::map<int, int> dims;   // degree -> dimension (absent = 0)
  std::map<int, SpMat> d;    // degree -> boundary map to degree-1

  int dim(int n) const;
  SpMat boundary(int n) const;  // correctly sized even when absent
  void set_dim(int n, int k);
  int min_degree() const;
  int max_degree() const;
  int total_dim() const;
  bool validate_d_squared() const;

  std::map<int, int> homology_dims() const;
  std::map<int, int> homology_dims(int lo, int hi) const;
};

// degree-0 chain map f : C -> D
struct ChainMap {
  const ChainComplex* src = nullptr;
  const ChainComplex* dst = nullptr;
  std::map<int, SpMat> mats;  // degree -> matrix dim(D_n) x dim(C_n)

  SpMat mat(int n) const;
  bool is_chain_map() const;  // d f == f d in all degrees present
};

// mapping cone of a degree-0 chain map: Cone_n = C_{n-1} (+) D_n
ChainComplex mapping_cone(const ChainMap& f);

// true iff H_n(f) is an isomorphism for all n in [lo, hi]; requires the
// complexes to be correct in degrees [lo-1, hi+2]
bool quasi_iso_in_range(const ChainMap& f, int lo, int hi);

// layout of a tensor product of complexes; basis of degree n consists of
// tuples (p_1..p_k, i_1..i_k) with sum p = n, ordered lexicographically by
// (p_1..p_k) then by (i_1..i_k)
struct TensorLayout {
  std::vector<const ChainComplex*> factors;
  std::map<int, std::vector<std::pair<std::vector<int>, std::vector<int>>>> basis;  // per degree
  std::map<int, std::map<std::pair<std::vector<int>, std::vector<int>>, int>> index;

  // only total degrees in [lo, hi] are materialized; out-of-range degrees
  // report dimension zero
  explicit TensorLayout(std::vector<const ChainComplex*> fs, int lo = INT_MIN, int hi = INT_MAX);
  int dim(int n) const;
  int idx(int n, const std::vector<int>& degs, const std::vector<int>& inds) const;
  ChainComplex complex() const;  // with the usual Koszul-signed differential
};

}  // namespace dendro
