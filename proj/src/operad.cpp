#include "dendro/operad.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dendro {

int Operad::dim(int n) const {
  auto it = basis.find(n);
  return it == basis.end() ? 0 : (int)it->second.size();
}

SpMat Operad::comp(int k, int i, int l) const {
  auto it = comps.find({k, i, l});
  if (it != comps.end()) return it->second;
  return SpMat(dim(k + l - 1), dim(k) * dim(l));
}

SpMat Operad::relabel(int n, const std::vector<int>& rho) const {
  SpMat m = SpMat::ident(dim(n));
  // decompose rho into adjacent transpositions (bubble sort of rho^-1)
  std::vector<int> cur(n);
  std::iota(cur.begin(), cur.end(), 0);  // cur[pos] = current label at pos? track as perm
  // We need relabel(rho) = product of generators; apply transpositions to the
  // identity until it equals rho, multiplying the matrices along the way.
  std::vector<int> work = rho;
  std::vector<int> gens;  // generator indices applied
  // sort `work` to identity with adjacent swaps; record swaps in order
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (int j = 0; j + 1 < n; ++j)
      if (work[j] > work[j + 1]) {
        std::swap(work[j], work[j + 1]);
        gens.push_back(j);
        swapped = true;
      }
  }
  // rho = s_{g_1} s_{g_2} ... s_{g_m} (applied right to left), so the matrix
  // is the product of generator matrices in recorded order
  auto it = transpositions.find(n);
  for (int g : gens) {
    if (it == transpositions.end()) throw std::invalid_argument("relabel: missing sym data");
    m = m * it->second[g];
  }
  return m;
}

namespace {

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

std::string Operad::validate() const {
  // transposition relations
  for (auto& [n, gens] : transpositions) {
    int d = dim(n);
    for (size_t i = 0; i < gens.size(); ++i) {
      if (!(gens[i] * gens[i] == SpMat::ident(d))) {
        std::ostringstream os;
        os << "sym: s_" << i + 1 << "^2 != id at arity " << n;
        return os.str();
      }
      if (i + 1 < gens.size()) {
        SpMat a = gens[i] * gens[i + 1] * gens[i];
        SpMat b = gens[i + 1] * gens[i] * gens[i + 1];
        if (!(a == b)) {
          std::ostringstream os;
          os << "sym: braid relation fails at arity " << n << " (" << i + 1 << ")";
          return os.str();
        }
      }
    }
  }
  // sequential associativity: (p o_i q) o_{i+j-1} r  =  p o_i (q o_j r)
  for (int k = 2; k <= max_arity; ++k)
    for (int l = 2; l <= max_arity; ++l)
      for (int m = 2; m <= max_arity; ++m) {
        if (!dim(k) || !dim(l) || !dim(m)) continue;
        for (int i = 1; i <= k; ++i)
          for (int j = 1; j <= l; ++j) {
            int mid = k + l - 1;
            int fin = k + l + m - 2;
            if (fin > max_arity) continue;  // arity-ideal: both sides 0 by truncation
            // lhs: comp(mid, i+j-1, m) ( comp(k,i,l) (x) 1 )
            SpMat lhs(dim(fin), dim(k) * dim(l) * dim(m));
            SpMat c1 = comp(k, i, l), c2 = comp(mid, i + j - 1, m);
            for (int a = 0; a < dim(k); ++a)
              for (int b = 0; b < dim(l); ++b)
                for (int c = 0; c < dim(m); ++c) {
                  int col = (a * dim(l) + b) * dim(m) + c;
                  for (int t = 0; t < dim(mid); ++t) {
                    Rational v = c1.at(t, a * dim(l) + b);
                    if (v == 0) continue;
                    for (int r = 0; r < dim(fin); ++r) {
                      Rational w = c2.at(r, t * dim(m) + c);
                      if (w != 0) lhs.add(r, col, v * w);
                    }
                  }
                }
            SpMat rhs(dim(fin), dim(k) * dim(l) * dim(m));
            SpMat d1 = comp(l, j, m), d2 = comp(k, i, l + m - 1);
            for (int a = 0; a < dim(k); ++a)
              for (int b = 0; b < dim(l); ++b)
                for (int c = 0; c < dim(m); ++c) {
                  int col = (a * dim(l) + b) * dim(m) + c;
                  for (int t = 0; t < dim(l + m - 1); ++t) {
                    Rational v = d1.at(t, b * dim(m) + c);
                    if (v == 0) continue;
                    for (int r = 0; r < dim(fin); ++r) {
                      Rational w = d2.at(r, a * dim(l + m - 1) + t);
                      if (w != 0) rhs.add(r, col, v * w);
                    }
                  }
                }
            if (!(lhs == rhs)) {
              std::ostringstream os;
              os << "sequential associativity fails at (" << k << "," << l << "," << m
                 << ") i=" << i << " j=" << j;
              return os.str();
            }
          }
      }
  // parallel associativity: (p o_i q) o_{j+l-1} r = (p o_j r) o_i q for i < j
  for (int k = 2; k <= max_arity; ++k)
    for (int l = 2; l <= max_arity; ++l)
      for (int m = 2; m <= max_arity; ++m) {
        if (!dim(k) || !dim(l) || !dim(m)) continue;
        int fin = k + l + m - 2;
        if (fin > max_arity) continue;
        for (int i = 1; i <= k; ++i)
          for (int j = i + 1; j <= k; ++j) {
            SpMat lhs(dim(fin), dim(k) * dim(l) * dim(m));
            SpMat c1 = comp(k, i, l), c2 = comp(k + l - 1, j + l - 1, m);
            SpMat d1 = comp(k, j, m), d2 = comp(k + m - 1, i, l);
            for (int a = 0; a < dim(k); ++a)
              for (int b = 0; b < dim(l); ++b)
                for (int c = 0; c < dim(m); ++c) {
                  int col = (a * dim(l) + b) * dim(m) + c;
                  for (int t = 0; t < dim(k + l - 1); ++t) {
                    Rational v = c1.at(t, a * dim(l) + b);
                    if (v == 0) continue;
                    for (int r = 0; r < dim(fin); ++r) {
                      Rational w = c2.at(r, t * dim(m) + c);
                      if (w != 0) lhs.add(r, col, v * w);
                    }
                  }
                  for (int t = 0; t < dim(k + m - 1); ++t) {
                    Rational v = d1.at(t, a * dim(m) + c);
                    if (v == 0) continue;
                    for (int r = 0; r < dim(fin); ++r) {
                      Rational w = d2.at(r, t * dim(l) + b);
                      if (w != 0) lhs.add(r, col, -v * w);
                    }
                  }
                }
            if (!lhs.is_zero()) {
              std::ostringstream os;
              os << "parallel associativity fails at (" << k << "," << l << "," << m
                 << ") i=" << i << " j=" << j;
              return os.str();
            }
          }
      }
  return "";
}

Operad com_operad(int max_arity) {
  Operad p;
  p.name = "com" + std::to_string(max_arity);
  p.max_arity = max_arity;
  for (int n = 2; n <= max_arity; ++n) {
    p.basis[n] = {"mu" + std::to_string(n)};
    p.transpositions[n] = std::vector<SpMat>(n - 1, SpMat::ident(1));
  }
  for (int k = 2; k <= max_arity; ++k)
    for (int l = 2; l <= max_arity; ++l) {
      if (k + l - 1 > max_arity) continue;
      for (int i = 1; i <= k; ++i) {
        SpMat m(1, 1);
        m.set(0, 0, 1);
        p.comps[{k, i, l}] = m;
      }
    }
  return p;
}

namespace {

// Ass(n) basis: permutations of {0..n-1} (the multiplication order of the
// inputs), lexicographic
int perm_index(const std::vector<int>& p) {
  int n = (int)p.size(), idx = 0;
  std::vector<int> left(n);
  std::iota(left.begin(), left.end(), 0);
  int fact = 1;
  for (int i = 2; i < n; ++i) fact *= i;
  for (int i = 0; i < n - 1; ++i) {
    int pos = (int)(std::find(left.begin(), left.end(), p[i]) - left.begin());
    idx += pos * fact;
    left.erase(left.begin() + pos);
    if (n - 1 - i > 1) fact /= (n - 1 - i);
  }
  return idx;
}

}  // namespace

Operad ass_operad(int max_arity) {
  Operad p;
  p.name = "ass" + std::to_string(max_arity);
  p.max_arity = max_arity;
  for (int n = 2; n <= max_arity; ++n) {
    auto perms = all_permutations(n);
    for (auto& s : perms) {
      std::string lab = "m";
      for (int v : s) lab += std::to_string(v + 1);
      p.basis[n].push_back(lab);
    }
    // adjacent transposition s_j relabels inputs j-1 <-> j
    std::vector<SpMat> gens;
    for (int j = 0; j + 1 < n; ++j) {
      SpMat g((int)perms.size(), (int)perms.size());
      for (auto& s : perms) {
        std::vector<int> t = s;
        for (int& v : t) {
          if (v == j)
            v = j + 1;
          else if (v == j + 1)
            v = j;
        }
        g.set(perm_index(t), perm_index(s), 1);
      }
      gens.push_back(g);
    }
    p.transpositions[n] = gens;
  }
  for (int k = 2; k <= max_arity; ++k)
    for (int l = 2; l <= max_arity; ++l) {
      if (k + l - 1 > max_arity) continue;
      auto pk = all_permutations(k), pl = all_permutations(l);
      for (int i = 1; i <= k; ++i) {
        SpMat m((int)all_permutations(k + l - 1).size(), (int)(pk.size() * pl.size()));
        for (size_t a = 0; a < pk.size(); ++a)
          for (size_t b = 0; b < pl.size(); ++b) {
            // substitute the block for input i-1 of the outer order
            std::vector<int> r;
            for (int v : pk[a]) {
              if (v == i - 1) {
                for (int w : pl[b]) r.push_back(i - 1 + w);
              } else if (v < i - 1) {
                r.push_back(v);
              } else {
                r.push_back(v + l - 1);
              }
            }
            m.set(perm_index(r), (int)(a * pl.size() + b), 1);
          }
        p.comps[{k, i, l}] = m;
      }
    }
  return p;
}

SpMat Algebra::act(int n) const {
  auto it = action.find(n);
  if (it != action.end()) return it->second;
  int cols = operad.dim(n);
  for (int j = 0; j < n; ++j) cols *= dim();
  return SpMat(dim(), cols);
}

std::string Algebra::validate() const {
  int d = dim();
  // mu(p o_i q; a) = mu(p; a_1..mu(q; a_i..), ..)
  for (int k = 2; k <= operad.max_arity; ++k)
    for (int l = 2; l <= operad.max_arity; ++l) {
      int fin = k + l - 1;
      if (fin > operad.max_arity) continue;
      for (int i = 1; i <= k; ++i) {
        SpMat c = operad.comp(k, i, l);
        SpMat big = act(fin), outer = act(k), inner = act(l);
        int cols = operad.dim(k) * operad.dim(l);
        for (int t = 0; t < fin; ++t) cols *= d;
        SpMat diff(d, cols);
        std::vector<int> args(fin);
        std::function<void(int)> rec = [&](int pos) {
          if (pos < fin) {
            for (args[pos] = 0; args[pos] < d; ++args[pos]) rec(pos + 1);
            return;
          }
          for (int a = 0; a < operad.dim(k); ++a)
            for (int b = 0; b < operad.dim(l); ++b) {
              int col = a * operad.dim(l) + b;
              for (int t = 0; t < fin; ++t) col = col * d + args[t];
              // lhs: act(fin) . (comp (x) id)
              for (int t = 0; t < operad.dim(fin); ++t) {
                Rational v = c.at(t, a * operad.dim(l) + b);
                if (v == 0) continue;
                int bigcol = t;
                for (int u = 0; u < fin; ++u) bigcol = bigcol * d + args[u];
                for (int r = 0; r < d; ++r) {
                  Rational w = big.at(r, bigcol);
                  if (w != 0) diff.add(r, col, v * w);
                }
              }
              // rhs: act(k) with inner block evaluated first
              for (int x = 0; x < d; ++x) {
                int innercol = b;
                for (int u = i - 1; u < i - 1 + l; ++u) innercol = innercol * d + args[u];
                Rational v = inner.at(x, innercol);
                if (v == 0) continue;
                int outercol = a;
                for (int u = 0; u < i - 1; ++u) outercol = outercol * d + args[u];
                outercol = outercol * d + x;
                for (int u = i - 1 + l; u < fin; ++u) outercol = outercol * d + args[u];
                for (int r = 0; r < d; ++r) {
                  Rational w = outer.at(r, outercol);
                  if (w != 0) diff.add(r, col, -v * w);
                }
              }
            }
        };
        rec(0);
        if (!diff.is_zero()) {
          std::ostringstream os;
          os << "algebra associativity fails at (" << k << "," << i << "," << l << ")";
          return os.str();
        }
      }
    }
  return "";
}

Algebra sq0_algebra(const Operad& p, int n) {
  Algebra a;
  a.name = "sq0:" + std::to_string(n);
  a.operad = p;
  for (int i = 1; i <= n; ++i) a.basis.push_back("x" + std::to_string(i));
  return a;  // all actions zero
}

Algebra kx3_algebra(const Operad& p) {
  Algebra a;
  a.name = "kx3";
  a.operad = p;
  a.basis = {"x", "x2"};
  // binary: x.x = x2, everything else 0; higher arities all 0 (x^3 = 0)
  if (p.dim(2) == 1) {
    SpMat m(2, 1 * 2 * 2);
    m.set(1, 0, 1);  // mu2 (x) x (x) x -> x2
    a.action[2] = m;
  }
  return a;
}

Cooperad cocom_cooperad(int max_arity) {
  Cooperad c;
  c.name = "cocom" + std::to_string(max_arity);
  c.max_arity = max_arity;
  return c;
}

SpMat Coalgebra::co(int n) const {
  auto it = coact.find(n);
  if (it != coact.end()) return it->second;
  int rows = cooperad.dim(n);
  for (int j = 0; j < n; ++j) rows *= dim();
  return SpMat(rows, dim());
}

std::string Coalgebra::validate() const {
  int d = dim();
  // coassociativity: expanding input i of Delta_k with Delta_l equals Delta_{k+l-1}
  for (int k = 2; k <= cooperad.max_arity; ++k)
    for (int l = 2; l <= cooperad.max_arity; ++l) {
      int fin = k + l - 1;
      SpMat dk = co(k), dl = co(l);
      int frows = 1;
      for (int t = 0; t < fin; ++t) frows *= d;
      // above the truncation the (fin)-fold coaction is zero, and the
      // composite must vanish too for the truncated coalgebra to be valid
      SpMat dfin = fin <= cooperad.max_arity ? co(fin) : SpMat(frows, d);
      for (int i = 1; i <= k; ++i) {
        int rows = 1;
        for (int t = 0; t < fin; ++t) rows *= d;
        SpMat lhs(rows, d);
        for (int c = 0; c < d; ++c)
          for (auto& [rc, v] : dk.entries) {
            if (rc.second != c) continue;
            // decode row of Delta_k: k digits base d, last fastest
            std::vector<int> tup(k);
            int r = rc.first;
            for (int t = k - 1; t >= 0; --t) {
              tup[t] = r % d;
              r /= d;
            }
            for (auto& [rc2, v2] : dl.entries) {
              if (rc2.second != tup[i - 1]) continue;
              std::vector<int> in(l);
              int r2 = rc2.first;
              for (int t = l - 1; t >= 0; --t) {
                in[t] = r2 % d;
                r2 /= d;
              }
              std::vector<int> full;
              for (int t = 0; t < i - 1; ++t) full.push_back(tup[t]);
              for (int t = 0; t < l; ++t) full.push_back(in[t]);
              for (int t = i; t < k; ++t) full.push_back(tup[t]);
              int row = 0;
              for (int t = 0; t < fin; ++t) row = row * d + full[t];
              lhs.add(row, c, v * v2);
            }
          }
        if (!(lhs == dfin)) {
          std::ostringstream os;
          os << "coassociativity fails at (" << k << "," << i << "," << l << ")";
          return os.str();
        }
      }
    }
  return "";
}

int Coalgebra::coaction_depth() const {
  // breadth-first: the largest tree (by vertices) along which some basis
  // element has a nonzero iterated coaction; bounded search
  int best = 0;
  for (const Tree& t : enumerate_trees(2 * (int)basis.size() + 2, cooperad.max_arity)) {
    if (!coalgebra_tree_coaction(*this, t).is_zero()) best = std::max(best, t.n_vertices());
  }
  return best;
}

Coalgebra delta_zero_coalgebra(const Cooperad& c, int n) {
  Coalgebra e;
  e.name = "dz:" + std::to_string(n);
  e.cooperad = c;
  for (int i = 1; i <= n; ++i) e.basis.push_back("z" + std::to_string(i));
  return e;
}

Coalgebra xy_coalgebra(const Cooperad& c) {
  Coalgebra e;
  e.name = "xy";
  e.cooperad = c;
  e.basis = {"x", "y"};
  if (c.dim(2)) {
    SpMat m(4, 2);
    m.set(3, 0, 1);  // x -> y (x) y
    e.coact[2] = m;
  }
  return e;
}

SpMat operad_tree_composite(const Operad& p, const Tree& B) {
  int nv = B.n_vertices();
  if (nv == 0) throw std::invalid_argument("operad_tree_composite: no vertices");
  auto lvs = B.leaves();
  int nl = (int)lvs.size();
  int cols = 1;
  for (int v = 0; v < nv; ++v) cols *= p.dim(B.arity(v));
  SpMat out(p.dim(nl), cols);
  if (out.n_rows == 0 || cols == 0) return out;
  std::vector<int> tup(nv);
  std::function<void(int, int)> rec = [&](int v, int col) {
    if (v < nv) {
      for (tup[v] = 0; tup[v] < p.dim(B.arity(v)); ++tup[v])
        rec(v + 1, col * p.dim(B.arity(v)) + tup[v]);
      return;
    }
    int root_v = B.top_vertex(0);
    std::vector<Rational> vec(p.dim(B.arity(root_v)), Rational(0));
    vec[tup[root_v]] = 1;
    std::vector<int> slots = B.vert_in[root_v];
    while (true) {
      int pos = -1;
      for (size_t j = 0; j < slots.size(); ++j)
        if (!B.is_leaf(slots[j])) {
          pos = (int)j;
          break;
        }
      if (pos < 0) break;
      int w = B.top_vertex(slots[pos]);
      int k = (int)slots.size(), l = B.arity(w);
      SpMat c = p.comp(k, pos + 1, l);
      std::vector<Rational> nvec(p.dim(k + l - 1), Rational(0));
      for (size_t a = 0; a < vec.size(); ++a) {
        if (vec[a] == 0) continue;
        int colc = (int)a * p.dim(l) + tup[w];
        for (int r = 0; r < c.n_rows; ++r) {
          Rational x = c.at(r, colc);
          if (x != 0) nvec[r] += vec[a] * x;
        }
      }
      vec = std::move(nvec);
      std::vector<int> ns(slots.begin(), slots.begin() + pos);
      for (int i : B.vert_in[w]) ns.push_back(i);
      for (size_t j = pos + 1; j < slots.size(); ++j) ns.push_back(slots[j]);
      slots = std::move(ns);
      if (vec.empty()) break;  // truncated to zero
    }
    if (vec.empty()) return;
    // relabel slots to ascending edge order
    std::vector<int> sorted = slots;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> rho(slots.size());
    for (size_t j = 0; j < slots.size(); ++j)
      rho[j] = (int)(std::find(sorted.begin(), sorted.end(), slots[j]) - sorted.begin());
    SpMat rel = p.relabel(nl, rho);
    for (size_t a = 0; a < vec.size(); ++a) {
      if (vec[a] == 0) continue;
      for (int r = 0; r < rel.n_rows; ++r) {
        Rational x = rel.at(r, (int)a);
        if (x != 0) out.add(r, col, vec[a] * x);
      }
    }
  };
  rec(0, 0);
  return out;
}

SpMat algebra_tree_action(const Operad& p, const Algebra& a, const Tree& U) {
  auto lvs = U.leaves();
  int nv = U.n_vertices(), nl = (int)lvs.size(), d = a.dim();
  int cols = 1;
  for (int v = 0; v < nv; ++v) cols *= p.dim(U.arity(v));
  for (int j = 0; j < nl; ++j) cols *= d;
  SpMat out(d, cols);
  if (cols == 0) return out;
  std::vector<int> vt(nv), lt(nl);
  std::function<std::vector<Rational>(int)> eval = [&](int e) -> std::vector<Rational> {
    if (U.is_leaf(e)) {
      std::vector<Rational> v(d, Rational(0));
      int j = (int)(std::find(lvs.begin(), lvs.end(), e) - lvs.begin());
      v[lt[j]] = 1;
      return v;
    }
    int w = U.top_vertex(e);
    int k = U.arity(w);
    std::vector<std::vector<Rational>> kids;
    for (int i : U.vert_in[w]) kids.push_back(eval(i));
    SpMat m = a.act(k);
    std::vector<Rational> res(d, Rational(0));
    // iterate over nonzero tuples of kid coordinates
    std::vector<int> idx(k, 0);
    std::function<void(int, Rational)> loop = [&](int t, Rational coeff) {
      if (coeff == 0) return;
      if (t == k) {
        int col = vt[w];
        for (int u = 0; u < k; ++u) col = col * d + idx[u];
        for (int r = 0; r < d; ++r) {
          Rational x = m.at(r, col);
          if (x != 0) res[r] += coeff * x;
        }
        return;
      }
      for (idx[t] = 0; idx[t] < d; ++idx[t]) loop(t + 1, coeff * kids[t][idx[t]]);
    };
    if (p.dim(k) == 0) return std::vector<Rational>(d, Rational(0));
    loop(0, Rational(1));
    return res;
  };
  std::function<void(int, int)> rec = [&](int pos, int col) {
    if (pos < nv) {
      for (vt[pos] = 0; vt[pos] < p.dim(U.arity(pos)); ++vt[pos])
        rec(pos + 1, col * p.dim(U.arity(pos)) + vt[pos]);
      return;
    }
    if (pos < nv + nl) {
      int j = pos - nv;
      for (lt[j] = 0; lt[j] < d; ++lt[j]) rec(pos + 1, col * d + lt[j]);
      return;
    }
    auto v = eval(0);
    for (int r = 0; r < d; ++r)
      if (v[r] != 0) out.add(r, col, v[r]);
  };
  rec(0, 0);
  return out;
}

SpMat coalgebra_tree_coaction(const Coalgebra& e, const Tree& U) {
  auto lvs = U.leaves();
  int d = e.dim(), nl = (int)lvs.size();
  int rows = 1;
  for (int j = 0; j < nl; ++j) rows *= d;
  SpMat out(rows, d);
  // check arity bounds
  for (int v = 0; v < U.n_vertices(); ++v)
    if (e.cooperad.dim(U.arity(v)) == 0) return out;
  // recursive: value at edge -> map E -> E^{(x) leaves above e (DFS order)}
  std::function<std::map<std::vector<int>, std::vector<Rational>>(int)> walk =
      [&](int edge) -> std::map<std::vector<int>, std::vector<Rational>> {
    // returns for each tuple of E-basis (over leaves above edge, DFS order)
    // the column vector of coefficients as a function of the input basis
    std::map<std::vector<int>, std::vector<Rational>> res;
    if (U.is_leaf(edge)) {
      for (int b = 0; b < d; ++b) {
        std::vector<Rational> col(d, Rational(0));
        col[b] = 1;
        res[{b}] = col;
      }
      return res;
    }
    int w = U.top_vertex(edge);
    int k = U.arity(w);
    SpMat dk = e.co(k);
    std::vector<std::map<std::vector<int>, std::vector<Rational>>> kids;
    for (int i : U.vert_in[w]) kids.push_back(walk(i));
    for (int c = 0; c < d; ++c) {
      for (auto& [rc, v] : dk.entries) {
        if (rc.second != c) continue;
        std::vector<int> tup(k);
        int r = rc.first;
        for (int t = k - 1; t >= 0; --t) {
          tup[t] = r % d;
          r /= d;
        }
        // combine kid expansions of tup[t]
        std::vector<std::pair<std::vector<int>, Rational>> acc{{{}, v}};
        for (int t = 0; t < k; ++t) {
          std::vector<std::pair<std::vector<int>, Rational>> nxt;
          for (auto& [key, coeff] : acc)
            for (auto& [kk, kcol] : kids[t]) {
              if (kcol[tup[t]] == 0) continue;
              auto nk = key;
              nk.insert(nk.end(), kk.begin(), kk.end());
              nxt.emplace_back(nk, coeff * kcol[tup[t]]);
            }
          acc = std::move(nxt);
        }
        for (auto& [key, coeff] : acc) {
          auto& col = res.try_emplace(key, std::vector<Rational>(d, Rational(0))).first->second;
          col[c] += coeff;
        }
      }
    }
    return res;
  };
  auto res = walk(0);
  // DFS leaf order -> ascending edge order
  std::vector<int> dfs_leaves;
  std::function<void(int)> dfs = [&](int edge) {
    if (U.is_leaf(edge)) {
      dfs_leaves.push_back(edge);
      return;
    }
    for (int i : U.vert_in[U.top_vertex(edge)]) dfs(i);
  };
  dfs(0);
  for (auto& [key, col] : res) {
    // key[j] labels dfs_leaves[j]; build row index over ascending order
    std::vector<int> by_edge(nl, 0);
    for (int j = 0; j < nl; ++j) {
      int pos = (int)(std::find(lvs.begin(), lvs.end(), dfs_leaves[j]) - lvs.begin());
      by_edge[pos] = key[j];
    }
    int row = 0;
    for (int j = 0; j < nl; ++j) row = row * d + by_edge[j];
    for (int c = 0; c < d; ++c)
      if (col[c] != 0) out.add(row, c, col[c]);
  }
  return out;
}

namespace {

using nlohmann::json;

std::string rat_str(const Rational& r) {
  std::ostringstream os;
  os << r.get_num() << "/" << r.get_den();
  return os.str();
}

Rational rat_parse(const std::string& s) {
  auto slash = s.find('/');
  Rational r(s.substr(0, slash), 10);
  if (slash != std::string::npos) {
    Rational d(s.substr(slash + 1), 10);
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    r /= d;
  }
  return r;
}

json mat_to_json(const SpMat& m) {
  json rows = json::array();
  for (int r = 0; r < m.n_rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.n_cols; ++c) row.push_back(rat_str(m.at(r, c)));
    rows.push_back(row);
  }
  return rows;
}

SpMat mat_from_json(const json& j, int rows, int cols) {
  if (!j.is_array() || (int)j.size() != rows)
    throw std::invalid_argument("matrix row count mismatch");
  SpMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || (int)j[r].size() != cols)
      throw std::invalid_argument("matrix column count mismatch");
    for (int c = 0; c < cols; ++c) m.set(r, c, rat_parse(j[r][c].get<std::string>()));
  }
  return m;
}

}  // namespace

std::string operad_to_json(const Operad& p) {
  json j;
  j["kind"] = "operad";
  j["name"] = p.name;
  j["max_arity"] = p.max_arity;
  j["components"] = json::array();
  for (auto& [n, b] : p.basis) j["components"].push_back({{"arity", n}, {"basis", b}});
  j["compositions"] = json::array();
  for (auto& [key, m] : p.comps) {
    auto [k, i, l] = key;
    j["compositions"].push_back({{"k", k}, {"i", i}, {"l", l}, {"matrix", mat_to_json(m)}});
  }
  j["sym"] = json::array();
  for (auto& [n, gens] : p.transpositions) {
    json g = json::array();
    for (auto& m : gens) g.push_back(mat_to_json(m));
    j["sym"].push_back({{"arity", n}, {"generators", g}});
  }
  return j.dump(2);
}

Operad operad_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("bad JSON: ") + e.what());
  }
  if (j.value("kind", "") != "operad") throw std::invalid_argument("kind != operad");
  Operad p;
  p.name = j.value("name", "custom");
  p.max_arity = j.at("max_arity").get<int>();
  if (p.max_arity < 2) throw std::invalid_argument("max_arity must be >= 2");
  for (auto& c : j.at("components"))
    p.basis[c.at("arity").get<int>()] = c.at("basis").get<std::vector<std::string>>();
  for (auto& c : j.at("compositions")) {
    int k = c.at("k"), i = c.at("i"), l = c.at("l");
    p.comps[{k, i, l}] = mat_from_json(c.at("matrix"), p.dim(k + l - 1), p.dim(k) * p.dim(l));
  }
  for (auto& s : j.at("sym")) {
    int n = s.at("arity");
    std::vector<SpMat> gens;
    for (auto& g : s.at("generators")) gens.push_back(mat_from_json(g, p.dim(n), p.dim(n)));
    if ((int)gens.size() != n - 1) throw std::invalid_argument("need n-1 sym generators");
    p.transpositions[n] = gens;
  }
  std::string err = p.validate();
  if (!err.empty()) throw std::invalid_argument("invalid operad: " + err);
  return p;
}

std::string algebra_to_json(const Algebra& a) {
  json j;
  j["kind"] = "algebra";
  j["name"] = a.name;
  j["operad"] = json::parse(operad_to_json(a.operad));
  j["basis"] = a.basis;
  j["action"] = json::array();
  for (auto& [n, m] : a.action) j["action"].push_back({{"arity", n}, {"matrix", mat_to_json(m)}});
  return j.dump(2);
}

Algebra algebra_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("bad JSON: ") + e.what());
  }
  if (j.value("kind", "") != "algebra") throw std::invalid_argument("kind != algebra");
  Algebra a;
  a.name = j.value("name", "custom");
  a.operad = operad_from_json(j.at("operad").dump());
  a.basis = j.at("basis").get<std::vector<std::string>>();
  for (auto& c : j.at("action")) {
    int n = c.at("arity");
    int cols = a.operad.dim(n);
    for (int t = 0; t < n; ++t) cols *= a.dim();
    a.action[n] = mat_from_json(c.at("matrix"), a.dim(), cols);
  }
  std::string err = a.validate();
  if (!err.empty()) throw std::invalid_argument("invalid algebra: " + err);
  return a;
}

}  // namespace dendro
