#include "twistred/lie_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace twistred {

namespace {

constexpr double kBuildTol = 1e-11;

// ---------------------------------------------------------------------------
// Complex scaffolding. During construction we work with vectors over the
// complex basis (u_1..u_r, X_phi for all roots), where the u_j are a
// kappa-orthonormal basis of the real split Cartan and T_j = i u_j.
// Root ids: 0..m-1 positive roots, m..2m-1 their negatives.
// ---------------------------------------------------------------------------

int opposite_id(int id, int m) { return id < m ? id + m : id - m; }

int pos_index(int id, int m) { return id < m ? id : id - m; }

double id_sign(int id, int m) { return id < m ? 1.0 : -1.0; }

struct ComplexModel {
  int r = 0;
  int m = 0;
  const Eigen::MatrixXd* angle = nullptr;  // (m x r), positive roots
  const Eigen::MatrixXd* nx = nullptr;     // (2m x 2m)
  const RootSystem* rs = nullptr;

  int size() const { return r + 2 * m; }

  int sum_id(int a, int b) const {
    Eigen::VectorXi va = coords(a) + coords(b);
    if ((va.array() == 0).all()) return -1;
    if ((va.array() >= 0).all()) {
      int idx = rs->index_of(va);
      return idx;
    }
    if ((va.array() <= 0).all()) {
      Eigen::VectorXi neg = -va;
      int idx = rs->index_of(neg);
      return idx < 0 ? -1 : idx + m;
    }
    return -1;
  }

  Eigen::VectorXi coords(int id) const {
    return id < m ? rs->positive[id] : Eigen::VectorXi(-rs->positive[id - m]);
  }

  // Bracket of basis elements, returned as a sparse set of (index, value).
  void basis_bracket(int a, int b,
                     std::vector<std::pair<int, std::complex<double>>>& out) const {
    out.clear();
    bool a_cartan = a < r;
    bool b_cartan = b < r;
    if (a_cartan && b_cartan) return;
    if (a_cartan || b_cartan) {
      int j = a_cartan ? a : b;
      int id = (a_cartan ? b : a) - r;
      double ang = id_sign(id, m) * (*angle)(pos_index(id, m), j);
      std::complex<double> val(ang, 0.0);
      if (!a_cartan) val = -val;  // [X, u] = -[u, X]
      out.emplace_back(r + id, val);
      return;
    }
    int ida = a - r, idb = b - r;
    if (idb == opposite_id(ida, m)) {
      // [X_phi, X_{-phi}] = t_phi
      int p = pos_index(ida, m);
      double s = id_sign(ida, m);
      for (int j = 0; j < r; ++j) {
        double c = s * (*angle)(p, j);
        if (c != 0.0) out.emplace_back(j, std::complex<double>(c, 0.0));
      }
      return;
    }
    double c = (*nx)(ida, idb);
    if (c != 0.0) {
      int sid = sum_id(ida, idb);
      if (sid >= 0) out.emplace_back(r + sid, std::complex<double>(c, 0.0));
    }
  }

  Eigen::VectorXcd bracket(const Eigen::VectorXcd& v,
                           const Eigen::VectorXcd& w) const {
    Eigen::VectorXcd res = Eigen::VectorXcd::Zero(size());
    std::vector<int> iv, iw;
    for (int i = 0; i < size(); ++i) {
      if (std::abs(v[i]) > 1e-15) iv.push_back(i);
    }
    for (int i = 0; i < size(); ++i) {
      if (std::abs(w[i]) > 1e-15) iw.push_back(i);
    }
    std::vector<std::pair<int, std::complex<double>>> terms;
    for (int a : iv) {
      for (int b : iw) {
        basis_bracket(a, b, terms);
        for (auto& [idx, val] : terms) res[idx] += v[a] * w[b] * val;
      }
    }
    return res;
  }

  // kappa pairing in this basis: kappa(u_i,u_j)=delta, kappa(X_a, X_b)=1 iff
  // b is opposite to a.
  std::complex<double> kappa(const Eigen::VectorXcd& v,
                             const Eigen::VectorXcd& w) const {
    std::complex<double> s = 0.0;
    for (int j = 0; j < r; ++j) s += v[j] * w[j];
    for (int id = 0; id < 2 * m; ++id)
      s += v[r + id] * w[r + opposite_id(id, m)];
    return s;
  }
};

// Compact coordinates -> complex scaffold coordinates (u_j basis).
Eigen::VectorXcd compact_to_complex(const SimpleLieAlgebra& alg,
                                    const Eigen::VectorXd& v) {
  const std::complex<double> im(0.0, 1.0);
  const double s2 = std::sqrt(2.0);
  int r = alg.rank, m = alg.npos;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(r + 2 * m);
  for (int j = 0; j < r; ++j) c[j] = im * v[j];  // T_j = i u_j
  for (int p = 0; p < m; ++p) {
    double y = v[alg.y_index(p)], z = v[alg.z_index(p)];
    c[r + p] = std::complex<double>(z, y) / s2;        // X_phi
    c[r + m + p] = std::complex<double>(-z, y) / s2;   // X_{-phi}
  }
  return c;
}

Eigen::VectorXd complex_to_compact(const SimpleLieAlgebra& alg,
                                   const Eigen::VectorXcd& c, double tol) {
  const std::complex<double> im(0.0, 1.0);
  const double s2 = std::sqrt(2.0);
  int r = alg.rank, m = alg.npos;
  Eigen::VectorXd v(alg.dim);
  double dust = 0.0;
  for (int j = 0; j < r; ++j) {
    std::complex<double> t = -im * c[j];
    v[j] = t.real();
    dust = std::max(dust, std::abs(t.imag()));
  }
  for (int p = 0; p < m; ++p) {
    std::complex<double> cp = c[r + p], cm = c[r + m + p];
    std::complex<double> y = -im * (cp + cm) / s2;
    std::complex<double> z = (cp - cm) / s2;
    v[alg.y_index(p)] = y.real();
    v[alg.z_index(p)] = z.real();
    dust = std::max(dust, std::max(std::abs(y.imag()), std::abs(z.imag())));
  }
  if (dust > tol)
    throw NumericalError("complex->compact conversion left imaginary residue " +
                         std::to_string(dust));
  return v;
}

ComplexModel model_of(const SimpleLieAlgebra& alg) {
  ComplexModel md;
  md.r = alg.rank;
  md.m = alg.npos;
  md.angle = &alg.root_angle;
  md.nx = &alg.nx;
  md.rs = &alg.roots;
  return md;
}

// Fills alg.ad from the complex tables.
void build_real_table(SimpleLieAlgebra& alg) {
  ComplexModel md = model_of(alg);
  alg.ad.assign(alg.dim, Eigen::MatrixXd::Zero(alg.dim, alg.dim));
  std::vector<Eigen::VectorXcd> basis(alg.dim);
  for (int i = 0; i < alg.dim; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(alg.dim);
    e[i] = 1.0;
    basis[i] = compact_to_complex(alg, e);
  }
  for (int a = 0; a < alg.dim; ++a) {
    for (int b = a + 1; b < alg.dim; ++b) {
      Eigen::VectorXcd w = md.bracket(basis[a], basis[b]);
      Eigen::VectorXd coords = complex_to_compact(alg, w, 1e-9);
      alg.ad[a].col(b) = coords;
      alg.ad[b].col(a) = -coords;
    }
  }
}

void compute_normalization(SimpleLieAlgebra& alg) {
  // <X,X> = 1 = -C tr(ad_X^2) for any unit basis vector.
  double c0 = 0.0;
  for (int i = 0; i < alg.dim; i += std::max(1, alg.dim / 5)) {
    double tr = (alg.ad[i] * alg.ad[i]).trace();
    double c = -1.0 / tr;
    if (c0 == 0.0) c0 = c;
    if (std::abs(c - c0) > 1e-8 * std::abs(c0))
      throw NumericalError("invariant form is not proportional to the Killing form");
  }
  alg.normalization_constant = c0;
}

void find_chains(SimpleLieAlgebra& alg) {
  alg.chains.assign(alg.npos, SimpleLieAlgebra::Chain{});
  for (int p = 0; p < alg.npos; ++p) {
    const Eigen::VectorXi& phi = alg.roots.positive[p];
    if (phi.sum() == 1) continue;  // simple
    for (int i = 0; i < alg.rank; ++i) {
      if (phi[i] == 0) continue;
      Eigen::VectorXi beta = phi;
      beta[i] -= 1;
      int q = alg.roots.index_of(beta);
      if (q < 0) continue;
      int si = alg.simple_root_index(i);
      double n = alg.nx(si, q);
      if (std::abs(n) > 1e-9) {
        alg.chains[p] = {i, q, n};
        break;
      }
    }
    if (alg.chains[p].lower < 0)
      throw NumericalError("no bracket chain found for a positive root");
  }
}

// ---------------------------------------------------------------------------
// Simply-laced construction from the two-cocycle on the root lattice.
// ---------------------------------------------------------------------------

SimpleLieAlgebra build_simply_laced(Family f, int rank) {
  SimpleLieAlgebra alg;
  alg.family = f;
  alg.rank = rank;
  alg.roots = build_root_system(f, rank);
  alg.npos = alg.roots.num_positive();
  alg.dim = alg.rank + 2 * alg.npos;

  // u_j = sum_k R(j,k) t_{alpha_k} with R G R^T = I.
  Eigen::MatrixXd g = alg.roots.simple_gram;
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  Eigen::MatrixXd l = llt.matrixL();
  alg.cartan_orthobasis = l.inverse();
  // root_angle(p, j) = phi_p(u_j) = (coords of phi_p) . G R^T
  Eigen::MatrixXd coords(alg.npos, rank);
  for (int p = 0; p < alg.npos; ++p)
    coords.row(p) = alg.roots.positive[p].cast<double>().transpose();
  alg.root_angle = coords * g * alg.cartan_orthobasis.transpose();

  // Cocycle parity on the lattice: eps(a,b) = (-1)^{sum a_i b_j over marked
  // (i,j)}, marked when i == j or (edge and i < j).
  Eigen::MatrixXi marked = Eigen::MatrixXi::Zero(rank, rank);
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < rank; ++j) {
      if (i == j) marked(i, j) = 1;
      else if (i < j && alg.roots.cartan(i, j) != 0) marked(i, j) = 1;
    }
  }
  auto eps = [&](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
    long s = 0;
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j)
        if (marked(i, j)) s += static_cast<long>(a[i]) * b[j];
    return (s % 2 == 0) ? 1.0 : -1.0;
  };

  int m = alg.npos;
  alg.nx = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  ComplexModel md = model_of(alg);
  for (int a = 0; a < 2 * m; ++a) {
    for (int b = 0; b < 2 * m; ++b) {
      if (b == opposite_id(a, m)) continue;
      int sid = md.sum_id(a, b);
      if (sid < 0) continue;
      Eigen::VectorXi va = md.coords(a), vb = md.coords(b);
      double flip = id_sign(a, m) * id_sign(b, m) * id_sign(sid, m);
      alg.nx(a, b) = flip * eps(va, vb);
    }
  }

  build_real_table(alg);
  compute_normalization(alg);
  find_chains(alg);
  return alg;
}

SimpleLieAlgebra build_internal(Family f, int rank);

// ---------------------------------------------------------------------------
// Folding: fixed-point subalgebra of a simply-laced parent under a diagram
// automorphism, renormalized so its own long roots have squared length 2.
// ---------------------------------------------------------------------------

SimpleLieAlgebra fold(Family parent_family, int parent_rank, int order,
                      Family target_family, int target_rank) {
  SimpleLieAlgebra parent = build_internal(parent_family, parent_rank);
  DiagramAutomorphism aut = diagram_automorphism(parent, order);
  int rp = parent.rank, mp = parent.npos;

  Eigen::MatrixXd bfix_full = fixed_cartan_basis(parent, aut);
  Eigen::MatrixXd bfix = bfix_full.topRows(rp);  // Cartan coordinates
  int rbar = static_cast<int>(bfix.cols());
  if (rbar != target_rank) throw NumericalError("fold: unexpected fixed rank");

  // Orbits of positive roots under the induced permutation.
  std::vector<int> orbit_of(mp, -1);
  std::vector<std::vector<int>> orbits;
  for (int p = 0; p < mp; ++p) {
    if (orbit_of[p] >= 0) continue;
    std::vector<int> cyc;
    int q = p;
    do {
      orbit_of[q] = static_cast<int>(orbits.size());
      cyc.push_back(q);
      q = aut.root_perm[q];
    } while (q != p);
    orbits.push_back(cyc);
  }

  // Node classes of the diagram permutation, then the class order matching
  // the canonical Cartan matrix of the target family.
  std::vector<int> class_of(rp, -1);
  std::vector<std::vector<int>> classes;
  for (int i = 0; i < rp; ++i) {
    if (class_of[i] >= 0) continue;
    std::vector<int> cl;
    int j = i;
    do {
      class_of[j] = static_cast<int>(classes.size());
      cl.push_back(j);
      j = aut.node_perm[j];
    } while (j != i);
    classes.push_back(cl);
  }
  if (static_cast<int>(classes.size()) != rbar)
    throw NumericalError("fold: node classes do not match fixed rank");

  // Restricted simple roots: theta row of a class representative restricted
  // to the fixed Cartan (same for every member of the class).
  auto restricted_row = [&](int pos_idx) {
    return Eigen::VectorXd(parent.root_angle.row(pos_idx) * bfix);
  };
  std::vector<Eigen::VectorXd> simple_restr(rbar);
  for (int c = 0; c < rbar; ++c)
    simple_restr[c] = restricted_row(parent.simple_root_index(classes[c][0]));

  RootSystem target = build_root_system(target_family, target_rank);
  // Find the ordering of classes reproducing the canonical Cartan matrix.
  std::vector<int> perm(rbar);
  std::iota(perm.begin(), perm.end(), 0);
  auto cartan_entry = [&](int ci, int cj) {
    double num = 2.0 * simple_restr[ci].dot(simple_restr[cj]);
    double den = simple_restr[cj].squaredNorm();
    return num / den;
  };
  bool found = false;
  do {
    bool ok = true;
    for (int i = 0; i < rbar && ok; ++i)
      for (int j = 0; j < rbar && ok; ++j)
        if (std::abs(cartan_entry(perm[i], perm[j]) - target.cartan(i, j)) > 1e-8)
          ok = false;
    if (ok) {
      found = true;
      break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (!found) throw NumericalError("fold: restricted system does not match target");

  // Integer coordinates of each orbit's restriction in the ordered classes.
  std::vector<int> node_to_class(rp);
  for (int i = 0; i < rp; ++i) {
    for (int c = 0; c < rbar; ++c)
      if (perm[c] == class_of[i]) node_to_class[i] = c;
  }
  int mbar = target.num_positive();
  std::vector<int> orbit_to_target(orbits.size(), -1);
  std::vector<int> target_to_orbit(mbar, -1);
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    Eigen::VectorXi cc = Eigen::VectorXi::Zero(rbar);
    const Eigen::VectorXi& rep = parent.roots.positive[orbits[o][0]];
    for (int i = 0; i < rp; ++i) cc[node_to_class[i]] += rep[i];
    int idx = target.index_of(cc);
    if (idx < 0 || target_to_orbit[idx] >= 0)
      throw NumericalError("fold: restricted roots do not biject onto target");
    orbit_to_target[o] = idx;
    target_to_orbit[idx] = static_cast<int>(o);
  }

  // Renormalization: long restricted roots get squared length 2.
  double maxlen = 0.0;
  for (auto& orb : orbits)
    maxlen = std::max(maxlen, restricted_row(orb[0]).squaredNorm());
  double snorm = maxlen / 2.0;
  double invs = 1.0 / std::sqrt(snorm);

  SimpleLieAlgebra alg;
  alg.family = target_family;
  alg.rank = target_rank;
  alg.roots = target;
  alg.npos = mbar;
  alg.dim = target_rank + 2 * mbar;

  // Folded basis expressed in parent compact coordinates.
  Eigen::MatrixXd bas = Eigen::MatrixXd::Zero(parent.dim, alg.dim);
  bas.block(0, 0, rp, rbar) = bfix * invs;
  std::vector<std::vector<std::pair<int, double>>> orbit_terms(orbits.size());
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    double c = 1.0;
    for (int k = 0; k < static_cast<int>(orbits[o].size()); ++k) {
      int p = orbits[o][k];
      orbit_terms[o].emplace_back(p, c);
      c *= aut.root_sign[p];
    }
  }
  alg.root_angle.resize(mbar, rbar);
  for (int t = 0; t < mbar; ++t) {
    int o = target_to_orbit[t];
    double w = invs / std::sqrt(static_cast<double>(orbits[o].size()));
    for (auto& [p, c] : orbit_terms[o]) {
      bas(parent.y_index(p), alg.y_index(t)) = c * w;
      bas(parent.z_index(p), alg.z_index(t)) = c * w;
    }
    alg.root_angle.row(t) = restricted_row(orbits[o][0]).transpose() * invs;
  }

  // Consistency: Gram of restricted roots against the canonical system.
  for (int s = 0; s < mbar; ++s) {
    for (int t = 0; t < mbar; ++t) {
      double got = alg.root_angle.row(s).dot(alg.root_angle.row(t));
      double want = target.inner(target.positive[s], target.positive[t]);
      if (std::abs(got - want) > 1e-9)
        throw NumericalError("fold: restricted root Gram mismatch");
    }
  }

  // Real structure constants from the parent bracket; folded coordinates are
  // snorm * bas^T v because <.,.>_0 = snorm <.,.>_parent.
  alg.ad.assign(alg.dim, Eigen::MatrixXd::Zero(alg.dim, alg.dim));
  for (int a = 0; a < alg.dim; ++a) {
    Eigen::MatrixXd ad_a = Eigen::MatrixXd::Zero(parent.dim, parent.dim);
    for (int i = 0; i < parent.dim; ++i)
      if (std::abs(bas(i, a)) > 1e-15) ad_a += bas(i, a) * parent.ad[i];
    for (int b = 0; b < alg.dim; ++b) {
      Eigen::VectorXd w = ad_a * bas.col(b);
      Eigen::VectorXd coords = snorm * (bas.transpose() * w);
      if ((w - bas * coords).norm() > 1e-9)
        throw NumericalError("fold: bracket left the fixed subalgebra");
      alg.ad[a].col(b) = coords;
    }
  }

  // Complex structure constants among the folded root vectors.
  ComplexModel pmd = model_of(parent);
  auto folded_x = [&](int id) {  // id over folded signed roots
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(pmd.size());
    int t = pos_index(id, mbar);
    bool neg = id >= mbar;
    int o = target_to_orbit[t];
    double w = invs / std::sqrt(static_cast<double>(orbits[o].size()));
    for (auto& [p, c] : orbit_terms[o]) v[rp + (neg ? p + mp : p)] = c * w;
    return v;
  };
  alg.nx = Eigen::MatrixXd::Zero(2 * mbar, 2 * mbar);
  ComplexModel fmd;  // only for sum_id lookups on the folded system
  fmd.r = rbar;
  fmd.m = mbar;
  fmd.angle = &alg.root_angle;
  fmd.nx = &alg.nx;
  fmd.rs = &alg.roots;
  for (int a = 0; a < 2 * mbar; ++a) {
    for (int b = 0; b < 2 * mbar; ++b) {
      if (b == opposite_id(a, mbar)) continue;
      int sid = fmd.sum_id(a, b);
      if (sid < 0) continue;
      Eigen::VectorXcd w = pmd.bracket(folded_x(a), folded_x(b));
      std::complex<double> n = snorm * pmd.kappa(w, folded_x(opposite_id(sid, mbar)));
      if (std::abs(n.imag()) > 1e-9)
        throw NumericalError("fold: complex structure constant not real");
      alg.nx(a, b) = n.real();
    }
  }

  // Orthonormal Cartan basis in terms of the folded simple coroots.
  Eigen::MatrixXd sbar(rbar, rbar);
  for (int k = 0; k < rbar; ++k)
    sbar.row(k) = alg.root_angle.row(alg.simple_root_index(k));
  alg.cartan_orthobasis = sbar.inverse();

  compute_normalization(alg);
  find_chains(alg);
  return alg;
}

SimpleLieAlgebra build_internal(Family f, int rank) {
  switch (f) {
    case Family::A:
      return build_simply_laced(f, rank);
    case Family::D:
      return build_simply_laced(f, rank);
    case Family::B:
      return fold(Family::D, rank + 1, 2, Family::B, rank);
    case Family::C:
      return fold(Family::A, 2 * rank - 1, 2, Family::C, rank);
    case Family::G2:
      return fold(Family::D, 4, 3, Family::G2, 2);
  }
  throw ValidationError("unknown family");
}

}  // namespace

int SimpleLieAlgebra::simple_root_index(int node) const {
  Eigen::VectorXi e = Eigen::VectorXi::Zero(rank);
  e[node] = 1;
  int idx = roots.index_of(e);
  if (idx < 0) throw NumericalError("simple root missing from root list");
  return idx;
}

double SimpleLieAlgebra::theta(int p, const AlgebraVector& q) const {
  return root_angle.row(p).dot(q.head(rank));
}

AlgebraVector SimpleLieAlgebra::basis_vector(int i) const {
  AlgebraVector v = AlgebraVector::Zero(dim);
  v[i] = 1.0;
  return v;
}

bool SimpleLieAlgebra::in_cartan(const AlgebraVector& v, double tol) const {
  return v.tail(dim - rank).norm() <= tol * std::max(1.0, v.norm());
}

Eigen::MatrixXd SimpleLieAlgebra::ad_of(const AlgebraVector& v) const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    if (v[i] != 0.0) a += v[i] * ad[i];
  return a;
}

SimpleLieAlgebra build_algebra(Family f, int rank) {
  auto reject = [&](const std::string& why) {
    throw ValidationError("unsupported algebra " + family_name(f, rank) + ": " + why);
  };
  switch (f) {
    case Family::A:
      if (rank < 1 || rank > 6) reject("rank must be 1..6");
      break;
    case Family::B:
    case Family::C:
      if (rank < 2 || rank > 4) reject("rank must be 2..4");
      break;
    case Family::D:
      if (rank != 4) reject("only rank 4 is supported");
      break;
    case Family::G2:
      if (rank != 2) reject("rank must be 2");
      break;
  }
  return build_internal(f, rank);
}

const SimpleLieAlgebra& algebra_cache(Family f, int rank) {
  static std::mutex mu;
  static std::map<std::pair<char, int>, std::unique_ptr<SimpleLieAlgebra>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(static_cast<char>(f), rank);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<SimpleLieAlgebra>(build_algebra(f, rank)))
             .first;
  }
  return *it->second;
}

AlgebraVector bracket(const SimpleLieAlgebra& alg, const AlgebraVector& x,
                      const AlgebraVector& y) {
  if (x.size() != alg.dim || y.size() != alg.dim)
    throw ValidationError("bracket: dimension mismatch");
  AlgebraVector res = AlgebraVector::Zero(alg.dim);
  for (int i = 0; i < alg.dim; ++i)
    if (x[i] != 0.0) res += x[i] * (alg.ad[i] * y);
  return res;
}

AlgebraVector exp_ad_cartan(const SimpleLieAlgebra& alg, const AlgebraVector& q,
                            const AlgebraVector& x, double sign) {
  if (q.size() != alg.dim || x.size() != alg.dim)
    throw ValidationError("exp_ad_cartan: dimension mismatch");
  if (!alg.in_cartan(q)) throw ValidationError("exp_ad_cartan: q not in Cartan span");
  AlgebraVector out = x;
  for (int p = 0; p < alg.npos; ++p) {
    double th = sign * alg.theta(p, q);
    double c = std::cos(th), s = std::sin(th);
    double y = x[alg.y_index(p)], z = x[alg.z_index(p)];
    out[alg.y_index(p)] = c * y + s * z;
    out[alg.z_index(p)] = -s * y + c * z;
  }
  return out;
}

DiagramAutomorphism identity_automorphism(const SimpleLieAlgebra& alg) {
  DiagramAutomorphism aut;
  aut.order = 1;
  aut.node_perm.resize(alg.rank);
  std::iota(aut.node_perm.begin(), aut.node_perm.end(), 0);
  aut.root_perm.resize(alg.npos);
  std::iota(aut.root_perm.begin(), aut.root_perm.end(), 0);
  aut.root_sign.assign(alg.npos, 1);
  aut.matrix = Eigen::MatrixXd::Identity(alg.dim, alg.dim);
  aut.group_level = (alg.family == Family::A);
  return aut;
}

DiagramAutomorphism diagram_automorphism(const SimpleLieAlgebra& alg, int order) {
  if (order == 1) return identity_automorphism(alg);
  DiagramAutomorphism aut;
  aut.order = order;
  aut.node_perm.resize(alg.rank);
  std::iota(aut.node_perm.begin(), aut.node_perm.end(), 0);
  if (order == 2) {
    if (alg.family == Family::A && alg.rank >= 2) {
      for (int i = 0; i < alg.rank; ++i) aut.node_perm[i] = alg.rank - 1 - i;
      aut.group_level = true;
    } else if (alg.family == Family::D) {
      std::swap(aut.node_perm[alg.rank - 2], aut.node_perm[alg.rank - 1]);
    } else {
      throw ValidationError("order-2 diagram automorphism requires A (rank>=2) or D");
    }
  } else if (order == 3) {
    if (alg.family != Family::D || alg.rank != 4)
      throw ValidationError("order-3 diagram automorphism exists only for D4");
    // legs 0, 2, 3 around the center node 1
    aut.node_perm[0] = 2;
    aut.node_perm[2] = 3;
    aut.node_perm[3] = 0;
  } else {
    throw ValidationError("diagram automorphism order must be 1, 2 or 3");
  }

  // Verify the permutation preserves the Cartan matrix.
  for (int i = 0; i < alg.rank; ++i)
    for (int j = 0; j < alg.rank; ++j)
      if (alg.roots.cartan(aut.node_perm[i], aut.node_perm[j]) != alg.roots.cartan(i, j))
        throw NumericalError("node permutation is not a diagram symmetry");

  // Induced action on positive roots with signs, by height induction along
  // the stored bracket chains.
  aut.root_perm.assign(alg.npos, -1);
  aut.root_sign.assign(alg.npos, 0);
  auto perm_root = [&](const Eigen::VectorXi& v) {
    Eigen::VectorXi w = Eigen::VectorXi::Zero(alg.rank);
    for (int i = 0; i < alg.rank; ++i) w[aut.node_perm[i]] = v[i];
    return w;
  };
  std::vector<int> order_by_height(alg.npos);
  std::iota(order_by_height.begin(), order_by_height.end(), 0);
  std::sort(order_by_height.begin(), order_by_height.end(), [&](int a, int b) {
    return alg.roots.positive[a].sum() < alg.roots.positive[b].sum();
  });
  for (int p : order_by_height) {
    int tgt = alg.roots.index_of(perm_root(alg.roots.positive[p]));
    if (tgt < 0) throw NumericalError("diagram automorphism: image not a root");
    aut.root_perm[p] = tgt;
    if (alg.roots.positive[p].sum() == 1) {
      aut.root_sign[p] = 1;
      continue;
    }
    const auto& ch = alg.chains[p];
    int gsi = alg.simple_root_index(aut.node_perm[ch.simple_node]);
    int glo = aut.root_perm[ch.lower];
    double val = aut.root_sign[ch.lower] * alg.nx(gsi, glo) / ch.coeff;
    int sgn = val > 0 ? 1 : -1;
    if (std::abs(std::abs(val) - 1.0) > 1e-9)
      throw NumericalError("diagram automorphism: non-unit root sign");
    aut.root_sign[p] = sgn;
  }

  // Full matrix in the compact basis.
  aut.matrix = Eigen::MatrixXd::Zero(alg.dim, alg.dim);
  // Cartan block: u_j -> sum over coroots, re-expressed in the u basis.
  const Eigen::MatrixXd& r = alg.cartan_orthobasis;  // u = R t
  Eigen::MatrixXd s(alg.rank, alg.rank);             // s(p, j) = alpha_p(u_j)
  for (int p = 0; p < alg.rank; ++p)
    s.row(p) = alg.root_angle.row(alg.simple_root_index(p));
  for (int j = 0; j < alg.rank; ++j) {
    Eigen::VectorXd img = Eigen::VectorXd::Zero(alg.rank);
    for (int p = 0; p < alg.rank; ++p) {
      // t_{alpha_p} has u-coordinates s(p, :)
      img += r(j, p) * s.row(aut.node_perm[p]).transpose();
    }
    aut.matrix.block(0, j, alg.rank, 1) = img;
  }
  for (int p = 0; p < alg.npos; ++p) {
    aut.matrix(alg.y_index(aut.root_perm[p]), alg.y_index(p)) = aut.root_sign[p];
    aut.matrix(alg.z_index(aut.root_perm[p]), alg.z_index(p)) = aut.root_sign[p];
  }
  return aut;
}

AlgebraVector automorphism_apply(const DiagramAutomorphism& aut,
                                 const AlgebraVector& x) {
  return aut.matrix * x;
}

Eigen::MatrixXd fixed_cartan_basis(const SimpleLieAlgebra& alg,
                                   const DiagramAutomorphism& aut) {
  Eigen::MatrixXd cblock = aut.matrix.topLeftCorner(alg.rank, alg.rank);
  Eigen::MatrixXd fixed =
      kernel_basis(cblock - Eigen::MatrixXd::Identity(alg.rank, alg.rank), 1e-10);
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(alg.dim, fixed.cols());
  full.topRows(alg.rank) = fixed;
  return full;
}

namespace {

struct WallSet {
  std::vector<int> simple_reps;  // positive-root indices of restricted simples
  struct Wall {
    int rep;
    int size;
    double limit;  // size * theta_rep < limit
  };
  std::vector<Wall> walls;
};

WallSet compute_walls(const SimpleLieAlgebra& alg, const DiagramAutomorphism& aut) {
  WallSet ws;
  std::vector<bool> node_seen(alg.rank, false);
  for (int i = 0; i < alg.rank; ++i) {
    if (node_seen[i]) continue;
    int j = i;
    do {
      node_seen[j] = true;
      j = aut.node_perm[j];
    } while (j != i);
    ws.simple_reps.push_back(alg.simple_root_index(i));
  }
  std::vector<bool> seen(alg.npos, false);
  for (int p = 0; p < alg.npos; ++p) {
    if (seen[p]) continue;
    int q = p, size = 0;
    double sign = 1.0;
    do {
      seen[q] = true;
      sign *= aut.root_sign[q];
      q = aut.root_perm[q];
      ++size;
    } while (q != p);
    double limit = sign > 0 ? 2.0 * M_PI : M_PI;
    ws.walls.push_back({p, size, limit});
  }
  return ws;
}

void check_in_fixed_cartan(const SimpleLieAlgebra& alg,
                           const DiagramAutomorphism& aut, const AlgebraVector& q) {
  if (q.size() != alg.dim) throw ValidationError("alcove: dimension mismatch");
  if (!alg.in_cartan(q)) throw ValidationError("alcove: q not in the Cartan subalgebra");
  double scale = std::max(1.0, q.norm());
  if ((aut.matrix * q - q).norm() > 1e-9 * scale)
    throw ValidationError("alcove: q not fixed by the automorphism");
}

}  // namespace

double alcove_margin(const SimpleLieAlgebra& alg, const DiagramAutomorphism& aut,
                     const AlgebraVector& q) {
  check_in_fixed_cartan(alg, aut, q);
  WallSet ws = compute_walls(alg, aut);
  double margin = std::numeric_limits<double>::infinity();
  for (int rep : ws.simple_reps) margin = std::min(margin, alg.theta(rep, q));
  for (auto& w : ws.walls)
    margin = std::min(margin, w.limit - w.size * alg.theta(w.rep, q));
  return margin;
}

bool alcove_contains(const SimpleLieAlgebra& alg, const DiagramAutomorphism& aut,
                     const AlgebraVector& q, double tol) {
  return alcove_margin(alg, aut, q) > tol;
}

AlgebraVector random_alcove_point(const SimpleLieAlgebra& alg,
                                  const DiagramAutomorphism& aut, Rng& rng,
                                  double margin) {
  Eigen::MatrixXd bfix = fixed_cartan_basis(alg, aut);
  int rbar = static_cast<int>(bfix.cols());
  WallSet ws = compute_walls(alg, aut);
  // Simple-root coordinates x on the fixed Cartan: q = bfix * wfixinv * x.
  Eigen::MatrixXd wfix(rbar, rbar);
  for (int i = 0; i < rbar; ++i)
    for (int j = 0; j < rbar; ++j)
      wfix(i, j) = alg.root_angle.row(ws.simple_reps[i]).dot(bfix.col(j).head(alg.rank));
  Eigen::MatrixXd to_q = bfix * wfix.inverse();
  // Per-coordinate upper bounds from the affine walls.
  Eigen::VectorXd ub = Eigen::VectorXd::Constant(rbar, 2.0 * M_PI);
  for (auto& w : ws.walls) {
    Eigen::VectorXd a(rbar);
    for (int i = 0; i < rbar; ++i)
      a[i] = w.size * alg.root_angle.row(w.rep).dot(to_q.col(i).head(alg.rank));
    for (int i = 0; i < rbar; ++i)
      if (a[i] > 1e-12) ub[i] = std::min(ub[i], w.limit / a[i]);
  }
  for (int attempt = 0; attempt < 20000; ++attempt) {
    Eigen::VectorXd x(rbar);
    for (int i = 0; i < rbar; ++i) x[i] = uniform(rng, 0.0, ub[i]);
    AlgebraVector q = AlgebraVector::Zero(alg.dim);
    q.head(alg.rank) = (to_q * x).head(alg.rank);
    if (alcove_margin(alg, aut, q) >= margin) return q;
  }
  throw NumericalError("alcove sampling failed (margin too large?)");
}

SimpleLieAlgebra rotate_cartan_basis(const SimpleLieAlgebra& alg,
                                     const Eigen::MatrixXd& o) {
  if ((o * o.transpose() - Eigen::MatrixXd::Identity(alg.rank, alg.rank)).norm() > 1e-10)
    throw ValidationError("rotate_cartan_basis: map is not orthogonal");
  SimpleLieAlgebra out = alg;
  out.root_angle = alg.root_angle * o.transpose();
  out.cartan_orthobasis = o * alg.cartan_orthobasis;
  build_real_table(out);
  compute_normalization(out);
  return out;
}

Eigen::VectorXcd to_root_coords(const SimpleLieAlgebra& alg, const AlgebraVector& v) {
  const double s2 = std::sqrt(2.0);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(alg.rank + 2 * alg.npos);
  for (int j = 0; j < alg.rank; ++j) c[j] = v[j];
  for (int p = 0; p < alg.npos; ++p) {
    double y = v[alg.y_index(p)], z = v[alg.z_index(p)];
    c[alg.rank + p] = std::complex<double>(z, y) / s2;
    c[alg.rank + alg.npos + p] = std::complex<double>(-z, y) / s2;
  }
  return c;
}

AlgebraVector from_root_coords(const SimpleLieAlgebra& alg,
                               const Eigen::VectorXcd& c) {
  const std::complex<double> im(0.0, 1.0);
  const double s2 = std::sqrt(2.0);
  AlgebraVector v(alg.dim);
  for (int j = 0; j < alg.rank; ++j) v[j] = c[j].real();
  for (int p = 0; p < alg.npos; ++p) {
    std::complex<double> cp = c[alg.rank + p], cm = c[alg.rank + alg.npos + p];
    v[alg.y_index(p)] = (-im * (cp + cm) / s2).real();
    v[alg.z_index(p)] = ((cp - cm) / s2).real();
  }
  return v;
}

}  // namespace twistred
