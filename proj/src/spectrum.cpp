#include "twistred/spectrum.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace twistred {

namespace {

struct WeightLess {
  bool operator()(const Weight& a, const Weight& b) const {
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

}  // namespace

WeightToolkit::WeightToolkit(RootSystem rs) : rs_(std::move(rs)) {
  fund_gram_ = rs_.fundamental_gram();
}

bool WeightToolkit::dominant(const Weight& mu) const {
  return (mu.array() >= 0).all();
}

double WeightToolkit::casimir_pairing(const Weight& mu) const {
  return rs_.casimir_pairing(mu.cast<double>());
}

namespace {
double pair_fund(const Eigen::MatrixXd& fg, const Eigen::VectorXd& a,
                 const Eigen::VectorXd& b) {
  return a.transpose() * fg * b;
}
}  // namespace

long WeightToolkit::dimension(const Weight& lambda) const {
  if (!dominant(lambda)) throw ValidationError("dimension: weight not dominant");
  Eigen::VectorXd lam = lambda.cast<double>();
  Eigen::VectorXd delta = Eigen::VectorXd::Ones(rank());
  double prod = 1.0;
  for (const auto& root : rs_.positive) {
    Eigen::VectorXd alpha = rs_.weight_coords(root).cast<double>();
    prod *= pair_fund(fund_gram_, lam + delta, alpha) /
            pair_fund(fund_gram_, delta, alpha);
  }
  long dim = std::lround(prod);
  if (std::abs(prod - dim) > 1e-6)
    throw NumericalError("dimension formula did not produce an integer");
  return dim;
}

int WeightToolkit::to_dominant_strict(Weight& mu) const {
  int sign = 1;
  for (int guard = 0; guard < 100000; ++guard) {
    int neg = -1;
    for (int i = 0; i < rank(); ++i) {
      if (mu[i] == 0) return 0;  // on a wall
      if (mu[i] < 0) {
        neg = i;
        break;
      }
    }
    if (neg < 0) return sign;
    int c = mu[neg];
    for (int j = 0; j < rank(); ++j) mu[j] -= c * rs_.cartan(neg, j);
    sign = -sign;
  }
  throw NumericalError("to_dominant_strict: reflection loop did not terminate");
}

Weight WeightToolkit::to_dominant(Weight mu) const {
  for (int guard = 0; guard < 100000; ++guard) {
    int neg = -1;
    for (int i = 0; i < rank(); ++i)
      if (mu[i] < 0) {
        neg = i;
        break;
      }
    if (neg < 0) return mu;
    int c = mu[neg];
    for (int j = 0; j < rank(); ++j) mu[j] -= c * rs_.cartan(neg, j);
  }
  throw NumericalError("to_dominant: reflection loop did not terminate");
}

Weight WeightToolkit::contragredient(const Weight& lambda) const {
  return to_dominant(-lambda);
}

Weight WeightToolkit::compose_with_symmetry(const Weight& lambda,
                                            const std::vector<int>& node_perm) const {
  Weight out(rank());
  for (int i = 0; i < rank(); ++i) out[i] = lambda[node_perm[i]];
  return out;
}

std::vector<WeightToolkit::WeightMultiplicity> WeightToolkit::weight_system(
    const Weight& lambda) const {
  if (!dominant(lambda)) throw ValidationError("weight_system: not dominant");
  if (lambda.maxCoeff() > max_label)
    throw ValidationError("weight_system: label cutoff exceeded");
  Eigen::VectorXd delta = Eigen::VectorXd::Ones(rank());
  double top = pair_fund(fund_gram_, lambda.cast<double>() + delta,
                         lambda.cast<double>() + delta);

  // candidate lattice points lambda - (nonneg root combos) inside the shifted
  // ball |mu + delta| <= |lambda + delta|
  std::map<Weight, long, WeightLess> mult;
  std::map<Weight, int, WeightLess> seen;
  std::queue<Weight> bfs;
  bfs.push(lambda);
  seen[lambda] = 1;
  std::vector<Weight> candidates;
  while (!bfs.empty()) {
    Weight mu = bfs.front();
    bfs.pop();
    candidates.push_back(mu);
    for (int i = 0; i < rank(); ++i) {
      Weight nu = mu;
      for (int j = 0; j < rank(); ++j) nu[j] -= rs_.cartan(i, j);
      if (seen.count(nu)) continue;
      double nn = pair_fund(fund_gram_, nu.cast<double>() + delta,
                            nu.cast<double>() + delta);
      if (nn > top + 1e-9) continue;
      seen[nu] = 1;
      bfs.push(nu);
    }
  }
  // Freudenthal over the dominant weights, in decreasing shifted norm; the
  // multiplicity of any lattice point is that of its dominant conjugate.
  std::vector<Weight> dominant_cands;
  for (const Weight& mu : candidates)
    if (dominant(mu)) dominant_cands.push_back(mu);
  std::sort(dominant_cands.begin(), dominant_cands.end(),
            [&](const Weight& a, const Weight& b) {
              double pa = pair_fund(fund_gram_, a.cast<double>() + delta,
                                    a.cast<double>() + delta);
              double pb = pair_fund(fund_gram_, b.cast<double>() + delta,
                                    b.cast<double>() + delta);
              if (pa != pb) return pa > pb;
              return WeightLess{}(a, b);
            });
  auto lookup = [&](const Weight& nu) -> long {
    auto it = mult.find(to_dominant(nu));
    return it == mult.end() ? 0 : it->second;
  };
  mult[lambda] = 1;
  for (const Weight& mu : dominant_cands) {
    if (mu == lambda) continue;
    double denom = top - pair_fund(fund_gram_, mu.cast<double>() + delta,
                                   mu.cast<double>() + delta);
    if (denom < 1e-12) continue;  // top shell: only the highest weight lives there
    double acc = 0.0;
    for (const auto& root : rs_.positive) {
      Weight alpha = rs_.weight_coords(root);
      Eigen::VectorXd alpha_d = alpha.cast<double>();
      double alen = pair_fund(fund_gram_, alpha_d, alpha_d);
      int kcap = static_cast<int>(std::ceil(2.0 * std::sqrt(top / alen))) + 1;
      for (int k = 1; k <= kcap; ++k) {
        Weight up = mu + k * alpha;
        long m = lookup(up);
        if (m > 0) acc += 2.0 * m * pair_fund(fund_gram_, up.cast<double>(), alpha_d);
      }
    }
    long m = std::lround(acc / denom);
    if (std::abs(acc / denom - m) > 1e-6)
      throw NumericalError("Freudenthal recursion produced a non-integer");
    if (m > 0) mult[mu] = m;
  }
  std::vector<WeightMultiplicity> out;
  for (const Weight& mu : candidates) {
    long m = lookup(mu);
    if (m > 0) out.push_back({mu, m});
  }
  return out;
}

long WeightToolkit::tensor_multiplicity(const Weight& lambda, const Weight& mu,
                                        const Weight& nu) const {
  // Klimyk: sum over weights sigma of the smaller factor of
  // sign(dom(sigma + mu + delta)) on matches with nu + delta.
  const Weight* small = &lambda;
  const Weight* big = &mu;
  if (dimension(lambda) > dimension(mu)) std::swap(small, big);
  Eigen::VectorXi delta = Eigen::VectorXi::Ones(rank());
  Weight target = nu + delta;
  long acc = 0;
  for (const auto& wm : weight_system(*small)) {
    Weight tau = wm.weight + *big + delta;
    int sign = to_dominant_strict(tau);
    if (sign == 0) continue;
    if (tau == target) acc += sign * wm.multiplicity;
  }
  if (acc < 0) throw NumericalError("tensor multiplicity came out negative");
  return acc;
}

long WeightToolkit::singlet_dimension(const Weight& a, const Weight& b,
                                      const Weight& c) const {
  // dim (V_a x V_b x V_c)^G = multiplicity of V_{c*} in V_a x V_b
  return tensor_multiplicity(a, b, contragredient(c));
}

long su2_triangle_singlet(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) throw ValidationError("labels must be nonnegative");
  if ((a + b + c) % 2 != 0) return 0;
  if (c < std::abs(a - b) || c > a + b) return 0;
  return 1;
}

double casimir_value(const WeightToolkit& wt, const std::vector<Weight>& weights,
                     const Eigen::VectorXd& lambdas) {
  if (static_cast<int>(weights.size()) != lambdas.size())
    throw ValidationError("casimir_value: one weight per factor required");
  double s = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!wt.dominant(weights[k]))
      throw ValidationError("casimir_value: weight not dominant");
    s += wt.casimir_pairing(weights[k]) / lambdas[static_cast<int>(k)];
  }
  return -s;
}

double weyl_constant(const RootSystem& rs) {
  Eigen::VectorXd delta = Eigen::VectorXd::Ones(rs.rank);
  double dd = delta.transpose() * rs.fundamental_gram() * delta;
  return -0.5 * dd;
}

std::vector<SpectralLevel> enumerate_levels(const WeightToolkit& wt,
                                            const std::vector<int>& gamma_node_perm,
                                            const Eigen::VectorXd& lambdas,
                                            const std::vector<Weight>& nu,
                                            double energy_cutoff) {
  int n = static_cast<int>(lambdas.size());
  if (static_cast<int>(nu.size()) != n)
    throw ValidationError("enumerate_levels: one orbit weight per factor");
  // per-factor candidates with energy share <= cutoff
  constexpr std::size_t kMaxCandidates = 5000;
  std::vector<std::vector<Weight>> cands(n);
  for (int k = 0; k < n; ++k) {
    std::map<Weight, int, WeightLess> seen;
    std::queue<Weight> bfs;
    Weight zero = Weight::Zero(wt.rank());
    bfs.push(zero);
    seen[zero] = 1;
    while (!bfs.empty()) {
      Weight w = bfs.front();
      bfs.pop();
      double e = 0.5 * wt.casimir_pairing(w) / lambdas[k];
      if (e > energy_cutoff + 1e-12) continue;
      if (cands[k].size() >= kMaxCandidates)
        throw ValidationError("enumerate_levels: cutoff too large for the brute-force path");
      cands[k].push_back(w);
      for (int i = 0; i < wt.rank(); ++i) {
        Weight up = w;
        up[i] += 1;
        if (!seen.count(up)) {
          seen[up] = 1;
          bfs.push(up);
        }
      }
    }
  }

  std::vector<SpectralLevel> out;
  std::vector<Weight> tuple(n);
  std::function<void(int, double)> scan = [&](int k, double energy_so_far) {
    if (energy_so_far > energy_cutoff + 1e-12) return;
    if (k == n) {
      long mult = 1;
      for (int i = 0; i < n && mult > 0; ++i) {
        Weight left = (i + 1 < n) ? wt.contragredient(tuple[i + 1])
                                  : wt.compose_with_symmetry(wt.contragredient(tuple[0]),
                                                             gamma_node_perm);
        mult *= wt.tensor_multiplicity(left, tuple[i], wt.contragredient(nu[i]));
      }
      if (mult > 0) out.push_back({tuple, energy_so_far, mult});
      return;
    }
    for (const Weight& w : cands[k]) {
      tuple[k] = w;
      scan(k + 1, energy_so_far + 0.5 * wt.casimir_pairing(w) / lambdas[k]);
    }
  };
  scan(0, 0.0);
  std::sort(out.begin(), out.end(), [](const SpectralLevel& a, const SpectralLevel& b) {
    return a.energy < b.energy;
  });
  return out;
}

std::vector<Eigen::MatrixXcd> su2_rep_matrices(int label) {
  if (label < 0) throw ValidationError("su2_rep_matrices: label must be >= 0");
  const std::complex<double> im(0.0, 1.0);
  int dim = label + 1;
  double j = label / 2.0;
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    double mu = j - i;
    jz(i, i) = mu;
    if (i > 0) jp(i - 1, i) = std::sqrt(j * (j + 1) - mu * (mu + 1));
  }
  Eigen::MatrixXcd jm = jp.adjoint();
  // T = i t_alpha / sqrt(2) = i sqrt(2) Jz, Y = i(J+ + J-)/sqrt(2),
  // Z = (J+ - J-)/sqrt(2)
  return {im * std::sqrt(2.0) * jz, im * (jp + jm) / std::sqrt(2.0),
          (jp - jm) / std::sqrt(2.0)};
}

Eigen::MatrixXcd spin_potential_matrix(const ProductSpace& space,
                                       const AlgebraVector& q,
                                       const std::vector<int>& nu_labels) {
  const SimpleLieAlgebra& alg = space.algebra();
  if (alg.family != Family::A || alg.rank != 1)
    throw ValidationError("spin_potential_matrix: su(2) path only");
  if (!space.automorphism().is_identity())
    throw ValidationError("spin_potential_matrix: identity automorphism only");
  if (static_cast<int>(nu_labels.size()) != space.n())
    throw ValidationError("spin_potential_matrix: one orbit label per factor");
  if (!alcove_contains(alg, space.automorphism(), q))
    throw ValidationError("spin_potential_matrix: q outside the open alcove");

  long total = 1;
  for (int m : nu_labels) total *= (m + 1);
  if (total > 100)
    throw ValidationError("spin_potential_matrix: representation too large");
  int dim_v = static_cast<int>(total);

  // product representation of a product-algebra vector
  std::vector<std::vector<Eigen::MatrixXcd>> reps;
  for (int m : nu_labels) reps.push_back(su2_rep_matrices(m));
  auto rho = [&](const ProductVector& x) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim_v, dim_v);
    for (int k = 0; k < space.n(); ++k) {
      Eigen::MatrixXcd factor =
          x[k * alg.dim + 0] * reps[k][0] + x[k * alg.dim + 1] * reps[k][1] +
          x[k * alg.dim + 2] * reps[k][2];
      // kron: identity on the other factors
      Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(1, 1);
      for (int l = 0; l < space.n(); ++l) {
        int dl = nu_labels[l] + 1;
        Eigen::MatrixXcd blk =
            (l == k) ? factor : Eigen::MatrixXcd::Identity(dl, dl);
        Eigen::MatrixXcd next(term.rows() * dl, term.cols() * dl);
        for (int r = 0; r < term.rows(); ++r)
          for (int c = 0; c < term.cols(); ++c)
            next.block(r * dl, c * dl, dl, dl) = term(r, c) * blk;
        term = next;
      }
      acc += term;
    }
    return acc;
  };

  // inverse spin metric on the lambda-orthonormal basis of K^perp
  const Eigen::MatrixXd& kp = space.K_perp_basis();
  int nk = static_cast<int>(kp.cols());
  Eigen::MatrixXd metric(nk, nk);
  for (int b = 0; b < nk; ++b) {
    ProductVector mb = space.lambda_transpose(space.deformation_matrix_full(q)) *
                       (space.deformation_matrix_full(q) * kp.col(b));
    for (int a = 0; a < nk; ++a) metric(a, b) = space.inner(kp.col(a), mb);
  }
  Eigen::MatrixXd inv = metric.ldlt().solve(Eigen::MatrixXd::Identity(nk, nk));

  std::vector<Eigen::MatrixXcd> rhos(nk);
  for (int a = 0; a < nk; ++a) rhos[a] = rho(kp.col(a));
  Eigen::MatrixXcd pot = Eigen::MatrixXcd::Zero(dim_v, dim_v);
  for (int a = 0; a < nk; ++a)
    for (int b = 0; b < nk; ++b)
      if (inv(a, b) != 0.0) pot -= 0.5 * inv(a, b) * (rhos[a] * rhos[b]);

  // restrict to the K-invariant (total weight zero) subspace
  std::vector<int> keep;
  for (int idx = 0; idx < dim_v; ++idx) {
    int rem = idx, wsum = 0;
    for (int k = space.n() - 1; k >= 0; --k) {
      int dl = nu_labels[k] + 1;
      int i = rem % dl;
      rem /= dl;
      wsum += nu_labels[k] - 2 * i;
    }
    if (wsum == 0) keep.push_back(idx);
  }
  Eigen::MatrixXcd out(keep.size(), keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t c = 0; c < keep.size(); ++c)
      out(r, c) = pot(keep[r], keep[c]);
  return out;
}

}  // namespace twistred
