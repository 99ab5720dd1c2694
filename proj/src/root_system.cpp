#include "twistred/root_system.hpp"

#include <algorithm>
#include <map>

namespace twistred {

Family family_from_string(const std::string& s) {
  if (s == "A") return Family::A;
  if (s == "B") return Family::B;
  if (s == "C") return Family::C;
  if (s == "D") return Family::D;
  if (s == "G" || s == "G2") return Family::G2;
  throw ValidationError("unknown family '" + s + "' (expected A, B, C, D or G2)");
}

std::string family_name(Family f, int rank) {
  if (f == Family::G2) return "G2";
  return std::string(1, static_cast<char>(f)) + std::to_string(rank);
}

Eigen::MatrixXi cartan_matrix(Family f, int rank) {
  auto chain = [](int r) {
    Eigen::MatrixXi c = 2 * Eigen::MatrixXi::Identity(r, r);
    for (int i = 0; i + 1 < r; ++i) c(i, i + 1) = c(i + 1, i) = -1;
    return c;
  };
  switch (f) {
    case Family::A:
      if (rank < 1) throw ValidationError("A requires rank >= 1");
      return chain(rank);
    case Family::B: {
      if (rank < 2) throw ValidationError("B requires rank >= 2");
      Eigen::MatrixXi c = chain(rank);
      c(rank - 2, rank - 1) = -2;  // alpha_{r-1} short
      return c;
    }
    case Family::C: {
      if (rank < 2) throw ValidationError("C requires rank >= 2");
      Eigen::MatrixXi c = chain(rank);
      c(rank - 1, rank - 2) = -2;  // alpha_{r-1} long
      return c;
    }
    case Family::D: {
      if (rank < 3) throw ValidationError("D requires rank >= 3");
      Eigen::MatrixXi c = 2 * Eigen::MatrixXi::Identity(rank, rank);
      for (int i = 0; i + 1 < rank - 1; ++i) c(i, i + 1) = c(i + 1, i) = -1;
      c(rank - 3, rank - 1) = c(rank - 1, rank - 3) = -1;
      return c;
    }
    case Family::G2: {
      if (rank != 2) throw ValidationError("G2 has rank 2");
      Eigen::MatrixXi c(2, 2);
      c << 2, -3, -1, 2;  // alpha_0 long, alpha_1 short
      return c;
    }
  }
  throw ValidationError("unknown family");
}

namespace {

struct VecLess {
  bool operator()(const Eigen::VectorXi& a, const Eigen::VectorXi& b) const {
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  }
};

}  // namespace

RootSystem build_root_system(Family f, int rank) {
  RootSystem rs;
  rs.family = f;
  rs.rank = rank;
  rs.cartan = cartan_matrix(f, rank);

  // Symmetrizers d_i = (alpha_i, alpha_i)/2, propagated along the diagram
  // and scaled so the long roots end up with squared length 2.
  Eigen::VectorXd d = Eigen::VectorXd::Zero(rank);
  d[0] = 1.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < rank; ++i) {
      for (int j = 0; j < rank; ++j) {
        if (i == j || rs.cartan(i, j) == 0) continue;
        if (d[i] != 0.0 && d[j] == 0.0) {
          // d_i * cartan(j,i) = d_j * cartan(i,j)
          d[j] = d[i] * rs.cartan(j, i) / rs.cartan(i, j);
          changed = true;
        }
      }
    }
  }
  d /= d.maxCoeff();
  rs.simple_gram.resize(rank, rank);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) rs.simple_gram(i, j) = rs.cartan(i, j) * d[j];

  // Enumerate positive roots by height using root strings.
  std::map<Eigen::VectorXi, int, VecLess> seen;
  std::vector<Eigen::VectorXi> roots;
  for (int i = 0; i < rank; ++i) {
    Eigen::VectorXi a = Eigen::VectorXi::Zero(rank);
    a[i] = 1;
    seen[a] = static_cast<int>(roots.size());
    roots.push_back(a);
  }
  std::size_t head = 0;
  while (head < roots.size()) {
    Eigen::VectorXi beta = roots[head++];
    for (int i = 0; i < rank; ++i) {
      Eigen::VectorXi ai = Eigen::VectorXi::Zero(rank);
      ai[i] = 1;
      int p = 0;
      Eigen::VectorXi down = beta - ai;
      while ((down.array() >= 0).all() && seen.count(down)) {
        ++p;
        down -= ai;
      }
      int pair = 0;
      for (int j = 0; j < rank; ++j) pair += beta[j] * rs.cartan(j, i);
      if (p - pair > 0) {
        Eigen::VectorXi up = beta + ai;
        if (!seen.count(up)) {
          seen[up] = static_cast<int>(roots.size());
          roots.push_back(up);
        }
      }
    }
  }
  std::stable_sort(roots.begin(), roots.end(),
                   [](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
                     int ha = a.sum(), hb = b.sum();
                     if (ha != hb) return ha < hb;
                     return VecLess{}(a, b);
                   });
  rs.positive = std::move(roots);
  return rs;
}

int RootSystem::pairing(const Eigen::VectorXi& beta, int j) const {
  int s = 0;
  for (int k = 0; k < rank; ++k) s += beta[k] * cartan(k, j);
  return s;
}

double RootSystem::inner(const Eigen::VectorXi& beta,
                         const Eigen::VectorXi& gamma) const {
  return beta.cast<double>().transpose() * simple_gram * gamma.cast<double>();
}

Eigen::VectorXi RootSystem::weight_coords(const Eigen::VectorXi& beta) const {
  Eigen::VectorXi w(rank);
  for (int j = 0; j < rank; ++j) w[j] = pairing(beta, j);
  return w;
}

int RootSystem::index_of(const Eigen::VectorXi& beta) const {
  for (int i = 0; i < num_positive(); ++i)
    if (positive[i] == beta) return i;
  return -1;
}

bool RootSystem::is_root(const Eigen::VectorXi& beta) const {
  if ((beta.array() >= 0).all()) return index_of(beta) >= 0;
  if ((beta.array() <= 0).all()) return index_of(-beta) >= 0;
  return false;
}

int RootSystem::highest_root_index() const {
  int best = 0;
  for (int i = 1; i < num_positive(); ++i)
    if (positive[i].sum() > positive[best].sum()) best = i;
  return best;
}

Eigen::MatrixXd RootSystem::fundamental_gram() const {
  // omega_i = sum_j m(i,j) alpha_j with m = cartan^{-1} in our index order.
  Eigen::MatrixXd c = cartan.cast<double>();
  Eigen::MatrixXd m = c.inverse();
  return m * simple_gram * m.transpose();
}

double RootSystem::casimir_pairing(const Eigen::VectorXd& mu) const {
  Eigen::VectorXd delta = Eigen::VectorXd::Ones(rank);
  Eigen::MatrixXd fg = fundamental_gram();
  return (mu + 2.0 * delta).transpose() * fg * mu;
}

}  // namespace twistred
