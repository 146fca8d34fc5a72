#include "dampwave/equilibria.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dampwave/error.hpp"

namespace dampwave {

namespace {

constexpr double kGapCutoff = 1e-14;

// Free (unpinned) node numbering.
struct FreeNodes {
  std::vector<int> to_free;  // -1 for pinned nodes
  std::vector<std::size_t> to_node;
};

FreeNodes free_nodes(const Mesh& mesh) {
  FreeNodes fn;
  fn.to_free.assign(mesh.size(), -1);
  for (int i = 0; i < mesh.nx(); ++i)
    for (int j = 0; j < mesh.ny(); ++j) {
      if (mesh.pinned(i, j)) continue;
      fn.to_free[mesh.index(i, j)] = static_cast<int>(fn.to_node.size());
      fn.to_node.push_back(mesh.index(i, j));
    }
  return fn;
}

// Static Laplacian restricted to free nodes, recovered from laplacian_into by
// probing with colour classes that separate every stencil neighbourhood.
Eigen::SparseMatrix<double> laplacian_matrix(const Mesh& mesh, const FreeNodes& fn) {
  const int colours = mesh.dimension() == 2 ? 5 : 3;
  auto colour = [&](int i, int j) { return mesh.dimension() == 2 ? (i + 3 * j) % 5 : i % 3; };
  std::vector<std::vector<double>> probes(colours, std::vector<double>(mesh.size(), 0.0));
  for (int c = 0; c < colours; ++c) {
    std::vector<double> p(mesh.size(), 0.0);
    for (int i = 0; i < mesh.nx(); ++i)
      for (int j = 0; j < mesh.ny(); ++j)
        if (colour(i, j) == c) p[mesh.index(i, j)] = 1.0;
    laplacian_into(p, {}, mesh, probes[c]);
  }
  std::vector<Eigen::Triplet<double>> trips;
  const int di[] = {0, -1, 1, 0, 0};
  const int dj[] = {0, 0, 0, -1, 1};
  for (int i = 0; i < mesh.nx(); ++i)
    for (int j = 0; j < mesh.ny(); ++j) {
      const int row = fn.to_free[mesh.index(i, j)];
      if (row < 0) continue;
      for (int s = 0; s < (mesh.dimension() == 2 ? 5 : 3); ++s) {
        const int ii = i + di[s], jj = j + dj[s];
        if (ii < 0 || ii >= mesh.nx() || jj < 0 || jj >= mesh.ny()) continue;
        const int col = fn.to_free[mesh.index(ii, jj)];
        if (col < 0) continue;
        const double val = probes[colour(ii, jj)][mesh.index(i, j)];
        if (val != 0.0) trips.emplace_back(row, col, val);
      }
    }
  const auto n = static_cast<Eigen::Index>(fn.to_node.size());
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(trips.begin(), trips.end());
  return L;
}

double weighted_norm(const Eigen::VectorXd& r, const Mesh& mesh, const FreeNodes& fn) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < r.size(); ++k) s += mesh.weights()[fn.to_node[k]] * r[k] * r[k];
  return std::sqrt(s);
}

double boundary_energy(std::span<const double> u, const Mesh& mesh) {
  if (mesh.dimension() != 1) return 0.0;
  double b = 0.0;
  if (mesh.face(Face::Left) == BoundaryKind::Dynamical) b += 0.5 * u[0] * u[0];
  if (mesh.face(Face::Right) == BoundaryKind::Dynamical) b += 0.5 * u[mesh.nx() - 1] * u[mesh.nx() - 1];
  return b;
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Random smooth combination of the modes, scaled to |w|_H1 = r.
std::vector<double> perturbation(const std::vector<Mode>& modes, const Mesh& mesh, double r,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> w(mesh.size(), 0.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double c = normal(rng) / static_cast<double>(k + 1);
    for (std::size_t q = 0; q < w.size(); ++q) w[q] += c * modes[k].shape[q];
  }
  const double n = h1_norm(w, mesh);
  for (double& x : w) x *= r / n;
  return w;
}

std::vector<Mode> modes_1d(const Mesh& mesh, int count) {
  const FreeNodes fn = free_nodes(mesh);
  const Eigen::MatrixXd L = Eigen::MatrixXd(laplacian_matrix(mesh, fn));
  const auto n = static_cast<Eigen::Index>(fn.to_node.size());
  Eigen::VectorXd sw(n);
  for (Eigen::Index k = 0; k < n; ++k) sw[k] = std::sqrt(mesh.weights()[fn.to_node[k]]);
  // W^{1/2} (-L) W^{-1/2} is symmetric.
  Eigen::MatrixXd S = -(sw.asDiagonal() * L * sw.cwiseInverse().asDiagonal());
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  std::vector<Mode> out;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(count, n); ++k) {
    Mode m;
    m.eigenvalue = es.eigenvalues()[k];
    m.shape = zeros(mesh);
    Eigen::VectorXd vec = es.eigenvectors().col(k).cwiseQuotient(sw);
    // Fix the sign so modes are reproducible across eigen solver versions.
    Eigen::Index arg = 0;
    vec.cwiseAbs().maxCoeff(&arg);
    if (vec[arg] < 0) vec = -vec;
    for (Eigen::Index q = 0; q < n; ++q) m.shape[fn.to_node[q]] = vec[q];
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

double reduced_energy(std::span<const double> u, const Mesh& mesh, const Nonlinearity& nl) {
  double forcing = 0.0;
  for (int i = 0; i < mesh.nx(); ++i)
    for (int j = 0; j < mesh.ny(); ++j) {
      if (mesh.pinned(i, j)) continue;
      const std::size_t q = mesh.index(i, j);
      forcing -= mesh.weights()[q] * nl.F(u[q]);
    }
  return 0.5 * gradient_sq(u, mesh) + boundary_energy(u, mesh) + forcing;
}

double equation_residual(std::span<const double> u, const Mesh& mesh, const Nonlinearity& nl) {
  std::vector<double> r(mesh.size());
  laplacian_into(u, {}, mesh, r);
  double s = 0.0;
  for (int i = 0; i < mesh.nx(); ++i)
    for (int j = 0; j < mesh.ny(); ++j) {
      if (mesh.pinned(i, j)) continue;
      const std::size_t q = mesh.index(i, j);
      const double rq = r[q] + nl.f(u[q]);
      s += mesh.weights()[q] * rq * rq;
    }
  return std::sqrt(s);
}

double robin_residual(std::span<const double> u, const Mesh& mesh) {
  if (mesh.dimension() != 1 || !mesh.has_dynamical()) return 0.0;
  const int n = mesh.nx();
  const double dx = mesh.dx();
  double s = 0.0;
  if (mesh.face(Face::Left) == BoundaryKind::Dynamical) {
    const double dnu = -(-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx);
    s += (dnu + u[0]) * (dnu + u[0]);
  }
  if (mesh.face(Face::Right) == BoundaryKind::Dynamical) {
    const double dnu = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx);
    s += (dnu + u[n - 1]) * (dnu + u[n - 1]);
  }
  return std::sqrt(s);
}

Equilibrium solve_equilibrium(const Mesh& mesh, const Nonlinearity& nl, const Field& guess, double tol,
                              int max_iter) {
  require_on(guess, mesh);
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "equilibrium tolerance must be positive");
  const FreeNodes fn = free_nodes(mesh);
  const auto n = static_cast<Eigen::Index>(fn.to_node.size());
  const Eigen::SparseMatrix<double> L = laplacian_matrix(mesh, fn);

  Eigen::VectorXd phi(n);
  for (Eigen::Index k = 0; k < n; ++k) phi[k] = guess[fn.to_node[k]];

  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r = -(L * x);
    for (Eigen::Index k = 0; k < n; ++k) r[k] -= nl.f(x[k]);
    return r;
  };

  Equilibrium eq;
  Eigen::VectorXd r = residual(phi);
  double norm = weighted_norm(r, mesh, fn);
  int it = 0;
  for (; it < max_iter; ++it) {
    if (!std::isfinite(norm)) break;
    if (norm <= tol && (it > 0 || norm == 0.0)) {
      eq.converged = true;
      break;
    }
    Eigen::VectorXd dfp(n);
    bool flat = true;
    for (Eigen::Index k = 0; k < n; ++k) {
      dfp[k] = nl.df(phi[k]);
      if (dfp[k] != 0.0) flat = false;
    }
    Eigen::VectorXd delta;
    if (mesh.all_neumann() && flat) {
      // Constants span the kernel of -Lap; fix the weighted mean of the update.
      std::vector<Eigen::Triplet<double>> trips;
      for (int o = 0; o < L.outerSize(); ++o)
        for (Eigen::SparseMatrix<double>::InnerIterator itr(L, o); itr; ++itr)
          trips.emplace_back(itr.row(), itr.col(), -itr.value());
      for (Eigen::Index k = 0; k < n; ++k) {
        trips.emplace_back(k, n, 1.0);
        trips.emplace_back(n, k, mesh.weights()[fn.to_node[k]]);
      }
      Eigen::SparseMatrix<double> J(n + 1, n + 1);
      J.setFromTriplets(trips.begin(), trips.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(J);
      if (lu.info() != Eigen::Success)
        throw Error(ErrorKind::SingularJacobian, "bordered Neumann Jacobian is singular");
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
      rhs.head(n) = -r;
      delta = lu.solve(rhs).head(n);
    } else {
      Eigen::SparseMatrix<double> J = -L;
      for (Eigen::Index k = 0; k < n; ++k) J.coeffRef(k, k) -= dfp[k];
      J.makeCompressed();
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(J);
      if (lu.info() != Eigen::Success)
        throw Error(ErrorKind::SingularJacobian, "equilibrium Jacobian is singular");
      delta = lu.solve(-r);
    }
    if (!delta.allFinite()) throw Error(ErrorKind::SingularJacobian, "Newton update is not finite");

    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      Eigen::VectorXd trial = phi + alpha * delta;
      Eigen::VectorXd rt = residual(trial);
      const double nt = weighted_norm(rt, mesh, fn);
      if (nt < norm) {
        phi = std::move(trial);
        r = std::move(rt);
        norm = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      eq.converged = norm <= tol;
      ++it;
      break;
    }
  }
  if (it == max_iter && norm <= tol) eq.converged = true;

  eq.phi = zeros(mesh);
  for (Eigen::Index k = 0; k < n; ++k) eq.phi[fn.to_node[k]] = phi[k];
  eq.residual = norm;
  eq.boundary_residual = robin_residual(eq.phi.values, mesh);
  eq.iterations = it;
  return eq;
}

Distance distance_to(const State& state, const Equilibrium& eq, const Mesh& mesh) {
  require_on(state.u, mesh);
  require_on(state.v, mesh);
  require_on(eq.phi, mesh);
  std::vector<double> d(mesh.size());
  for (std::size_t q = 0; q < d.size(); ++q) d[q] = state.u[q] - eq.phi[q];
  return Distance{h1_norm(d, mesh), l2_norm(state.v.values, mesh)};
}

std::vector<Mode> low_modes(const Mesh& mesh, int count) {
  if (mesh.dimension() == 1) return modes_1d(mesh, count);
  const BoundarySpec bc{mesh.face(Face::Left)};
  const Mesh mx = build_mesh(1, {mesh.lx(), 0.0}, {mesh.nx(), 0}, bc);
  const Mesh my = build_mesh(1, {mesh.ly(), 0.0}, {mesh.ny(), 0}, bc);
  const auto ax = modes_1d(mx, count);
  const auto ay = modes_1d(my, count);
  std::vector<std::pair<double, std::pair<int, int>>> pairs;
  for (int a = 0; a < static_cast<int>(ax.size()); ++a)
    for (int b = 0; b < static_cast<int>(ay.size()); ++b)
      pairs.push_back({ax[a].eigenvalue + ay[b].eigenvalue, {a, b}});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& p, const auto& q) { return p.first < q.first; });
  std::vector<Mode> out;
  for (int k = 0; k < std::min<int>(count, static_cast<int>(pairs.size())); ++k) {
    const auto [a, b] = pairs[k].second;
    Mode m;
    m.eigenvalue = pairs[k].first;
    m.shape = zeros(mesh);
    for (int i = 0; i < mesh.nx(); ++i)
      for (int j = 0; j < mesh.ny(); ++j) m.shape[mesh.index(i, j)] = ax[a].shape[i] * ay[b].shape[j];
    out.push_back(std::move(m));
  }
  return out;
}

LojasiewiczEstimate fit_lojasiewicz(std::vector<LsSample> samples, double delta) {
  LojasiewiczEstimate est;
  est.delta = delta;
  std::vector<double> x, y;
  for (const auto& s : samples)
    if (s.energy_gap > kGapCutoff && s.residual > 0.0) {
      x.push_back(std::log(s.energy_gap));
      y.push_back(std::log(s.residual));
    }
  est.samples = std::move(samples);
  if (x.size() < 3)
    throw Error(ErrorKind::DegenerateSamples, "too few usable samples for the exponent regression");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  // Spread below round-off: all energies equal.
  if (sxx <= 1e-12 * n) throw Error(ErrorKind::DegenerateSamples, "energy gaps carry no spread");
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  est.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  double theta = 1.0 - est.slope;
  if (theta > 0.5) {
    est.clamped = true;
    est.note = "slope below 1/2: sampling outside the asymptotic regime, theta reported as 1/2";
    theta = 0.5;
  } else if (theta <= 0.0) {
    est.clamped = true;
    est.note = "slope >= 1: no positive exponent supported by the samples";
    theta = 1e-6;
  }
  est.theta = theta;
  return est;
}

LojasiewiczEstimate probe_lojasiewicz(const Equilibrium& eq, const Nonlinearity& nl, const Mesh& mesh,
                                      const std::vector<double>& radii, int samples_per_radius,
                                      std::uint64_t seed) {
  require_on(eq.phi, mesh);
  if (radii.empty() || samples_per_radius < 1)
    throw Error(ErrorKind::InvalidArgument, "probe needs radii and samples");
  for (std::size_t k = 0; k < radii.size(); ++k)
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] < radii[k - 1])))
      throw Error(ErrorKind::InvalidArgument, "probe radii must be positive and decreasing");

  const auto modes = low_modes(mesh, 10);
  const double e_phi = reduced_energy(eq.phi.values, mesh, nl);
  std::vector<LsSample> samples;
  std::vector<double> u(mesh.size());
  std::uint64_t index = 0;
  for (double r : radii)
    for (int s = 0; s < samples_per_radius; ++s, ++index) {
      const auto w = perturbation(modes, mesh, r, sub_seed(seed, index));
      for (std::size_t q = 0; q < u.size(); ++q) u[q] = eq.phi[q] + w[q];
      LsSample smp;
      smp.radius = r;
      smp.energy_gap = std::abs(reduced_energy(u, mesh, nl) - e_phi);
      smp.residual = equation_residual(u, mesh, nl) + robin_residual(u, mesh);
      samples.push_back(smp);
    }
  return fit_lojasiewicz(std::move(samples), radii.front());
}

LsCheck verify_ls(const Equilibrium& eq, const Nonlinearity& nl, const Mesh& mesh, double theta,
                  double delta, int n_samples, double margin, std::uint64_t seed) {
  if (!(theta > 0.0 && theta <= 0.5)) throw Error(ErrorKind::InvalidArgument, "theta must lie in (0, 1/2]");
  if (!(delta > 0.0) || n_samples < 1) throw Error(ErrorKind::InvalidArgument, "bad verify_ls sampling");
  const auto modes = low_modes(mesh, 10);
  const double e_phi = reduced_energy(eq.phi.values, mesh, nl);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  LsCheck out;
  out.worst_ratio = INFINITY;
  std::vector<double> u(mesh.size());
  for (int s = 0; s < n_samples; ++s) {
    const double r = delta * (1.0 - unif(rng));  // (0, delta]
    const auto w = perturbation(modes, mesh, r, sub_seed(seed, static_cast<std::uint64_t>(s)));
    for (std::size_t q = 0; q < u.size(); ++q) u[q] = eq.phi[q] + w[q];
    const double gap = std::abs(reduced_energy(u, mesh, nl) - e_phi);
    if (gap <= kGapCutoff) continue;
    const double res = equation_residual(u, mesh, nl) + robin_residual(u, mesh);
    const double ratio = res / std::pow(gap, 1.0 - theta);
    ++out.used;
    if (ratio < out.worst_ratio) {
      out.worst_ratio = ratio;
      out.witness_radius = r;
      out.witness_gap = gap;
    }
  }
  out.holds = out.used == 0 || out.worst_ratio >= 1.0 - margin;
  return out;
}

GalerkinEquilibrium solve_galerkin_equilibrium(const GalerkinSystem& sys, const Eigen::VectorXd& guess,
                                               double tol, int max_iter) {
  GalerkinEquilibrium eq;
  Eigen::VectorXd psi = guess;
  Eigen::VectorXd r = sys.residual(psi);
  double norm = r.norm();
  int it = 0;
  for (; it < max_iter; ++it) {
    if (norm <= tol && (it > 0 || norm == 0.0)) {
      eq.converged = true;
      break;
    }
    const Eigen::MatrixXd J = -sys.A() + sys.force().jacobian(psi);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) throw Error(ErrorKind::SingularJacobian, "Galerkin Jacobian is singular");
    const Eigen::VectorXd delta = lu.solve(-r);
    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      Eigen::VectorXd trial = psi + alpha * delta;
      Eigen::VectorXd rt = sys.residual(trial);
      if (rt.norm() < norm) {
        psi = std::move(trial);
        r = std::move(rt);
        norm = r.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      eq.converged = norm <= tol;
      ++it;
      break;
    }
  }
  eq.psi = psi;
  eq.residual = norm;
  eq.iterations = it;
  return eq;
}

LojasiewiczEstimate probe_lojasiewicz(const GalerkinSystem& sys, const GalerkinEquilibrium& eq,
                                      const std::vector<double>& radii, int samples_per_radius,
                                      std::uint64_t seed) {
  if (radii.empty() || samples_per_radius < 1)
    throw Error(ErrorKind::InvalidArgument, "probe needs radii and samples");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.A());
  const int n = sys.dimension();
  const int m = std::min(10, n);
  const double e_psi = sys.reduced_energy(eq.psi);
  std::vector<LsSample> samples;
  std::uint64_t index = 0;
  for (double r : radii)
    for (int s = 0; s < samples_per_radius; ++s, ++index) {
      std::mt19937_64 rng(sub_seed(seed, index));
      std::normal_distribution<double> normal;
      Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < m; ++k) w += normal(rng) / (k + 1.0) * es.eigenvectors().col(k);
      w *= r / std::sqrt(w.dot(sys.A() * w));
      const Eigen::VectorXd u = eq.psi + w;
      samples.push_back(LsSample{r, std::abs(sys.reduced_energy(u) - e_psi), sys.residual(u).norm()});
    }
  return fit_lojasiewicz(std::move(samples), radii.front());
}

}  // namespace dampwave
