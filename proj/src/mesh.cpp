#include "dampwave/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dampwave/error.hpp"

namespace dampwave {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidExtent: return "invalid-extent";
    case ErrorKind::UnsupportedBcDimension: return "unsupported-bc-dimension";
    case ErrorKind::MeshMismatch: return "mesh-mismatch";
    case ErrorKind::NegativeTime: return "negative-time";
    case ErrorKind::EmptyEpsilons: return "empty-epsilons";
    case ErrorKind::UnknownName: return "unknown-name";
    case ErrorKind::NewtonNoConvergence: return "newton-no-convergence";
    case ErrorKind::NewtonStall: return "newton-stall";
    case ErrorKind::SingularJacobian: return "singular-jacobian";
    case ErrorKind::DegenerateSamples: return "degenerate-samples";
    case ErrorKind::NonSpd: return "non-spd";
    case ErrorKind::NotCoercive: return "not-coercive";
    case ErrorKind::NegativeSample: return "negative-sample";
    case ErrorKind::NonPositiveSample: return "nonpositive-sample";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

BoundaryKind parse_boundary_kind(const std::string& name) {
  if (name == "dirichlet") return BoundaryKind::Dirichlet;
  if (name == "neumann") return BoundaryKind::Neumann;
  if (name == "dynamical" || name == "robin") return BoundaryKind::Dynamical;
  throw Error(ErrorKind::UnknownName, "unknown boundary kind '" + name + "'");
}

const char* to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::Dynamical: return "dynamical";
  }
  return "?";
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < n; ++k) {
    h ^= p[k];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
std::uint64_t mix(std::uint64_t h, const T& value) {
  return fnv1a(&value, sizeof(T), h);
}

}  // namespace

bool Mesh::has_dynamical() const {
  for (int f = 0; f < 2 * dimension_; ++f)
    if (faces_[f] == BoundaryKind::Dynamical) return true;
  return false;
}

bool Mesh::all_neumann() const {
  for (int f = 0; f < 2 * dimension_; ++f)
    if (faces_[f] != BoundaryKind::Neumann) return false;
  return true;
}

bool Mesh::pinned(int i, int j) const {
  if (i == 0 && face(Face::Left) == BoundaryKind::Dirichlet) return true;
  if (i == nx_ - 1 && face(Face::Right) == BoundaryKind::Dirichlet) return true;
  if (dimension_ == 2) {
    if (j == 0 && face(Face::Bottom) == BoundaryKind::Dirichlet) return true;
    if (j == ny_ - 1 && face(Face::Top) == BoundaryKind::Dirichlet) return true;
  }
  return false;
}

bool Mesh::on_boundary(int i, int j) const {
  if (i == 0 || i == nx_ - 1) return true;
  return dimension_ == 2 && (j == 0 || j == ny_ - 1);
}

double Mesh::weight(int i, int j) const { return weights_[index(i, j)]; }

double Mesh::stability_limit() const {
  double lam = 4.0 / (dx_ * dx_);
  if (dimension_ == 2) lam += 4.0 / (dy_ * dy_);
  if (has_dynamical()) lam += 2.0 / dx_;
  return 2.0 / std::sqrt(lam);
}

Mesh build_mesh(int dimension, std::array<double, 2> extents, std::array<int, 2> node_counts,
                BoundarySpec bc) {
  if (dimension != 1 && dimension != 2)
    throw Error(ErrorKind::InvalidArgument, "mesh dimension must be 1 or 2");
  if (!(extents[0] > 0.0) || !std::isfinite(extents[0]) ||
      (dimension == 2 && (!(extents[1] > 0.0) || !std::isfinite(extents[1]))))
    throw Error(ErrorKind::InvalidExtent, "mesh extents must be positive and finite");
  if (node_counts[0] < 3 || (dimension == 2 && node_counts[1] < 3))
    throw Error(ErrorKind::InvalidExtent, "mesh needs at least 3 nodes per direction");
  if (dimension == 2 && bc.kind == BoundaryKind::Dynamical)
    throw Error(ErrorKind::UnsupportedBcDimension, "dynamical boundary condition is 1D only");

  Mesh m;
  m.dimension_ = dimension;
  m.lx_ = extents[0];
  m.nx_ = node_counts[0];
  m.dx_ = m.lx_ / (m.nx_ - 1);
  if (dimension == 2) {
    m.ly_ = extents[1];
    m.ny_ = node_counts[1];
    m.dy_ = m.ly_ / (m.ny_ - 1);
  }
  m.faces_.fill(bc.kind);

  m.weights_.assign(m.size(), 0.0);
  for (int i = 0; i < m.nx_; ++i) {
    double wx = (i == 0 || i == m.nx_ - 1) ? 0.5 * m.dx_ : m.dx_;
    for (int j = 0; j < m.ny_; ++j) {
      double wy = 1.0;
      if (dimension == 2) wy = (j == 0 || j == m.ny_ - 1) ? 0.5 * m.dy_ : m.dy_;
      m.weights_[m.index(i, j)] = wx * wy;
    }
  }

  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = mix(h, m.dimension_);
  h = mix(h, m.lx_);
  h = mix(h, m.ly_);
  h = mix(h, m.nx_);
  h = mix(h, m.ny_);
  for (auto f : m.faces_) h = mix(h, static_cast<int>(f));
  m.tag_ = h;
  return m;
}

Field zeros(const Mesh& mesh) { return Field{std::vector<double>(mesh.size(), 0.0), mesh.tag()}; }

void require_on(const Field& u, const Mesh& mesh) {
  if (u.mesh_tag != mesh.tag() || u.values.size() != mesh.size())
    throw Error(ErrorKind::MeshMismatch, "field does not live on this mesh");
}

void laplacian_into(std::span<const double> u, std::span<const double> velocity, const Mesh& mesh,
                    std::span<double> out) {
  const int nx = mesh.nx(), ny = mesh.ny();
  const double idx2 = 1.0 / (mesh.dx() * mesh.dx());
  const double idy2 = mesh.dimension() == 2 ? 1.0 / (mesh.dy() * mesh.dy()) : 0.0;
  const bool has_v = !velocity.empty();

  auto val = [&](int i, int j) { return mesh.pinned(i, j) ? 0.0 : u[mesh.index(i, j)]; };
  auto vel = [&](int i, int j) { return has_v ? velocity[mesh.index(i, j)] : 0.0; };

  // Ghost value across a face from the boundary relation; `inner` is the
  // mirror node, `spacing` the mesh step normal to the face.
  auto ghost = [&](BoundaryKind kind, double inner, double self, double v, double spacing) {
    if (kind == BoundaryKind::Dynamical) return inner - 2.0 * spacing * (self + v);
    return inner;  // Neumann
  };

  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const std::size_t k = mesh.index(i, j);
      if (mesh.pinned(i, j)) {
        out[k] = 0.0;
        continue;
      }
      const double c = u[k];
      double left, right;
      if (i == 0) {
        right = val(1, j);
        left = ghost(mesh.face(Face::Left), right, c, vel(i, j), mesh.dx());
      } else if (i == nx - 1) {
        left = val(nx - 2, j);
        right = ghost(mesh.face(Face::Right), left, c, vel(i, j), mesh.dx());
      } else {
        left = val(i - 1, j);
        right = val(i + 1, j);
      }
      double lap = (left - 2.0 * c + right) * idx2;
      if (mesh.dimension() == 2) {
        double down, up;
        if (j == 0) {
          up = val(i, 1);
          down = ghost(mesh.face(Face::Bottom), up, c, vel(i, j), mesh.dy());
        } else if (j == ny - 1) {
          down = val(i, ny - 2);
          up = ghost(mesh.face(Face::Top), down, c, vel(i, j), mesh.dy());
        } else {
          down = val(i, j - 1);
          up = val(i, j + 1);
        }
        lap += (down - 2.0 * c + up) * idy2;
      }
      out[k] = lap;
    }
  }
}

Field laplacian(const Field& u, const Mesh& mesh, const Field* velocity) {
  require_on(u, mesh);
  std::span<const double> v;
  if (velocity != nullptr) {
    require_on(*velocity, mesh);
    v = velocity->values;
  }
  Field out = zeros(mesh);
  laplacian_into(u.values, v, mesh, out.values);
  return out;
}

double integrate(std::span<const double> u, const Mesh& mesh) {
  const auto& w = mesh.weights();
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * u[k];
  return s;
}

double integrate(const Field& u, const Mesh& mesh) {
  require_on(u, mesh);
  return integrate(std::span<const double>(u.values), mesh);
}

double inner(std::span<const double> a, std::span<const double> b, const Mesh& mesh) {
  double s = 0.0;
  for (int i = 0; i < mesh.nx(); ++i)
    for (int j = 0; j < mesh.ny(); ++j) {
      if (mesh.pinned(i, j)) continue;
      const std::size_t k = mesh.index(i, j);
      s += mesh.weights()[k] * a[k] * b[k];
    }
  return s;
}

double boundary_integral(std::span<const double> u, const Mesh& mesh) {
  if (mesh.dimension() != 1)
    throw Error(ErrorKind::UnsupportedBcDimension, "boundary_integral is defined for 1D meshes");
  const double a = u[0], b = u[mesh.nx() - 1];
  return a * a + b * b;
}

double boundary_integral(const Field& u, const Mesh& mesh) {
  require_on(u, mesh);
  return boundary_integral(std::span<const double>(u.values), mesh);
}

double gradient_sq(std::span<const double> u, const Mesh& mesh) {
  const int nx = mesh.nx(), ny = mesh.ny();
  auto val = [&](int i, int j) { return mesh.pinned(i, j) ? 0.0 : u[mesh.index(i, j)]; };
  double s = 0.0;
  // x-edges, weighted by the y-trapezoid weight of their row.
  for (int j = 0; j < ny; ++j) {
    double wy = 1.0;
    if (mesh.dimension() == 2) wy = (j == 0 || j == ny - 1) ? 0.5 * mesh.dy() : mesh.dy();
    double row = 0.0;
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = val(i + 1, j) - val(i, j);
      row += d * d;
    }
    s += row * wy / mesh.dx();
  }
  if (mesh.dimension() == 2) {
    for (int i = 0; i < nx; ++i) {
      const double wx = (i == 0 || i == nx - 1) ? 0.5 * mesh.dx() : mesh.dx();
      double col = 0.0;
      for (int j = 0; j + 1 < ny; ++j) {
        const double d = val(i, j + 1) - val(i, j);
        col += d * d;
      }
      s += col * wx / mesh.dy();
    }
  }
  return s;
}

double l2_norm(std::span<const double> u, const Mesh& mesh) { return std::sqrt(inner(u, u, mesh)); }

double h1_norm(std::span<const double> u, const Mesh& mesh) {
  return std::sqrt(gradient_sq(u, mesh) + inner(u, u, mesh));
}

double dirichlet_eigenvalue(const Mesh& mesh, int k) {
  const double s = std::sin(k * std::numbers::pi * mesh.dx() / (2.0 * mesh.lx()));
  return 4.0 * s * s / (mesh.dx() * mesh.dx());
}

void write_field_csv(std::ostream& os, const Field& u, const Mesh& mesh) {
  require_on(u, mesh);
  char buf[128];
  os << (mesh.dimension() == 2 ? "x,y,value\n" : "x,value\n");
  for (int i = 0; i < mesh.nx(); ++i)
    for (int j = 0; j < mesh.ny(); ++j) {
      const double v = u[mesh.index(i, j)];
      if (mesh.dimension() == 2)
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", mesh.x(i), mesh.y(j), v);
      else
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", mesh.x(i), v);
      os << buf;
    }
}

Field read_field_csv(std::istream& is, const Mesh& mesh) {
  Field out = zeros(mesh);
  std::string line;
  std::getline(is, line);  // header
  std::size_t k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (k >= mesh.size()) throw Error(ErrorKind::Io, "field CSV has more rows than mesh nodes");
    const auto pos = line.find_last_of(',');
    if (pos == std::string::npos) throw Error(ErrorKind::Io, "malformed field CSV row: " + line);
    out[k++] = std::stod(line.substr(pos + 1));
  }
  if (k != mesh.size()) throw Error(ErrorKind::Io, "field CSV row count does not match mesh");
  return out;
}

}  // namespace dampwave
