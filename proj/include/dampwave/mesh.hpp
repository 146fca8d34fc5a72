#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dampwave {

enum class BoundaryKind { Dirichlet, Neumann, Dynamical };

// Boundary relation on a face. The dynamical kind is d_nu u + u + u_t = 0 with
// unit coefficients, so it carries no parameters.
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::Dirichlet;
};

BoundaryKind parse_boundary_kind(const std::string& name);
const char* to_string(BoundaryKind kind);

enum class Face { Left = 0, Right = 1, Bottom = 2, Top = 3 };

// Uniform tensor mesh on [0,Lx] or [0,Lx]x[0,Ly]. Nodes are ordered x-major:
// index(i, j) = i * ny + j, so all y-nodes of column i are contiguous.
class Mesh {
 public:
  int dimension() const { return dimension_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(j);
  }
  double x(int i) const { return dx_ * i; }
  double y(int j) const { return dimension_ == 2 ? dy_ * j : 0.0; }

  BoundaryKind face(Face f) const { return faces_[static_cast<int>(f)]; }
  bool has_dynamical() const;
  bool all_neumann() const;

  // True when the node is held at zero by a Dirichlet face.
  bool pinned(int i, int j = 0) const;
  bool on_boundary(int i, int j = 0) const;

  // Trapezoidal quadrature weight of a node.
  double weight(int i, int j = 0) const;
  const std::vector<double>& weights() const { return weights_; }

  // Identity tag shared by all meshes with equal geometry and boundary kinds.
  std::uint64_t tag() const { return tag_; }

  // Smallest admissible leapfrog step for the discrete Laplacian.
  double stability_limit() const;

  friend Mesh build_mesh(int, std::array<double, 2>, std::array<int, 2>, BoundarySpec);

 private:
  Mesh() = default;

  int dimension_ = 1;
  double lx_ = 1.0, ly_ = 0.0;
  int nx_ = 3, ny_ = 1;
  double dx_ = 0.5, dy_ = 0.0;
  std::array<BoundaryKind, 4> faces_{};
  std::vector<double> weights_;
  std::uint64_t tag_ = 0;
};

Mesh build_mesh(int dimension, std::array<double, 2> extents, std::array<int, 2> node_counts,
                BoundarySpec bc);

// Nodal values on a mesh.
struct Field {
  std::vector<double> values;
  std::uint64_t mesh_tag = 0;

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

Field zeros(const Mesh& mesh);

template <class Fn>
Field sample(const Mesh& mesh, Fn&& fn) {
  Field f = zeros(mesh);
  for (int i = 0; i < mesh.nx(); ++i)
    for (int j = 0; j < mesh.ny(); ++j) f[mesh.index(i, j)] = fn(mesh.x(i), mesh.y(j));
  return f;
}

void require_on(const Field& u, const Mesh& mesh);

// Second-order central Laplacian with ghost-node closure on Neumann and
// dynamical faces. On a dynamical face the ghost uses d_nu u = -u - v; when no
// velocity is given v is taken as zero (the static Robin relation).
Field laplacian(const Field& u, const Mesh& mesh, const Field* velocity = nullptr);

// Allocation-free kernel behind laplacian(); velocity may be empty.
void laplacian_into(std::span<const double> u, std::span<const double> velocity, const Mesh& mesh,
                    std::span<double> out);

double integrate(const Field& u, const Mesh& mesh);
double integrate(std::span<const double> u, const Mesh& mesh);

// Trapezoidal inner product; Dirichlet boundary nodes carry zero values.
double inner(std::span<const double> a, std::span<const double> b, const Mesh& mesh);

// Sum of squared endpoint values (1D only).
double boundary_integral(const Field& u, const Mesh& mesh);
double boundary_integral(std::span<const double> u, const Mesh& mesh);

// Discrete int |grad u|^2, the edge form consistent with the Laplacian:
// gradient_sq(u) = -<laplacian(u), u> on Dirichlet and Neumann meshes.
double gradient_sq(std::span<const double> u, const Mesh& mesh);

double l2_norm(std::span<const double> u, const Mesh& mesh);
// (|grad u|^2 + |u|^2)^(1/2)
double h1_norm(std::span<const double> u, const Mesh& mesh);

// Discrete Dirichlet eigenvalue of mode k on [0, L]: 4/dx^2 sin^2(k pi dx / 2L).
double dirichlet_eigenvalue(const Mesh& mesh, int k);

void write_field_csv(std::ostream& os, const Field& u, const Mesh& mesh);
Field read_field_csv(std::istream& is, const Mesh& mesh);

}  // namespace dampwave
