#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "monomap/vec2.hpp"

namespace monomap {

// Planar triangulation of a (possibly multiply connected) polygonal domain.
// Immutable after construction; connectivity is derived once in build().
class TriangleMesh {
public:
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  // counterclockwise

    // Derived connectivity.
    std::vector<std::vector<int>> boundary_loops;     // oriented vertex cycles, interior on the left
    std::vector<std::vector<int>> vertex_neighbors;   // sorted neighbor vertex ids
    std::vector<std::array<int, 3>> tri_neighbors;    // neighbor across edge (v[k], v[k+1]), -1 on boundary
    std::vector<std::vector<int>> vertex_triangles;   // incident triangles per vertex
    std::vector<bool> vertex_on_boundary;

    // Validates invariants (positive areas, manifold edges, closed simple
    // boundary loops) and derives connectivity. Throws InvalidArgument.
    static std::shared_ptr<const TriangleMesh> build(std::vector<Vec2> vertices,
                                                     std::vector<std::array<int, 3>> triangles);

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    int edge_count() const { return edge_count_; }

    double triangle_signed_area(int t) const {
        const auto& tri = triangles[t];
        return 0.5 * (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
    }
    double total_area() const;
    Box2 bounding_box() const { return bbox_; }
    double scale() const { return bbox_.diagonal(); }

private:
    int edge_count_ = 0;
    Box2 bbox_;
};

using MeshPtr = std::shared_ptr<const TriangleMesh>;

// Per-vertex image points: the piecewise-linear map determined by the mesh.
struct DiscreteMap {
    MeshPtr mesh;
    std::vector<Vec2> images;

    DiscreteMap() = default;
    DiscreteMap(MeshPtr mesh_, std::vector<Vec2> images_);

    static DiscreteMap identity(MeshPtr mesh);

    Box2 image_box() const;
    double image_scale() const { return image_box().diagonal(); }
};

// Structured triangulation of [0,width] x [0,height]; `resolution` cells per side.
MeshPtr build_rect_mesh(double width, double height, int resolution);
MeshPtr build_rect_mesh(double width, double height, int nx, int ny);

// Annulus triangulation with vertices on exact circles, rings equally spaced.
MeshPtr build_annulus_mesh(double r_inner, double r_outer, int radial_n, int angular_n);

// Union of the edge-connected components of `set` that contain a seed triangle.
// Deterministic: output sorted ascending.
std::vector<int> connected_component(const TriangleMesh& mesh,
                                     std::span<const int> set,
                                     std::span<const int> seeds);

// All edge-connected components of `set`, each sorted, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const TriangleMesh& mesh,
                                                   std::span<const int> set);

}  // namespace monomap
