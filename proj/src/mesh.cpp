#include "monomap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "monomap/errors.hpp"

namespace monomap {

std::shared_ptr<const TriangleMesh> TriangleMesh::build(std::vector<Vec2> vertices,
                                                        std::vector<std::array<int, 3>> triangles) {
    auto mesh = std::make_shared<TriangleMesh>();
    mesh->vertices = std::move(vertices);
    mesh->triangles = std::move(triangles);

    const int nv = mesh->vertex_count();
    const int nt = mesh->triangle_count();
    if (nv < 3 || nt < 1)
        throw InvalidArgument("mesh needs at least 3 vertices and 1 triangle");

    for (const Vec2& v : mesh->vertices) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw InvalidArgument("non-finite vertex coordinate");
        mesh->bbox_.expand(v);
    }

    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            int v = mesh->triangles[t][k];
            if (v < 0 || v >= nv)
                throw InvalidArgument("triangle " + std::to_string(t) + " has out-of-range vertex index");
        }
        const auto& tri = mesh->triangles[t];
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw InvalidArgument("triangle " + std::to_string(t) + " repeats a vertex");
        if (mesh->triangle_signed_area(t) <= 0.0)
            throw InvalidArgument("triangle " + std::to_string(t) + " has non-positive signed area");
    }

    // Directed edge map; a manifold mesh has each directed edge exactly once
    // and each undirected edge shared by at most two triangles.
    std::map<std::pair<int, int>, int> directed;  // (a,b) -> triangle
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            int a = mesh->triangles[t][k];
            int b = mesh->triangles[t][(k + 1) % 3];
            auto [it, inserted] = directed.insert({{a, b}, t});
            if (!inserted)
                throw InvalidArgument("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                      ") has two triangles on the same side");
        }
    }

    mesh->tri_neighbors.assign(nt, {-1, -1, -1});
    int boundary_edges = 0;
    int undirected_edges = 0;
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            int a = mesh->triangles[t][k];
            int b = mesh->triangles[t][(k + 1) % 3];
            auto it = directed.find({b, a});
            if (it != directed.end()) {
                mesh->tri_neighbors[t][k] = it->second;
            } else {
                ++boundary_edges;
            }
            if (a < b) ++undirected_edges;
            else if (directed.find({b, a}) == directed.end()) ++undirected_edges;  // boundary edge seen from its only side
        }
    }
    mesh->edge_count_ = undirected_edges;

    // Boundary loops: chain directed boundary edges (interior on the left).
    std::map<int, int> next_on_boundary;  // vertex -> next vertex along boundary
    mesh->vertex_on_boundary.assign(nv, false);
    for (const auto& [edge, t] : directed) {
        if (directed.find({edge.second, edge.first}) == directed.end()) {
            auto [it, inserted] = next_on_boundary.insert({edge.first, edge.second});
            if (!inserted)
                throw InvalidArgument("non-manifold boundary at vertex " + std::to_string(edge.first));
            mesh->vertex_on_boundary[edge.first] = true;
            mesh->vertex_on_boundary[edge.second] = true;
        }
    }
    std::vector<bool> used(nv, false);
    for (const auto& [start, ignored] : next_on_boundary) {
        if (used[start]) continue;
        std::vector<int> loop;
        int v = start;
        do {
            if (used[v]) throw InvalidArgument("boundary loop is not simple at vertex " + std::to_string(v));
            used[v] = true;
            loop.push_back(v);
            auto it = next_on_boundary.find(v);
            if (it == next_on_boundary.end())
                throw InvalidArgument("boundary walk broke at vertex " + std::to_string(v));
            v = it->second;
        } while (v != start);
        mesh->boundary_loops.push_back(std::move(loop));
    }
    std::size_t loop_edges = 0;
    for (const auto& loop : mesh->boundary_loops) loop_edges += loop.size();
    if (static_cast<int>(loop_edges) != boundary_edges)
        throw InvalidArgument("boundary loops do not account for all boundary edges");

    mesh->vertex_neighbors.assign(nv, {});
    mesh->vertex_triangles.assign(nv, {});
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            int a = mesh->triangles[t][k];
            int b = mesh->triangles[t][(k + 1) % 3];
            mesh->vertex_neighbors[a].push_back(b);
            mesh->vertex_neighbors[b].push_back(a);
            mesh->vertex_triangles[a].push_back(t);
        }
    }
    for (auto& nbrs : mesh->vertex_neighbors) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return mesh;
}

double TriangleMesh::total_area() const {
    double sum = 0.0, comp = 0.0;
    for (int t = 0; t < triangle_count(); ++t) {
        double y = triangle_signed_area(t) - comp;
        double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

DiscreteMap::DiscreteMap(MeshPtr mesh_, std::vector<Vec2> images_)
    : mesh(std::move(mesh_)), images(std::move(images_)) {
    if (!mesh) throw InvalidArgument("map needs a mesh");
    if (images.size() != mesh->vertices.size())
        throw InvalidArgument("map has " + std::to_string(images.size()) + " images for " +
                              std::to_string(mesh->vertices.size()) + " vertices");
    for (const Vec2& p : images)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw InvalidArgument("non-finite image coordinate");
}

DiscreteMap DiscreteMap::identity(MeshPtr mesh) {
    std::vector<Vec2> images = mesh->vertices;
    return DiscreteMap(std::move(mesh), std::move(images));
}

Box2 DiscreteMap::image_box() const {
    Box2 box;
    for (const Vec2& p : images) box.expand(p);
    return box;
}

MeshPtr build_rect_mesh(double width, double height, int resolution) {
    return build_rect_mesh(width, height, resolution, resolution);
}

MeshPtr build_rect_mesh(double width, double height, int nx, int ny) {
    if (!(width > 0.0) || !(height > 0.0))
        throw InvalidArgument("rectangle dimensions must be positive");
    if (nx < 1 || ny < 1)
        throw InvalidArgument("resolution must be at least 1");

    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            vertices.push_back({width * i / nx, height * j / ny});

    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(2 * nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriangleMesh::build(std::move(vertices), std::move(tris));
}

MeshPtr build_annulus_mesh(double r_inner, double r_outer, int radial_n, int angular_n) {
    if (!(r_inner > 0.0) || !(r_outer > r_inner))
        throw InvalidArgument("annulus needs 0 < r_inner < r_outer");
    if (radial_n < 1) throw InvalidArgument("radial_n must be at least 1");
    if (angular_n < 3) throw InvalidArgument("angular_n must be at least 3");

    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>(radial_n + 1) * angular_n);
    for (int k = 0; k <= radial_n; ++k) {
        double rho = r_inner + (r_outer - r_inner) * k / radial_n;
        if (k == radial_n) rho = r_outer;  // exact outer circle
        for (int j = 0; j < angular_n; ++j) {
            double theta = 2.0 * M_PI * j / angular_n;
            vertices.push_back({rho * std::cos(theta), rho * std::sin(theta)});
        }
    }
    auto id = [angular_n](int k, int j) { return k * angular_n + (j % angular_n); };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(2 * radial_n) * angular_n);
    for (int k = 0; k < radial_n; ++k) {
        for (int j = 0; j < angular_n; ++j) {
            tris.push_back({id(k, j), id(k + 1, j), id(k + 1, j + 1)});
            tris.push_back({id(k, j), id(k + 1, j + 1), id(k, j + 1)});
        }
    }
    return TriangleMesh::build(std::move(vertices), std::move(tris));
}

std::vector<std::vector<int>> connected_components(const TriangleMesh& mesh,
                                                   std::span<const int> set) {
    std::vector<char> in_set(mesh.triangle_count(), 0);
    for (int t : set) {
        if (t < 0 || t >= mesh.triangle_count())
            throw InvalidArgument("triangle index " + std::to_string(t) + " out of range");
        in_set[t] = 1;
    }
    std::vector<char> visited(mesh.triangle_count(), 0);
    std::vector<std::vector<int>> components;
    std::vector<int> ordered(set.begin(), set.end());
    std::sort(ordered.begin(), ordered.end());
    for (int start : ordered) {
        if (visited[start]) continue;
        std::vector<int> comp, stack{start};
        visited[start] = 1;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            comp.push_back(t);
            for (int n : mesh.tri_neighbors[t]) {
                if (n >= 0 && in_set[n] && !visited[n]) {
                    visited[n] = 1;
                    stack.push_back(n);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    return components;
}

std::vector<int> connected_component(const TriangleMesh& mesh,
                                     std::span<const int> set,
                                     std::span<const int> seeds) {
    std::vector<char> seed_mark(mesh.triangle_count(), 0);
    for (int s : seeds) {
        if (s < 0 || s >= mesh.triangle_count())
            throw InvalidArgument("seed triangle index " + std::to_string(s) + " out of range");
        seed_mark[s] = 1;
    }
    std::vector<int> out;
    for (const auto& comp : connected_components(mesh, set)) {
        bool touched = std::any_of(comp.begin(), comp.end(), [&](int t) { return seed_mark[t]; });
        if (touched) out.insert(out.end(), comp.begin(), comp.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace monomap
