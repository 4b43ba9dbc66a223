#pragma once

// Meridional meshes of the validation geometries: closed tube contours
// (cylindrical and conical walls) and the two-arc spherical shell,
// with linear or quadratic isoparametric elements, outward normals,
// and element-pair classification for the quadrature dispatch.

#include "axibem/kernels.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace axibem {

struct Element {
    int order = 1;                       // 1 or 2
    std::array<int, 3> nodes{-1, -1, -1};  // start, end, mid (mid = -1 for P1)
};

struct MeridianMesh {
    std::vector<MeridianPoint> nodes;
    std::vector<Element> elements;
    int order = 1;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_elements() const { return static_cast<int>(elements.size()); }
    int nodes_per_element() const { return order == 1 ? 2 : 3; }
};

struct ElementFrame {
    MeridianPoint point;
    double n_r = 0.0, n_z = 0.0;  // unit outward normal
    double jacobian = 0.0;
    std::array<double, 3> shapes{0.0, 0.0, 0.0};  // aligned with Element::nodes
};

// Isoparametric data at reference coordinate t: position, unit outward
// normal (tangent rotated by -90 degrees; builders orient the
// traversal so this points into the free space), |dx/dt| and the shape
// values, which sum to one.
inline ElementFrame eval_element(const MeridianMesh& mesh, int e, double t) {
    if (e < 0 || e >= mesh.n_elements())
        throw std::out_of_range("eval_element: element id out of range");
    const Element& el = mesh.elements[e];
    ElementFrame out;
    const MeridianPoint& a = mesh.nodes[el.nodes[0]];
    const MeridianPoint& b = mesh.nodes[el.nodes[1]];
    double dr, dz;
    if (el.order == 1) {
        out.shapes = {1.0 - t, t, 0.0};
        out.point = {a.r + t * (b.r - a.r), a.z + t * (b.z - a.z)};
        dr = b.r - a.r;
        dz = b.z - a.z;
    } else {
        const MeridianPoint& m = mesh.nodes[el.nodes[2]];
        const double ns = 1.0 - 3.0 * t + 2.0 * t * t;
        const double ne = 2.0 * t * t - t;
        const double nm = 4.0 * t * (1.0 - t);
        out.shapes = {ns, ne, nm};
        out.point = {ns * a.r + ne * b.r + nm * m.r, ns * a.z + ne * b.z + nm * m.z};
        const double dns = 4.0 * t - 3.0, dne = 4.0 * t - 1.0, dnm = 4.0 - 8.0 * t;
        dr = dns * a.r + dne * b.r + dnm * m.r;
        dz = dns * a.z + dne * b.z + dnm * m.z;
    }
    out.jacobian = std::hypot(dr, dz);
    if (out.jacobian <= 0.0) throw std::domain_error("eval_element: degenerate element");
    out.n_r = dz / out.jacobian;
    out.n_z = -dr / out.jacobian;
    return out;
}

namespace detail {

// Splits n_s into per-side element counts roughly proportional to the
// side lengths. n_s is reduced to its odd core (factors of two are
// pulled out while the quotient still admits one element per side);
// the core is apportioned by largest deficit and scaled back up. Under
// this rule doubling n_s doubles every side count exactly, so refined
// meshes nest.
inline std::vector<int> distribute_elements(int n_s, const std::vector<double>& lengths) {
    const int sides = static_cast<int>(lengths.size());
    int m = n_s, scale = 1;
    while (m % 2 == 0 && m / 2 >= sides) {
        m /= 2;
        scale *= 2;
    }
    const int min_per = (scale == 1) ? 2 : 1;
    if (m < min_per * sides)
        throw std::domain_error("mesh: n_s too small for the number of sides");
    double total = 0.0;
    for (double L : lengths) total += L;
    std::vector<int> count(sides, min_per);
    std::vector<double> quota(sides);
    for (int i = 0; i < sides; ++i) quota[i] = m * lengths[i] / total;
    for (int left = m - min_per * sides; left > 0; --left) {
        int best = 0;
        double best_def = quota[0] - count[0];
        for (int i = 1; i < sides; ++i) {
            const double d = quota[i] - count[i];
            if (d > best_def) {
                best = i;
                best_def = d;
            }
        }
        ++count[best];
    }
    for (int& c : count) c *= scale;
    return count;
}

// Appends a polyline side subdivided into `count` elements; `first` is
// the index of the side's first node (already present).
inline int append_line_side(MeridianMesh& mesh, int first, const MeridianPoint& to,
                            int count, int order) {
    const MeridianPoint from = mesh.nodes[first];
    int prev = first;
    for (int i = 1; i <= count; ++i) {
        const double t1 = static_cast<double>(i) / count;
        mesh.nodes.push_back({from.r + t1 * (to.r - from.r), from.z + t1 * (to.z - from.z)});
        const int end = mesh.n_nodes() - 1;
        Element el;
        el.order = order;
        el.nodes = {prev, end, -1};
        if (order == 2) {
            const double tm = (i - 0.5) / count;
            mesh.nodes.push_back({from.r + tm * (to.r - from.r), from.z + tm * (to.z - from.z)});
            el.nodes[2] = mesh.n_nodes() - 1;
        }
        mesh.elements.push_back(el);
        prev = end;
    }
    return prev;
}

inline void check_order(int order) {
    if (order != 1 && order != 2) throw std::domain_error("mesh: order must be 1 or 2");
}

// Closed polygonal contour traversed counterclockwise in the (r,z)
// half-plane; the rotated tangent then points out of the conductor.
inline MeridianMesh build_closed_polygon(const std::vector<MeridianPoint>& corners,
                                         int n_s, int order) {
    const int sides = static_cast<int>(corners.size());
    std::vector<double> lengths(sides);
    for (int i = 0; i < sides; ++i) {
        const auto& a = corners[i];
        const auto& b = corners[(i + 1) % sides];
        lengths[i] = std::hypot(b.r - a.r, b.z - a.z);
    }
    const std::vector<int> count = distribute_elements(n_s, lengths);
    MeridianMesh mesh;
    mesh.order = order;
    mesh.nodes.push_back(corners[0]);
    int cursor = 0;
    for (int s = 0; s < sides; ++s)
        cursor = append_line_side(mesh, cursor, corners[(s + 1) % sides], count[s], order);
    // the final corner duplicates node 0; fuse and compact the ids
    for (auto& el : mesh.elements)
        for (int& id : el.nodes) {
            if (id == cursor) id = 0;
            if (id > cursor) --id;
        }
    mesh.nodes.erase(mesh.nodes.begin() + cursor);
    return mesh;
}

}  // namespace detail

// Tube wall with inner radius a1, outer radius a2 and length l; closed
// rectangular meridian contour with outward normals.
inline MeridianMesh build_cylinder_tube(double a1, double a2, double l, int n_s, int order) {
    if (!(0.0 < a1 && a1 < a2) || !(l > 0.0))
        throw std::domain_error("build_cylinder_tube: need 0 < a1 < a2 and l > 0");
    if (n_s < 8) throw std::domain_error("build_cylinder_tube: n_s must be >= 8");
    detail::check_order(order);
    return detail::build_closed_polygon(
        {{a1, -0.5 * l}, {a2, -0.5 * l}, {a2, 0.5 * l}, {a1, 0.5 * l}}, n_s, order);
}

// Conical tube wall: bottom radii (a1,a2) at z=-l/2, top radii (a3,a4)
// at z=+l/2.
inline MeridianMesh build_conical_tube(double a1, double a2, double a3, double a4, double l,
                                       int n_s, int order) {
    if (!(0.0 < a1 && a1 < a2) || !(0.0 < a3 && a3 < a4) || !(l > 0.0))
        throw std::domain_error("build_conical_tube: invalid dimensions");
    if (n_s < 8) throw std::domain_error("build_conical_tube: n_s must be >= 8");
    detail::check_order(order);
    return detail::build_closed_polygon(
        {{a1, -0.5 * l}, {a2, -0.5 * l}, {a4, 0.5 * l}, {a3, 0.5 * l}}, n_s, order);
}

// Spherical shell bounded by radii a1 < a2: two semicircular meridian
// arcs with endpoints on the axis. The outer arc runs south to north
// (outward normal +radial), the inner arc north to south (normal
// -radial, into the cavity). P2 mid-nodes lie on the exact circles.
inline MeridianMesh build_spherical_shell(double a1, double a2, int n_s, int order) {
    if (!(0.0 < a1 && a1 < a2))
        throw std::domain_error("build_spherical_shell: need 0 < a1 < a2");
    if (n_s < 4) throw std::domain_error("build_spherical_shell: n_s must be >= 4");
    detail::check_order(order);
    const std::vector<int> count = detail::distribute_elements(n_s, {pi * a1, pi * a2});
    MeridianMesh mesh;
    mesh.order = order;
    auto arc = [&](double radius, int c, bool north_to_south) {
        // angle psi measured from the south pole; point (R sin, -R cos)
        auto at = [&](double frac) -> MeridianPoint {
            const double psi = north_to_south ? pi * (1.0 - frac) : pi * frac;
            return {radius * std::sin(psi), -radius * std::cos(psi)};
        };
        mesh.nodes.push_back(at(0.0));
        int prev = mesh.n_nodes() - 1;
        for (int i = 1; i <= c; ++i) {
            mesh.nodes.push_back(at(static_cast<double>(i) / c));
            const int end = mesh.n_nodes() - 1;
            Element el;
            el.order = order;
            el.nodes = {prev, end, -1};
            if (order == 2) {
                mesh.nodes.push_back(at((i - 0.5) / c));
                el.nodes[2] = mesh.n_nodes() - 1;
            }
            mesh.elements.push_back(el);
            prev = end;
        }
    };
    arc(a1, count[0], true);   // inner, normal -radial
    arc(a2, count[1], false);  // outer, normal +radial
    // pin the axis endpoints to r = 0 exactly
    for (auto& p : mesh.nodes)
        if (std::abs(p.r) < 1e-15 * (a1 + a2)) p.r = 0.0;
    return mesh;
}

// Pair classification for the quadrature dispatch: Coincident,
// Touching with the shared-corner orientation, or Separated with the
// min-distance / max-chord ratio (distance sampled on a coarse grid).
inline PairConfig classify_pair(const MeridianMesh& mesh, int ei, int ej) {
    if (ei < 0 || ej < 0 || ei >= mesh.n_elements() || ej >= mesh.n_elements())
        throw std::out_of_range("classify_pair: element id out of range");
    PairConfig pc;
    if (ei == ej) {
        pc.kind = PairKind::Coincident;
        return pc;
    }
    const auto& a = mesh.elements[ei];
    const auto& b = mesh.elements[ej];
    int shared = 0, cxi = 0, ceta = 0;
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
            const auto& pa = mesh.nodes[a.nodes[ia]];
            const auto& pb = mesh.nodes[b.nodes[ib]];
            if (pa.r == pb.r && pa.z == pb.z) {
                ++shared;
                cxi = ia;
                ceta = ib;
            }
        }
    if (shared >= 2)
        throw std::invalid_argument("classify_pair: elements share both endpoints");
    if (shared == 1) {
        pc.kind = PairKind::Touching;
        pc.corner_xi = cxi;
        pc.corner_eta = ceta;
        return pc;
    }
    pc.kind = PairKind::Separated;
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j) {
            const auto px = eval_element(mesh, ei, i / 4.0).point;
            const auto py = eval_element(mesh, ej, j / 4.0).point;
            dmin = std::min(dmin, std::hypot(px.r - py.r, px.z - py.z));
        }
    auto chord = [&](const Element& el) {
        const auto& p = mesh.nodes[el.nodes[0]];
        const auto& q = mesh.nodes[el.nodes[1]];
        return std::hypot(q.r - p.r, q.z - p.z);
    };
    pc.distance_ratio = dmin / std::max(chord(a), chord(b));
    return pc;
}

// Debug listing of nodes and elements (not a stable format).
inline void write_mesh_text(const MeridianMesh& mesh, std::ostream& os) {
    os << "# nodes " << mesh.n_nodes() << "\n";
    char buf[96];
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", i, mesh.nodes[i].r, mesh.nodes[i].z);
        os << buf;
    }
    os << "# elements " << mesh.n_elements() << "\n";
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& el = mesh.elements[e];
        os << e << " " << el.nodes[0] << " " << el.nodes[1];
        if (el.order == 2) os << " " << el.nodes[2];
        os << "\n";
    }
}

}  // namespace axibem
