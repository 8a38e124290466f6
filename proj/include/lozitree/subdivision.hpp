#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "lozitree/clip.hpp"
#include "lozitree/geometry.hpp"

namespace lozitree {

// Planar subdivision of a simple polygon by pairwise disjoint arcs whose
// endpoints lie on the boundary and whose interiors stay inside (touching the
// boundary at isolated points is allowed). Faces are traced combinatorially
// from the circular order of boundary contacts, which is exact: internally
// disjoint simple curves with endpoints on a Jordan curve embed according to
// that order alone.
struct Subdivision {
    struct Node {
        QPoint pt;
        BoundaryParam bp;
        int arc = -1;          // contact: owning arc, else -1 for a bare corner
        int contact_idx = -1;  // index into that arc's contact sequence
        bool corner = false;
    };

    struct Face {
        std::vector<QPoint> outline;  // closed, in walk order
        std::vector<size_t> arcs;     // distinct arcs on the boundary
        std::vector<size_t> boundary_edges;  // polygon edges contributing pieces

        double diameter() const {
            double best = 0;
            for (size_t i = 0; i < outline.size(); ++i)
                for (size_t j = i + 1; j < outline.size(); ++j)
                    best = std::max(best, distance_approx(outline[i], outline[j]));
            return best;
        }
    };

    QPolygon polygon;
    std::vector<Node> nodes;  // circular order along the boundary
    std::vector<Face> faces;
    std::vector<std::vector<size_t>> arc_faces;        // per arc: distinct adjacent faces
    std::vector<std::vector<PathParam>> arc_contacts;  // per arc: contact params in arc order
    std::vector<size_t> face_after_node;  // face adjacent to boundary just past node i
    std::vector<std::vector<std::array<size_t, 2>>> piece_faces;  // per arc piece: {left, right} face

    // Faces on the two sides of arc piece p (left = side seen walking the
    // arc in its own orientation).
    std::pair<size_t, size_t> chord_faces(size_t arc, size_t piece) const {
        return {piece_faces[arc][piece][0], piece_faces[arc][piece][1]};
    }

    size_t interior_touches(size_t arc) const { return arc_contacts[arc].size() - 2; }
    size_t face_degree(size_t arc) const { return arc_faces[arc].size(); }

    size_t incidence_edges() const {
        size_t e = 0;
        for (auto& f : arc_faces) e += f.size();
        return e;
    }

    // |faces| + |arcs| = |incidences| + 1 and the incidence graph is connected.
    bool is_tree() const {
        size_t n = faces.size() + arc_faces.size();
        if (n != incidence_edges() + 1) return false;
        if (n == 0) return true;
        std::vector<std::vector<size_t>> adj(n);
        for (size_t a = 0; a < arc_faces.size(); ++a)
            for (size_t f : arc_faces[a]) {
                adj[a].push_back(arc_faces.size() + f);
                adj[arc_faces.size() + f].push_back(a);
            }
        std::vector<char> seen(n, 0);
        std::vector<size_t> stack{0};
        seen[0] = 1;
        size_t cnt = 0;
        while (!stack.empty()) {
            size_t u = stack.back();
            stack.pop_back();
            ++cnt;
            for (size_t w : adj[u])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        return cnt == n;
    }

    // Face whose closure contains the boundary point bp; if bp coincides with
    // a node, the face just past that node along the boundary.
    size_t face_at_boundary(const BoundaryParam& bp) const {
        size_t lo = 0;
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].bp < bp || nodes[i].bp == bp)
                lo = i;
            else
                break;
        }
        return face_after_node[lo];
    }

    // Exact point location for points strictly inside one face.
    std::optional<size_t> locate_face(const QPoint& p) const {
        for (size_t f = 0; f < faces.size(); ++f) {
            QPolygon fp{faces[f].outline};
            if (point_in_polygon(p, fp) == Location::inside) return f;
        }
        return std::nullopt;
    }
};

inline Subdivision subdivide(const QPolygon& poly, const std::vector<QPolyline>& arcs) {
    Subdivision sd;
    sd.polygon = poly;
    const size_t ncorner = poly.v.size();

    struct Contact {
        BoundaryParam bp;
        QPoint pt;
        PathParam ap;
        size_t arc;
        size_t ord;  // position along the arc
    };
    std::vector<Contact> contacts;
    sd.arc_contacts.resize(arcs.size());
    for (size_t a = 0; a < arcs.size(); ++a) {
        auto events = collect_boundary_events(arcs[a], poly);
        if (events.size() < 2) throw UsageError("subdivide: arc endpoints must lie on the polygon boundary");
        PathParam first = PathParam::at_vertex(0);
        PathParam last{arcs[a].segments() - 1, QScalar::from_rational(1, Rational(0))};
        if (!(events.front().param == first) || !(canonical(events.back().param, arcs[a]) == canonical(last, arcs[a])))
            throw UsageError("subdivide: arc endpoints must lie on the polygon boundary");
        for (auto& e : events) {
            if (e.from_overlap) throw UsageError("subdivide: arc overlaps the polygon boundary");
            contacts.push_back({e.bparam, e.point, e.param, a, sd.arc_contacts[a].size()});
            sd.arc_contacts[a].push_back(e.param);
        }
        // interiors must stay inside the closed polygon
        for (size_t i = 0; i + 1 < events.size(); ++i) {
            QPoint probe = detail::gap_probe(arcs[a], events[i].param, events[i + 1].param);
            if (point_in_polygon(probe, poly) == Location::outside)
                throw UsageError("subdivide: arc leaves the polygon");
        }
    }

    // Circle nodes: corners plus contacts, in boundary order.
    for (size_t c = 0; c < ncorner; ++c)
        sd.nodes.push_back({poly.v[c], BoundaryParam{c, QScalar()}, -1, -1, true});
    for (auto& c : contacts) {
        Subdivision::Node n{c.pt, c.bp, static_cast<int>(c.arc), static_cast<int>(c.ord), false};
        sd.nodes.push_back(std::move(n));
    }
    std::sort(sd.nodes.begin(), sd.nodes.end(), [](const Subdivision::Node& a, const Subdivision::Node& b) {
        if (a.bp < b.bp) return true;
        if (b.bp < a.bp) return false;
        return a.corner && !b.corner;  // a contact exactly at a corner: corner node first
    });
    // Merge a contact landing exactly on a corner into one node.
    {
        std::vector<Subdivision::Node> merged;
        for (auto& n : sd.nodes) {
            if (!merged.empty() && merged.back().bp == n.bp) {
                if (merged.back().arc >= 0 && n.arc >= 0)
                    throw UsageError("subdivide: two arcs meet the boundary at one point");
                if (n.arc >= 0) {
                    merged.back().arc = n.arc;
                    merged.back().contact_idx = n.contact_idx;
                }
                merged.back().corner = merged.back().corner || n.corner;
                continue;
            }
            merged.push_back(n);
        }
        sd.nodes = std::move(merged);
    }
    const size_t M = sd.nodes.size();
    std::map<std::pair<size_t, size_t>, size_t> contact_node;  // (arc, ord) -> node
    for (size_t i = 0; i < M; ++i)
        if (sd.nodes[i].arc >= 0) contact_node[{size_t(sd.nodes[i].arc), size_t(sd.nodes[i].contact_idx)}] = i;
    // Distinct-contact check: every contact must map to its own node.
    {
        size_t expect = 0;
        for (auto& ac : sd.arc_contacts) expect += ac.size();
        if (contact_node.size() != expect) throw UsageError("subdivide: arcs share a boundary point");
    }

    // Edges: boundary pieces i -> i+1 and arc chords.
    struct Edge {
        size_t u, v;
        bool is_chord;
        size_t arc = 0, piece = 0;
    };
    std::vector<Edge> edges;
    for (size_t i = 0; i < M; ++i) edges.push_back({i, (i + 1) % M, false});
    for (size_t a = 0; a < arcs.size(); ++a) {
        for (size_t k = 0; k + 1 < sd.arc_contacts[a].size(); ++k) {
            size_t u = contact_node[{a, k}];
            size_t v = contact_node[{a, k + 1}];
            if (u == v) throw UsageError("subdivide: arc piece with coincident boundary contacts");
            edges.push_back({u, v, true, a, k});
        }
    }

    // Rotation at each node, counterclockwise starting from the boundary-next
    // edge: chords sorted by circular offset of the far endpoint, then
    // boundary-prev. Half-edge h = 2*e (+1 for the reversed direction).
    auto tail = [&](size_t h) { return h % 2 == 0 ? edges[h / 2].u : edges[h / 2].v; };
    auto head = [&](size_t h) { return h % 2 == 0 ? edges[h / 2].v : edges[h / 2].u; };
    std::vector<std::vector<size_t>> rot(M);
    for (size_t i = 0; i < M; ++i) rot[i].push_back(2 * i);  // boundary i -> i+1
    {
        // chords grouped per tail with sort keys
        std::vector<std::vector<std::pair<size_t, size_t>>> ch(M);  // (offset, halfedge)
        for (size_t e = 0; e < edges.size(); ++e) {
            if (!edges[e].is_chord) continue;
            size_t u = edges[e].u, v = edges[e].v;
            ch[u].push_back({(v + M - u) % M, 2 * e});
            ch[v].push_back({(u + M - v) % M, 2 * e + 1});
        }
        for (size_t i = 0; i < M; ++i) {
            std::sort(ch[i].begin(), ch[i].end());
            for (auto& [off, h] : ch[i]) rot[i].push_back(h);
            rot[i].push_back(2 * ((i + M - 1) % M) + 1);  // boundary prev, reversed
        }
    }
    std::vector<size_t> rot_pos(2 * edges.size());
    for (size_t i = 0; i < M; ++i)
        for (size_t k = 0; k < rot[i].size(); ++k) rot_pos[rot[i][k]] = k;

    auto next_halfedge = [&](size_t h) {
        size_t v = head(h);
        size_t tw = h ^ 1;
        size_t pos = rot_pos[tw];
        size_t k = rot[v].size();
        return rot[v][(pos + k - 1) % k];
    };

    // Trace orbits; skip the outer face (reversed boundary orbit).
    std::vector<int> face_of_halfedge(2 * edges.size(), -1);
    size_t outer_start = 2 * 0 + 1;  // (node1 -> node0)
    {
        size_t h = outer_start;
        do {
            face_of_halfedge[h] = -2;
            h = next_halfedge(h);
        } while (h != outer_start);
    }
    sd.arc_faces.assign(arcs.size(), {});
    for (size_t h0 = 0; h0 < 2 * edges.size(); ++h0) {
        if (face_of_halfedge[h0] != -1) continue;
        size_t fid = sd.faces.size();
        sd.faces.emplace_back();
        auto& face = sd.faces.back();
        std::set<size_t> arcset, bset;
        size_t h = h0;
        do {
            face_of_halfedge[h] = static_cast<int>(fid);
            const Edge& e = edges[h / 2];
            bool fwd = (h % 2 == 0);
            if (e.is_chord) {
                arcset.insert(e.arc);
                // geometry of the arc piece between contacts e.piece, e.piece+1
                const QPolyline& al = arcs[e.arc];
                PathParam pa = sd.arc_contacts[e.arc][e.piece];
                PathParam pb = sd.arc_contacts[e.arc][e.piece + 1];
                std::vector<QPoint> pts;
                pts.push_back(point_at(al, pa));
                for (size_t k = pa.seg + 1; k <= pb.seg; ++k) {
                    PathParam vp = PathParam::at_vertex(k);
                    if (pa < vp && vp < pb) pts.push_back(al.v[k]);
                }
                pts.push_back(point_at(al, pb));
                if (!fwd) std::reverse(pts.begin(), pts.end());
                for (size_t k = 0; k + 1 < pts.size(); ++k) face.outline.push_back(pts[k]);
            } else {
                bset.insert(sd.nodes[e.u].bp.edge);
                face.outline.push_back(fwd ? sd.nodes[e.u].pt : sd.nodes[e.v].pt);
            }
            h = next_halfedge(h);
        } while (h != h0);
        face.arcs.assign(arcset.begin(), arcset.end());
        face.boundary_edges.assign(bset.begin(), bset.end());
        for (size_t a : face.arcs) sd.arc_faces[a].push_back(fid);
    }
    sd.face_after_node.resize(M);
    for (size_t i = 0; i < M; ++i) {
        int f = face_of_halfedge[2 * i];
        if (f < 0) throw InvariantViolation("subdivide: boundary half-edge fell in the outer face");
        sd.face_after_node[i] = static_cast<size_t>(f);
    }
    sd.piece_faces.resize(arcs.size());
    for (size_t a = 0; a < arcs.size(); ++a)
        sd.piece_faces[a].resize(sd.arc_contacts[a].empty() ? 0 : sd.arc_contacts[a].size() - 1);
    for (size_t e = 0; e < edges.size(); ++e) {
        if (!edges[e].is_chord) continue;
        int fl = face_of_halfedge[2 * e];
        int fr = face_of_halfedge[2 * e + 1];
        if (fl < 0 || fr < 0) throw InvariantViolation("subdivide: chord borders the outer face");
        sd.piece_faces[edges[e].arc][edges[e].piece] = {static_cast<size_t>(fl), static_cast<size_t>(fr)};
    }
    return sd;
}

}  // namespace lozitree
