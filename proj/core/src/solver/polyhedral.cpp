#include "capprice/solver/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace capprice::solver {

std::vector<PolygonEdge> inscribed_polygon(double bound, int k) {
    if (k < 4) throw std::invalid_argument("polygon needs at least 4 segments");
    if (bound < 0.0) throw std::invalid_argument("negative cone bound");
    const double radius = std::sqrt(bound);
    const double apothem = radius * std::cos(std::numbers::pi / k);
    std::vector<PolygonEdge> edges;
    edges.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        // Vertices sit at angles 2*pi*j/k; the edge normal bisects neighbours.
        const double theta = (2.0 * j + 1.0) * std::numbers::pi / k;
        edges.push_back(PolygonEdge{std::cos(theta), std::sin(theta), apothem});
    }
    return edges;
}

double polygon_radial_gap(double bound, int k) {
    if (k < 4) throw std::invalid_argument("polygon needs at least 4 segments");
    return std::sqrt(bound) * (1.0 - std::cos(std::numbers::pi / k));
}

std::vector<double> quad_breakpoints(const QuadLink& link, int uniform_points, int geometric_levels,
                                     double geometric_ratio) {
    std::vector<double> pts;
    if (link.grid == QuadLink::Grid::Uniform || link.lo >= 0.0 || link.hi <= 0.0) {
        const int n = std::max(uniform_points, 2);
        for (int i = 0; i < n; ++i) pts.push_back(link.lo + (link.hi - link.lo) * i / (n - 1));
    } else {
        pts.push_back(0.0);
        double scale = 1.0;
        for (int l = 0; l < geometric_levels; ++l) {
            pts.push_back(link.hi * scale);
            pts.push_back(link.lo * scale);
            scale /= geometric_ratio;
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

namespace {

double box_max(const ModelIR& ir, int var, double coef) {
    const Variable& v = ir.var(var);
    return coef >= 0.0 ? coef * v.ub : coef * v.lb;
}

}  // namespace

ModelIR polyhedralize(const ModelIR& ir, const PolyhedralOptions& options) {
    ModelIR out;
    for (const Variable& v : ir.vars()) out.add_var(v.name, v.lb, v.ub, v.cost);
    out.set_objective_constant(ir.objective_constant());
    for (const LinearRow& r : ir.rows()) out.add_row(r.name, r.sense, r.terms, r.rhs, r.tag);

    for (const ConeRow& c : ir.cones()) {
        if (c.terms.size() > 2)
            throw std::invalid_argument("cone '" + c.name + "' has more than two terms");
        const Term a = c.terms.empty() ? Term{} : c.terms[0];
        const Term b = c.terms.size() > 1 ? c.terms[1] : Term{};
        const auto edges = inscribed_polygon(c.bound, options.cone_segments);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            std::vector<Term> terms;
            double reach = 0.0;
            if (a.var >= 0 && edges[e].cos_a != 0.0) {
                terms.push_back({a.var, edges[e].cos_a * a.coef});
                reach += box_max(ir, a.var, edges[e].cos_a * a.coef);
            }
            if (b.var >= 0 && edges[e].sin_a != 0.0) {
                terms.push_back({b.var, edges[e].sin_a * b.coef});
                reach += box_max(ir, b.var, edges[e].sin_a * b.coef);
            }
            if (options.drop_redundant_edges && reach <= edges[e].rhs) continue;
            out.add_row(c.name + "#" + std::to_string(e), Sense::Le, std::move(terms), edges[e].rhs,
                        c.tag);
        }
    }

    for (const QuadLink& q : ir.quads()) {
        const auto pts = quad_breakpoints(q, options.uniform_breakpoints, options.geometric_levels,
                                          options.geometric_ratio);
        // Keep the argument inside the domain the envelope is valid on.
        out.add_row(q.name + "#lo", Sense::Ge, q.terms, q.lo - q.constant, q.tag);
        out.add_row(q.name + "#hi", Sense::Le, q.terms, q.hi - q.constant, q.tag);
        if (q.weight == 0.0) continue;
        for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
            const double g0 = pts[s];
            const double g1 = pts[s + 1];
            const double slope = g0 + g1;
            const double intercept = -g0 * g1;
            // epi >= w * (slope * (a'x + c) + intercept)
            std::vector<Term> terms{{q.epigraph, 1.0}};
            for (const Term& t : q.terms) terms.push_back({t.var, -q.weight * slope * t.coef});
            out.add_row(q.name + "#s" + std::to_string(s), Sense::Ge, std::move(terms),
                        q.weight * (slope * q.constant + intercept), q.tag);
        }
    }

    for (const Sos1Set& s : ir.sos1()) out.add_sos1(s.name, s.members);
    return out;
}

}  // namespace capprice::solver
