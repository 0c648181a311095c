#pragma once

#include <vector>

#include "capprice/solver/model_ir.hpp"

namespace capprice::solver {

/// One edge of an inscribed regular polygon: cos_a * a + sin_a * b <= rhs.
struct PolygonEdge {
    double cos_a = 0.0;
    double sin_a = 0.0;
    double rhs = 0.0;
};

/// Edges of the regular k-gon inscribed in the disk a^2 + b^2 <= bound, with a
/// vertex on the positive a-axis. Every point satisfying all edges lies in the
/// disk. Requires k >= 4.
std::vector<PolygonEdge> inscribed_polygon(double bound, int k);

/// Largest radial distance between the disk boundary and the inscribed k-gon.
double polygon_radial_gap(double bound, int k);

/// Breakpoints used for the piecewise-linear envelope of a quadratic link.
std::vector<double> quad_breakpoints(const QuadLink& link, int uniform_points, int geometric_levels,
                                     double geometric_ratio);

struct PolyhedralOptions {
    int cone_segments = 32;
    int uniform_breakpoints = 8;
    int geometric_levels = 6;
    double geometric_ratio = 4.0;
    /// Skip polygon edges that cannot bind given the variable bounds.
    bool drop_redundant_edges = true;
};

/// Linear-only copy of the model: two-term cone rows become inscribed polygon
/// rows and quadratic links become secant over-estimators on their domain.
/// Variables and SOS1 sets are unchanged, so solution vectors carry over.
ModelIR polyhedralize(const ModelIR& ir, const PolyhedralOptions& options = {});

}  // namespace capprice::solver
