#pragma once

#include "fiocalc/common.hpp"
#include "fiocalc/inertia.hpp"

#include <optional>

namespace fiocalc {

/// A point of the cotangent bundle in a named chart.
struct BasePoint {
    Vec x;
    Vec xi;
    std::string chart_id = "default";
};

/// Frame (B; C) spanning the Lagrangian subspace { Bw d/dx + Cw d/dxi }.
struct LagrangianFrame {
    Mat B;
    Mat C;
    BasePoint base;

    int n() const { return static_cast<int>(B.rows()); }
};

LagrangianFrame vertical_frame(const BasePoint& base);
LagrangianFrame horizontal_frame(const BasePoint& base);
/// L = { Av d/dx + v d/dxi }  (graph over the vertical subspace).
LagrangianFrame graph_frame_over_vertical(const Mat& A, const BasePoint& base);
/// L = { w d/dx + Aw d/dxi }  (graph over the horizontal subspace).
LagrangianFrame graph_frame_over_horizontal(const Mat& A, const BasePoint& base);

struct FrameValidation {
    bool ok = false;
    double asymmetry = 0.0;  // ||B'C - C'B||
    int rank_defect = 0;     // n - rank (B; C)
};

FrameValidation validate_frame(const LagrangianFrame& f, double tol = -1.0);

struct IntersectionDims {
    int dim_l1_vertical = 0;
    int dim_l2_vertical = 0;
    int dim_l1_l2 = 0;
};

IntersectionDims intersection_dims(const LagrangianFrame& l1, const LagrangianFrame& l2,
                                   double tol = -1.0);

/// Signature of the 3n x 3n Gram matrix of the canonical quadratic form on
/// L1 (+) V (+) L2 built from the symplectic form dx ^ dxi.  This is the
/// brute-force route used as the oracle for all index formulas.
int kashiwara_direct(const LagrangianFrame& l1, const LagrangianFrame& l2, double tol = -1.0);

struct GraphIndexResult {
    int kappa = 0;     // sgn A1 - sgn A2 - sgn(A1 - A2)
    int r = 0;         // rank A2 - rank A1 + rank(A1 - A2)
    int varkappa = 0;  // kappa_-(A2) - kappa_-(A1) + kappa_-(A1 - A2)
};

/// Index arithmetic for two subspaces given as graphs over the vertical.
/// Asserts varkappa == (kappa + r) / 2 exactly.
GraphIndexResult kashiwara_graphs(const Mat& A1, const Mat& A2, double tol = -1.0);

/// kappa_+(B'C).  Note: the signed index kashiwara_direct(L, H) equals
/// sgn(B'C); the two agree exactly when B'C has no negative eigenvalues.
int kashiwara_vs_horizontal(const LagrangianFrame& f, double tol = -1.0);

/// Coordinate change x -> xtilde with enough derivative data to transport
/// frames: forward map, Jacobian dxtilde/dx, and the Hessians of the forward
/// components.
struct ChartMap {
    std::string target_chart_id = "chart";
    std::function<Vec(const Vec&)> forward;
    std::function<Mat(const Vec&)> jacobian;
    /// hessians(x)[k](i,j) = d^2 xtilde_k / dx_i dx_j; empty callback means 0.
    std::function<std::vector<Mat>(const Vec&)> hessians;
};

ChartMap linear_chart(const Mat& L, const std::string& id = "linear");
/// xtilde = x + 0.5 * sum_k e_k (x-x0)' H_k (x-x0): prescribed Hessians H_k at x0.
ChartMap quadratic_chart(const Vec& x0, const std::vector<Mat>& hessians,
                         const std::string& id = "quadratic");

BasePoint transform_point(const BasePoint& p, const ChartMap& chart);
LagrangianFrame transform_frame(const LagrangianFrame& f, const ChartMap& chart);

enum class GraphOrientation { OverVertical, OverHorizontal };

struct GraphForm {
    Mat A;
    GraphOrientation orientation;
};

GraphForm graph_form(const LagrangianFrame& f, GraphOrientation orientation, double tol = -1.0);

/// Modified index of an arbitrary frame pair: converts both frames to graphs
/// over the vertical in sheared coordinates chosen transversal to both (a
/// seeded random draw, retried a bounded number of times) and applies the
/// kappa_- arithmetic; cross-checked against (kashiwara_direct + r) / 2.
int varkappa_frames(const LagrangianFrame& l1, const LagrangianFrame& l2, Rng& rng,
                    double tol = -1.0);

}  // namespace fiocalc
