#include "fiocalc/lagrangian.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <sstream>

namespace fiocalc {

namespace {

void require_same_base(const LagrangianFrame& a, const LagrangianFrame& b) {
    if (a.base.chart_id != b.base.chart_id)
        throw ValidationError("frames live in different charts: '" + a.base.chart_id + "' vs '" +
                              b.base.chart_id + "'");
    if (a.base.x.size() != b.base.x.size() || (a.base.x - b.base.x).norm() > 1e-8 ||
        (a.base.xi - b.base.xi).norm() > 1e-8 * std::max(1.0, a.base.xi.norm()))
        throw ValidationError("frames have mismatched base points");
}

void require_valid(const LagrangianFrame& f, double tol, const char* who) {
    const FrameValidation v = validate_frame(f, tol);
    if (!v.ok) {
        std::ostringstream os;
        os << who << ": invalid Lagrangian frame (asymmetry " << v.asymmetry << ", rank defect "
           << v.rank_defect << ")";
        throw ValidationError(os.str());
    }
}

}  // namespace

LagrangianFrame vertical_frame(const BasePoint& base) {
    const int n = static_cast<int>(base.x.size());
    return {Mat::Zero(n, n), Mat::Identity(n, n), base};
}

LagrangianFrame horizontal_frame(const BasePoint& base) {
    const int n = static_cast<int>(base.x.size());
    return {Mat::Identity(n, n), Mat::Zero(n, n), base};
}

LagrangianFrame graph_frame_over_vertical(const Mat& A, const BasePoint& base) {
    return {A, Mat::Identity(A.rows(), A.cols()), base};
}

LagrangianFrame graph_frame_over_horizontal(const Mat& A, const BasePoint& base) {
    return {Mat::Identity(A.rows(), A.cols()), A, base};
}

FrameValidation validate_frame(const LagrangianFrame& f, double tol) {
    FrameValidation out;
    if (f.B.rows() != f.B.cols() || f.C.rows() != f.C.cols() || f.B.rows() != f.C.rows())
        throw ValidationError("validate_frame: blocks must be square of equal size");
    const int n = f.n();
    const Mat sym = f.B.transpose() * f.C - f.C.transpose() * f.B;
    out.asymmetry = sym.size() ? Eigen::JacobiSVD<Mat>(sym).singularValues()(0) : 0.0;
    Mat stacked(2 * n, n);
    stacked << f.B, f.C;
    out.rank_defect = n - rank_of(stacked, tol);
    const double scale = std::max(f.B.norm(), f.C.norm());
    out.ok = out.asymmetry <= resolve_tol(tol, scale * scale) && out.rank_defect == 0;
    return out;
}

IntersectionDims intersection_dims(const LagrangianFrame& l1, const LagrangianFrame& l2,
                                   double tol) {
    require_same_base(l1, l2);
    const int n = l1.n();
    IntersectionDims out;
    out.dim_l1_vertical = n - rank_of(l1.B, tol);
    out.dim_l2_vertical = n - rank_of(l2.B, tol);
    Mat joint(2 * n, 2 * n);
    joint << l1.B, l2.B, l1.C, l2.C;
    out.dim_l1_l2 = 2 * n - rank_of(joint, tol);
    return out;
}

int kashiwara_direct(const LagrangianFrame& l1, const LagrangianFrame& l2, double tol) {
    require_same_base(l1, l2);
    require_valid(l1, tol, "kashiwara_direct");
    require_valid(l2, tol, "kashiwara_direct");
    const int n = l1.n();
    // Quadratic form Q(w1, v, w2) = w1'B1'v - v'B2 w2 + w2'(B2'C1 - C2'B1)w1
    // on the frame parameters of (L1, V, L2); symmetrized Gram below.
    Mat G = Mat::Zero(3 * n, 3 * n);
    G.block(0, n, n, n) = 0.5 * l1.B.transpose();
    G.block(n, 0, n, n) = 0.5 * l1.B;
    G.block(n, 2 * n, n, n) = -0.5 * l2.B;
    G.block(2 * n, n, n, n) = -0.5 * l2.B.transpose();
    const Mat X = l2.B.transpose() * l1.C - l2.C.transpose() * l1.B;
    G.block(2 * n, 0, n, n) = 0.5 * X;
    G.block(0, 2 * n, n, n) = 0.5 * X.transpose();
    return inertia(G, tol).sgn;
}

GraphIndexResult kashiwara_graphs(const Mat& A1, const Mat& A2, double tol) {
    const Inertia i1 = inertia(A1, tol);
    const Inertia i2 = inertia(A2, tol);
    const Inertia id = inertia(Mat(A1 - A2), tol);
    GraphIndexResult out;
    out.kappa = i1.sgn - i2.sgn - id.sgn;
    out.r = i2.rank - i1.rank + id.rank;
    out.varkappa = i2.kappa_minus - i1.kappa_minus + id.kappa_minus;
    if (2 * out.varkappa != out.kappa + out.r)
        throw NumericsError("kashiwara_graphs: varkappa != (kappa + r)/2; threshold-straddling input");
    return out;
}

int kashiwara_vs_horizontal(const LagrangianFrame& f, double tol) {
    require_valid(f, tol, "kashiwara_vs_horizontal");
    return inertia(Mat(f.B.transpose() * f.C), tol).kappa_plus;
}

ChartMap linear_chart(const Mat& L, const std::string& id) {
    Eigen::FullPivLU<Mat> lu(L);
    if (!lu.isInvertible()) throw ValidationError("linear_chart: singular matrix");
    return {id, [L](const Vec& x) { return Vec(L * x); }, [L](const Vec&) { return L; },
            nullptr};
}

ChartMap quadratic_chart(const Vec& x0, const std::vector<Mat>& hessians, const std::string& id) {
    const int n = static_cast<int>(x0.size());
    if (static_cast<int>(hessians.size()) != n)
        throw ValidationError("quadratic_chart: need one Hessian per component");
    return {id,
            [x0, hessians, n](const Vec& x) {
                Vec out = x;
                const Vec d = x - x0;
                for (int k = 0; k < n; ++k) out[k] += 0.5 * d.dot(hessians[k] * d);
                return out;
            },
            [x0, hessians, n](const Vec& x) {
                Mat J = Mat::Identity(n, n);
                const Vec d = x - x0;
                for (int k = 0; k < n; ++k) J.row(k) += (hessians[k] * d).transpose();
                return J;
            },
            [hessians](const Vec&) { return hessians; }};
}

BasePoint transform_point(const BasePoint& p, const ChartMap& chart) {
    const Mat J = chart.jacobian(p.x);
    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible()) throw ValidationError("transform_point: singular chart Jacobian");
    BasePoint out;
    out.x = chart.forward(p.x);
    out.xi = lu.inverse().transpose() * p.xi;
    out.chart_id = chart.target_chart_id;
    return out;
}

LagrangianFrame transform_frame(const LagrangianFrame& f, const ChartMap& chart) {
    const int n = f.n();
    const Mat J = chart.jacobian(f.base.x);
    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible()) throw ValidationError("transform_frame: singular chart Jacobian");
    const Mat Jinv = lu.inverse();
    const BasePoint nb = transform_point(f.base, chart);

    // C_ij = sum_k xi_k d^2 x_k / dxtilde_i dxtilde_j expressed through the
    // forward Hessians:  C = -Jinv' (sum_a xitilde_a H_a) Jinv.
    Mat C = Mat::Zero(n, n);
    if (chart.hessians) {
        const std::vector<Mat> H = chart.hessians(f.base.x);
        Mat contracted = Mat::Zero(n, n);
        for (int a = 0; a < n; ++a) contracted += nb.xi[a] * H[a];
        C = -Jinv.transpose() * contracted * Jinv;
    }

    LagrangianFrame out;
    out.B = J * f.B;
    out.C = Jinv.transpose() * f.C + C * J * f.B;
    out.base = nb;
    return out;
}

GraphForm graph_form(const LagrangianFrame& f, GraphOrientation orientation, double tol) {
    require_valid(f, tol, "graph_form");
    const Mat& pivot = (orientation == GraphOrientation::OverHorizontal) ? f.B : f.C;
    const char* name = (orientation == GraphOrientation::OverHorizontal) ? "B" : "C";
    Eigen::JacobiSVD<Mat> svd(pivot, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double scale = svd.singularValues()(0);
    if (svd.singularValues()(pivot.rows() - 1) <= resolve_tol(tol, scale) * 1e3)
        throw DomainError(std::string("graph_form: block ") + name +
                          " is singular, frame is not a graph in this orientation");
    const Mat A = (orientation == GraphOrientation::OverHorizontal)
                      ? Mat(f.C * svd.solve(Mat::Identity(f.n(), f.n())))
                      : Mat(f.B * svd.solve(Mat::Identity(f.n(), f.n())));
    return {0.5 * (A + A.transpose()), orientation};
}

int varkappa_frames(const LagrangianFrame& l1, const LagrangianFrame& l2, Rng& rng, double tol) {
    require_same_base(l1, l2);
    require_valid(l1, tol, "varkappa_frames");
    require_valid(l2, tol, "varkappa_frames");
    const int n = l1.n();
    constexpr int kMaxDraws = 32;
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
        // Shear (x, v) -> (x, v - Sx) fixes the vertical subspace and moves the
        // horizontal { (w, Sw) } to the coordinate horizontal.
        const Mat S = (attempt == 0) ? Mat::Zero(n, n) : rng.sym_matrix(n);
        const Mat C1 = l1.C - S * l1.B;
        const Mat C2 = l2.C - S * l2.B;
        Eigen::FullPivLU<Mat> lu1(C1), lu2(C2);
        const double t1 = resolve_tol(tol, C1.norm()) * 1e3;
        const double t2 = resolve_tol(tol, C2.norm()) * 1e3;
        if (std::abs(lu1.determinant()) < t1 || std::abs(lu2.determinant()) < t2) continue;
        Mat A1 = l1.B * lu1.inverse();
        Mat A2 = l2.B * lu2.inverse();
        A1 = 0.5 * (A1 + A1.transpose());
        A2 = 0.5 * (A2 + A2.transpose());
        const GraphIndexResult g = kashiwara_graphs(A1, A2, tol);
        const int direct = kashiwara_direct(l1, l2, tol);
        if (g.kappa != direct)
            throw NumericsError("varkappa_frames: graph arithmetic disagrees with the direct signature");
        return g.varkappa;
    }
    throw DomainError("varkappa_frames: no transversal horizontal found after retries");
}

}  // namespace fiocalc
