#pragma once

#include "fiocalc/common.hpp"
#include "fiocalc/expr.hpp"
#include "fiocalc/lagrangian.hpp"

#include <memory>
#include <utility>

namespace fiocalc {

struct JacBlocks {
    Mat Xy;  // dxstar/dy
    Mat Xe;  // dxstar/deta
    Mat Sy;  // dxistar/dy
    Mat Se;  // dxistar/deta

    Mat full() const {
        Mat J(2 * Xy.rows(), 2 * Xy.cols());
        J << Xy, Xe, Sy, Se;
        return J;
    }
    static JacBlocks split(const Mat& J) {
        const int n = static_cast<int>(J.rows()) / 2;
        return {J.block(0, 0, n, n), J.block(0, n, n, n), J.block(n, 0, n, n),
                J.block(n, n, n, n)};
    }
};

enum class Provenance { AnalyticCatalog, NumericFlow, Composed };

/// Homogeneous canonical transformation given by evaluation and Jacobian
/// callbacks.  Callbacks must be reentrant.
struct CanonicalMap {
    int n = 0;
    std::string name;
    Provenance provenance = Provenance::AnalyticCatalog;
    std::function<std::pair<Vec, Vec>(const Vec&, const Vec&)> eval;
    std::function<JacBlocks(const Vec&, const Vec&)> jac;
    std::function<bool(const Vec&, const Vec&)> in_domain;  // null: eta != 0 only
    std::shared_ptr<const CanonicalMap> inverse_ptr;        // analytic inverse when available
    /// True when xstar = y + d(eta), xistar = s(eta): kernel synthesis may
    /// cache values by the offset x - y.
    bool translation_invariant = false;

    std::pair<Vec, Vec> operator()(const Vec& y, const Vec& eta) const;
    void require_in_domain(const Vec& y, const Vec& eta) const;
};

/// Residuals of the defining identities sampled over a point list: the
/// symplectic two-form blocks, the one-form, and the Euler identities of
/// degree-one homogeneity.
struct CanonicalReport {
    double two_form_yy = 0.0;     // (Sy' Xy - Xy' Sy)
    double two_form_ee = 0.0;     // (Se' Xe - Xe' Se)
    double two_form_mixed = 0.0;  // (Se' Xy - Xe' Sy - I)
    double euler_x = 0.0;         // Xe eta
    double euler_xi = 0.0;        // Se eta - xistar
    double one_form_e = 0.0;      // Xe' xistar
    double one_form_y = 0.0;      // Xy' xistar - eta
    bool pass = false;

    double max_residual() const;
    std::string worst_identity() const;
};

CanonicalReport validate_canonical(const CanonicalMap& map,
                                   const std::vector<std::pair<Vec, Vec>>& samples,
                                   double tol = -1.0);

/// Frame of the image of the vertical subspace under the differential,
/// B = dxstar/deta, C = dxistar/deta, based at the image point.
LagrangianFrame image_of_vertical(const CanonicalMap& map, const Vec& y, const Vec& eta);

/// Composition: `second` after `first` (apply `first` to the input point).
CanonicalMap compose_maps(const CanonicalMap& first, const CanonicalMap& second);

/// Inverse map: analytic when the catalog provides one, otherwise Newton on
/// eval with Jacobian blocks from the symplectic inverse of the forward
/// differential.
CanonicalMap inverse_map(const CanonicalMap& map);

/// Central finite-difference Jacobian blocks of an eval callback (fallback
/// for user-defined maps without analytic derivatives).
JacBlocks fd_jacobian(const std::function<std::pair<Vec, Vec>(const Vec&, const Vec&)>& eval,
                      const Vec& y, const Vec& eta, double rel_step = 1e-5);

/// Express the map in a new target chart (composes the chart with eval and
/// pushes the Jacobian blocks through, including the curvature terms that a
/// nonlinear chart adds to the covector derivatives).
CanonicalMap conjugate_target_chart(const CanonicalMap& map, const ChartMap& chart);

// ---------------------------------------------------------------------------
// Flow realization
// ---------------------------------------------------------------------------

/// Degree-one homogeneous Hamiltonian with gradient callbacks; realized as a
/// canonical map by a fixed-step implicit-midpoint integration of the
/// Hamilton and variational equations.
struct FlowSpec {
    int n = 0;
    std::function<double(const Vec&, const Vec&)> h;
    std::function<Vec(const Vec&, const Vec&)> h_x;
    std::function<Vec(const Vec&, const Vec&)> h_xi;
    double time = 0.0;
    int steps = 1000;
    double chart_bound = 1e3;  // |x| beyond this aborts with the exit time
};

CanonicalMap flow_map(const FlowSpec& spec);

}  // namespace fiocalc
