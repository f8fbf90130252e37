#pragma once

#include "fiocalc/symbols.hpp"

namespace fiocalc {

/// Radial and spatial cutoffs of the oscillatory kernel: the kernel is only
/// defined modulo smooth contributions, so frequencies below low_radius are
/// windowed away, and the spatial factor is supported in
/// |x - xstar(y, etahat)| <= spatial_width (identically 1 below half that).
struct CutoffSpec {
    double low_radius = 1.0;
    double spatial_width = 0.3;
};

/// Quadrature layout for the frequency integral in polar form: Gauss-Legendre
/// in |eta| with the window flat through r_flat and rolled off
/// super-exponentially by r_max, uniform (trapezoid) nodes on the circle.
struct QuadSpec {
    int n_radial = 256;
    int n_angular = 256;
    double r_flat = 600.0;
    double r_max = 900.0;

    /// Sized so probes up to lambda_max sit inside the flat window and the
    /// grid resolves the windowed oscillations; `slope` bounds the phase
    /// derivative along the circle per unit radius, `radial_bound` the phase
    /// value at unit radius over the windowed spatial support.
    static QuadSpec for_lambda(int n, double lambda_max, double slope = 1.5,
                               double radial_bound = 0.55);
};

struct KernelSpec {
    CanonicalMap map;
    PhaseKind phase = PhaseKind::RealChart;
    std::function<Complex(const Vec&, const Vec&)> amplitude;  // degree-`order` homogeneous
    double order = 0.0;
    CutoffSpec cutoff;
    QuadSpec quad;
    std::optional<ConicSupport> support;
    /// True when the amplitude does not depend on the base point; required
    /// (together with a translation-invariant map) for offset caching in
    /// compositions.
    bool amplitude_constant = false;
};

/// One value of the synthesized Schwartz kernel.
Complex synthesize_kernel(const KernelSpec& spec, const Vec& x, const Vec& y);

/// Uniform lattice grid: points lo + delta*(i + 1/2) per axis, aligned so
/// that grids sharing `anchor` and `delta` live on a common lattice.
struct GridSpec {
    Vec lo;
    double delta = 0.0;
    std::vector<int> counts;

    std::size_t size() const;
    Vec point(std::size_t flat_index) const;
    static GridSpec lattice(const Vec& anchor, const Vec& lo_corner, const Vec& hi_corner,
                            double delta);
};

/// Kernel values on a spatial grid at a fixed second argument.
struct KernelSlice {
    Vec y0;
    GridSpec grid;
    std::vector<Complex> values;
};

KernelSlice synthesize_slice(const KernelSpec& spec, const Vec& y0, const GridSpec& grid);

struct ExtractionSpec {
    Vec y0;
    Vec eta0;  // unit direction
    double rho_radius = 0.5;
    std::vector<double> lambdas;
    double low_confidence_threshold = 0.08;
};

struct ExtractResult {
    Complex value;
    double error_bar = 0.0;
    double fitted_exponent = 0.0;
    bool low_confidence = false;
    std::vector<double> lambdas;
    std::vector<Complex> normalized;  // probe / (c * rho(x0) * lambda^m)
};

/// Probe the slice against e^{-i lambda x.xi0}, divide out the stationary
/// phase constant, and fit the large-lambda limit with a 1/lambda correction.
ExtractResult extract_symbol(const KernelSlice& slice, const CanonicalMap& assoc_map,
                             double order, const ExtractionSpec& probe);

/// Convenience: synthesize the slice for the spec and extract.
ExtractResult extract_symbol(const KernelSpec& spec, const ExtractionSpec& probe);

/// Kernel of the composition on a grid: star = true gives
/// int conj(V2(z, x)) inner(z) dz, star = false gives int V2(x, z) inner(z) dz.
KernelSlice compose_slice(const KernelSlice& inner, const KernelSpec& outer, bool star,
                          const GridSpec& x_grid);

/// Composition oracle: builds the inner slice of spec1 at probe.y0 on an
/// automatically sized z-grid, composes with spec2, and extracts the symbol
/// of the product kernel with the composed map's constants.
ExtractResult compose_numeric(const KernelSpec& spec1, const KernelSpec& spec2, bool star,
                              const ExtractionSpec& probe);

struct PhaseIndependenceResult {
    double residual = 0.0;
    double combined_error = 0.0;
    Complex value_first;
    Complex value_second;
};

/// |extract(spec_a) - extract(spec_b)| for the same operator data with
/// different phase kinds.
PhaseIndependenceResult phase_independence_residual(const KernelSpec& spec_a,
                                                    const KernelSpec& spec_b,
                                                    const ExtractionSpec& probe);

// ---------------------------------------------------------------------------
// Stationary-set helpers (exposed for the composition diagnostics)
// ---------------------------------------------------------------------------

/// Solve zeta2(x, xi) = target for xi by damped Newton, warm-started at xi0.
Vec xi_hat_solve(const CanonicalMap& map2, const Vec& x, const Vec& target, const Vec& xi0);

/// Value of the composed chart phase
/// (z2(x, xihat) - z1(y, eta)) . zeta1(y, eta).
Complex composed_phase_value(const CanonicalMap& map1, const CanonicalMap& map2, const Vec& x,
                             const Vec& y, const Vec& eta);

/// Signature of the stationary (z, xi)-Hessian [[0, Z],[Z', W]] assembled
/// from the outer map's Jacobian blocks at (x, xihat); zero when Z is
/// nondegenerate.
int compose_stationary_hessian_signature(const CanonicalMap& map2, const Vec& x,
                                         const Vec& xi_hat, double tol = -1.0);

}  // namespace fiocalc
