#pragma once

#include "fiocalc/canonical.hpp"

namespace fiocalc {

/// The two phase kinds constructed by the library: the chart phase
/// (x - xstar).xistar and the gaussian phase with imaginary quadratic part
/// (|eta|/2)|x - xstar|^2 added.
enum class PhaseKind { RealChart, Gaussian };

struct PhaseSpec {
    PhaseKind kind = PhaseKind::RealChart;
    CanonicalMap map;
    std::string chart_id = "default";
};

/// Second-order data of the phase at x = xstar(y, eta).
struct PhaseJet {
    CMat xx;       // phi_xx
    CMat xe;       // phi_{x eta}
    CMat ee;       // phi_{eta eta}
    Vec y, eta;
    Vec xstar, xistar;
    Mat xstar_eta;
};

PhaseJet phase_jet(const PhaseSpec& spec, const Vec& y, const Vec& eta);

/// Phase value at a general spatial point.
Complex phase_value(const PhaseSpec& spec, const Vec& x, const Vec& y, const Vec& eta);

/// Gradient of the phase in eta at a general spatial point (analytic).
CVec phase_eta_gradient(const PhaseSpec& spec, const Vec& x, const Vec& y, const Vec& eta);

/// Residual report for the defining conditions: degree-one homogeneity,
/// the first-order expansion at xstar, and nondegeneracy of phi_{x eta}.
struct PhaseReport {
    double homogeneity = 0.0;        // Euler identity residual off the diagonal
    double expansion = 0.0;          // quadratic-remainder bound of phi - (x-xstar).xistar
    double nondegeneracy = 1e300;    // min |det phi_xe| / ||phi_xe||^n over samples
    bool homogeneity_ok = false;
    bool expansion_ok = false;
    bool nondegeneracy_ok = false;
    bool pass = false;
};

PhaseReport validate_phase(const PhaseSpec& spec, const std::vector<std::pair<Vec, Vec>>& samples,
                           double tol = -1.0);

/// For gaussian phases: minimum |det phi_xe| margin over the samples
/// (positive-definite imaginary Hessian keeps it away from zero).
double complex_nondegeneracy_check(const PhaseSpec& spec,
                                   const std::vector<std::pair<Vec, Vec>>& samples);

/// Frame of the horizontal subspace the phase induces at the image point:
/// B = I, C = -Re phi_xx.
LagrangianFrame horizontal_of_phase(const PhaseSpec& spec, const Vec& y, const Vec& eta);

}  // namespace fiocalc
