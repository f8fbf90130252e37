#include "fiocalc/phase.hpp"

#include <Eigen/LU>

namespace fiocalc {

PhaseJet phase_jet(const PhaseSpec& spec, const Vec& y, const Vec& eta) {
    if (eta.norm() == 0.0) throw DomainError("phase_jet: eta = 0");
    spec.map.require_in_domain(y, eta);
    const auto [xs, xis] = spec.map.eval(y, eta);
    const JacBlocks J = spec.map.jac(y, eta);
    const int n = spec.map.n;

    PhaseJet jet;
    jet.y = y;
    jet.eta = eta;
    jet.xstar = xs;
    jet.xistar = xis;
    jet.xstar_eta = J.Xe;

    const CMat Se = J.Se.cast<Complex>();
    const CMat Xe = J.Xe.cast<Complex>();
    if (spec.kind == PhaseKind::RealChart) {
        jet.xx = CMat::Zero(n, n);
        jet.xe = Se;
    } else {
        jet.xx = Complex(0, 1) * eta.norm() * CMat::Identity(n, n);
        jet.xe = Se - jet.xx * Xe;
    }
    jet.ee = -Xe.transpose() * jet.xe;
    return jet;
}

Complex phase_value(const PhaseSpec& spec, const Vec& x, const Vec& y, const Vec& eta) {
    const auto [xs, xis] = spec.map.eval(y, eta);
    const Vec d = x - xs;
    Complex phi = d.dot(xis);
    if (spec.kind == PhaseKind::Gaussian) phi += Complex(0, 0.5) * eta.norm() * d.squaredNorm();
    return phi;
}

CVec phase_eta_gradient(const PhaseSpec& spec, const Vec& x, const Vec& y, const Vec& eta) {
    const auto [xs, xis] = spec.map.eval(y, eta);
    const JacBlocks J = spec.map.jac(y, eta);
    const Vec d = x - xs;
    // d/deta_k [ (x - xstar).xistar ] = -xstar_{eta_k}.xistar + (x - xstar).xistar_{eta_k}
    CVec g = (J.Se.transpose() * d - J.Xe.transpose() * xis).cast<Complex>();
    if (spec.kind == PhaseKind::Gaussian) {
        const double r = eta.norm();
        g += Complex(0, 0.5) * (d.squaredNorm() / r) * eta.cast<Complex>();
        g += Complex(0, -1.0) * r * (J.Xe.transpose() * d).cast<Complex>();
    }
    return g;
}

PhaseReport validate_phase(const PhaseSpec& spec, const std::vector<std::pair<Vec, Vec>>& samples,
                           double tol) {
    PhaseReport rep;
    const double thresh = resolve_tol(tol, 1.0);
    const int n = spec.map.n;
    double min_margin = 1e300;
    for (const auto& [y, eta] : samples) {
        const auto [xs, xis] = spec.map.eval(y, eta);
        // Off-diagonal probe points at a few offsets from xstar.
        for (int dir = 0; dir < n; ++dir) {
            Vec x = xs;
            x[dir] += 0.2 * (dir % 2 ? -1.0 : 1.0);

            // Degree-one homogeneity through the Euler identity eta.phi_eta = phi.
            const Complex phi = phase_value(spec, x, y, eta);
            const CVec ge = phase_eta_gradient(spec, x, y, eta);
            const Complex euler = eta.cast<Complex>().dot(ge) - phi;
            rep.homogeneity = std::max(rep.homogeneity, std::abs(euler));

            // Quadratic remainder of phi - (x - xstar).xistar near xstar,
            // checked at two scales of a five-point offset stencil.
            const Vec u = (x - xs).normalized();
            double worst = 0.0;
            for (double h : {1e-4, 5e-5}) {
                for (double s : {-2.0, -1.0, 1.0, 2.0}) {
                    const Vec xp = xs + (s * h) * u;
                    const Complex r = phase_value(spec, xp, y, eta) -
                                      Complex((xp - xs).dot(xis), 0.0);
                    worst = std::max(worst, std::abs(r) / ((s * h) * (s * h)));
                }
            }
            // Bounded remainder/|x-xstar|^2 is the pass criterion; the scale
            // of phi_xx bounds it from above for the two built-in kinds.
            rep.expansion = std::max(rep.expansion, worst / std::max(1.0, eta.norm()));
        }
        const PhaseJet jet = phase_jet(spec, y, eta);
        const double det = std::abs(jet.xe.determinant());
        const double scale = std::pow(jet.xe.norm() / std::sqrt(static_cast<double>(n)), n);
        min_margin = std::min(min_margin, det / std::max(scale, 1e-300));
    }
    rep.nondegeneracy = min_margin;
    rep.homogeneity_ok = rep.homogeneity < thresh * 1e3;
    rep.expansion_ok = rep.expansion < 10.0;  // remainder stays quadratically bounded
    rep.nondegeneracy_ok = rep.nondegeneracy > 1e3 * thresh;
    rep.pass = rep.homogeneity_ok && rep.expansion_ok && rep.nondegeneracy_ok;
    return rep;
}

double complex_nondegeneracy_check(const PhaseSpec& spec,
                                   const std::vector<std::pair<Vec, Vec>>& samples) {
    if (spec.kind != PhaseKind::Gaussian)
        throw ValidationError("complex_nondegeneracy_check: gaussian phase required");
    double margin = 1e300;
    for (const auto& [y, eta] : samples) {
        const PhaseJet jet = phase_jet(spec, y, eta);
        margin = std::min(margin, std::abs(jet.xe.determinant()));
    }
    return margin;
}

LagrangianFrame horizontal_of_phase(const PhaseSpec& spec, const Vec& y, const Vec& eta) {
    const PhaseJet jet = phase_jet(spec, y, eta);
    const int n = spec.map.n;
    return {Mat::Identity(n, n), Mat(-jet.xx.real()), BasePoint{jet.xstar, jet.xistar}};
}

}  // namespace fiocalc
