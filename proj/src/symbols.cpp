#include "fiocalc/symbols.hpp"

#include "fiocalc/catalog.hpp"

#include <Eigen/LU>

namespace fiocalc {

namespace {

double angle_of(const Vec& eta) {
    if (eta.size() == 1) return eta[0] >= 0 ? 0.0 : M_PI;
    return std::atan2(eta[1], eta[0]);
}

double circ_dist(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2 * M_PI);
    return std::min(d, 2 * M_PI - d);
}

}  // namespace

bool ConicSupport::contains(const Vec& y, const Vec& eta) const {
    for (int i = 0; i < y.size(); ++i)
        if (y[i] < y_lo[i] || y[i] > y_hi[i]) return false;
    if (angle_halfwidth >= M_PI) return true;
    return circ_dist(angle_of(eta), angle_center) <= angle_halfwidth;
}

std::optional<ConicSupport> ConicSupport::intersect(const ConicSupport& a, const ConicSupport& b) {
    ConicSupport out = a;
    for (int i = 0; i < a.y_lo.size(); ++i) {
        out.y_lo[i] = std::max(a.y_lo[i], b.y_lo[i]);
        out.y_hi[i] = std::min(a.y_hi[i], b.y_hi[i]);
        if (out.y_lo[i] > out.y_hi[i]) return std::nullopt;
    }
    if (a.angle_halfwidth >= M_PI) {
        out.angle_center = b.angle_center;
        out.angle_halfwidth = b.angle_halfwidth;
        return out;
    }
    if (b.angle_halfwidth >= M_PI) return out;
    const double d = circ_dist(a.angle_center, b.angle_center);
    if (d > a.angle_halfwidth + b.angle_halfwidth) return std::nullopt;
    // Coarse arc intersection: align b's center next to a's and clip.
    double cb = b.angle_center;
    while (cb - a.angle_center > M_PI) cb -= 2 * M_PI;
    while (cb - a.angle_center < -M_PI) cb += 2 * M_PI;
    const double lo = std::max(a.angle_center - a.angle_halfwidth, cb - b.angle_halfwidth);
    const double hi = std::min(a.angle_center + a.angle_halfwidth, cb + b.angle_halfwidth);
    out.angle_center = 0.5 * (lo + hi);
    out.angle_halfwidth = std::max(0.0, 0.5 * (hi - lo));
    return out;
}

ConicSupport ConicSupport::map_through(const CanonicalMap& map, int samples_per_dim) const {
    ConicSupport out;
    const int n = static_cast<int>(y_lo.size());
    out.y_lo = Vec::Constant(n, 1e300);
    out.y_hi = Vec::Constant(n, -1e300);
    double ang_lo = 1e300, ang_hi = -1e300;
    const int m = std::max(2, samples_per_dim);
    std::vector<double> angles;
    if (angle_halfwidth >= M_PI) {
        for (int k = 0; k < 8; ++k) angles.push_back(k * M_PI / 4);
    } else {
        for (int k = 0; k < m; ++k)
            angles.push_back(angle_center - angle_halfwidth +
                             2.0 * angle_halfwidth * k / (m - 1));
    }
    const int cells = (n == 1) ? m : m * m;
    for (int cell = 0; cell < cells; ++cell) {
        Vec y(n);
        y[0] = y_lo[0] + (y_hi[0] - y_lo[0]) * (cell % m) / (m - 1.0);
        if (n == 2) y[1] = y_lo[1] + (y_hi[1] - y_lo[1]) * (cell / m) / (m - 1.0);
        for (double th : angles) {
            Vec eta(n);
            if (n == 1) eta[0] = std::cos(th) >= 0 ? 1.0 : -1.0;
            else eta << std::cos(th), std::sin(th);
            const auto [xs, xis] = map.eval(y, eta);
            for (int d = 0; d < n; ++d) {
                out.y_lo[d] = std::min(out.y_lo[d], xs[d]);
                out.y_hi[d] = std::max(out.y_hi[d], xs[d]);
            }
            double a = angle_of(xis);
            if (!angles.empty() && a < ang_lo - M_PI) a += 2 * M_PI;
            ang_lo = std::min(ang_lo, a);
            ang_hi = std::max(ang_hi, a);
        }
    }
    // Pad the box; directions widen by half the sampled arc spacing.
    const Vec pad = 0.1 * (out.y_hi - out.y_lo).cwiseAbs() + Vec::Constant(n, 1e-6);
    out.y_lo -= pad;
    out.y_hi += pad;
    out.angle_center = 0.5 * (ang_lo + ang_hi);
    out.angle_halfwidth = std::min(M_PI, 0.75 * (ang_hi - ang_lo) + 0.2);
    return out;
}

Complex singular_from_amplitude(const std::function<Complex(const Vec&, const Vec&)>& p_m,
                                const PhaseSpec& phase, const Vec& y, const Vec& eta,
                                double tol) {
    const PhaseJet jet = phase_jet(phase, y, eta);
    const double ths = theta_s(jet, tol);
    return ipow(-ths) * p_m(y, eta);
}

Complex classical_branch(const PrincipalSymbol& s, const Path& path_from_anchor, const Vec& y,
                         const Vec& eta, int samples, double tol) {
    const auto [ye, ee] = path_from_anchor.at(1.0);
    if ((ye - y).norm() > 1e-8 || (ee - eta).norm() > 1e-8 * std::max(1.0, eta.norm()))
        throw ValidationError("classical_branch: path endpoint differs from the query point");
    PhaseSpec spec{PhaseKind::Gaussian, s.map, "default"};
    TrackOptions opts;
    opts.samples = samples;
    opts.tol = tol;
    const BranchState st = track_branch(spec, path_from_anchor, opts);
    const long theta = st.theta_phi.back();
    const PhaseJet jet = phase_jet(spec, y, eta);
    return ipow(-theta) * ipow(-theta_s(jet, tol)) * s.amp(y, eta);
}

int composition_index(const CanonicalMap& map1, const CanonicalMap& map2, const Vec& y,
                      const Vec& eta, Rng& rng, double tol) {
    const auto [px, pxi] = map1(y, eta);
    const LagrangianFrame l1 = image_of_vertical(map1, y, eta);
    const CanonicalMap inv2 = inverse_map(map2);
    const auto [wy, weta] = inv2(px, pxi);
    const LagrangianFrame l2 = image_of_vertical(map2, wy, weta);
    return varkappa_frames(l1, l2, rng, tol);
}

SymbolValue star_composition(const PrincipalSymbol& s1, const PrincipalSymbol& s2, const Vec& y,
                             const Vec& eta, Rng& rng, double tol) {
    const int k = composition_index(s1.map, s2.map, y, eta, rng, tol);
    const CanonicalMap composed = compose_maps(s1.map, inverse_map(s2.map));
    const auto [qy, qeta] = composed(y, eta);
    SymbolValue out;
    out.value = ipow(static_cast<long>(k)) * s1.amp(y, eta) * std::conj(s2.amp(qy, qeta));
    out.order = s1.order + s2.order;
    out.index = k;
    if (s1.support && s2.support) {
        const CanonicalMap inv = inverse_map(composed);
        out.support = ConicSupport::intersect(*s1.support, s2.support->map_through(inv));
    }
    return out;
}

AdjointValue adjoint_symbol(const PrincipalSymbol& s, const Vec& x, const Vec& xi, Rng& rng,
                            double tol) {
    // The adjoint lives over the inverse transformation; evaluate at the
    // preimage point theta with map(theta) = (x, xi).
    const CanonicalMap inv = inverse_map(s.map);
    const auto [y, eta] = inv(x, xi);

    PrincipalSymbol one;
    one.order = 0.0;
    one.amplitude = [](const Vec&, const Vec&) { return Complex(1.0, 0.0); };
    one.map = identity_map(s.map.n);

    const SymbolValue star = star_composition(one, s, x, xi, rng, tol);
    AdjointValue out;
    out.value_step_arithmetic = star.value;
    out.index_step_arithmetic = star.index;
    out.value_conjugate_only = std::conj(s.amp(y, eta));
    out.index_difference = star.index;
    return out;
}

SymbolValue composition_symbol(const PrincipalSymbol& s1, const PrincipalSymbol& s2, const Vec& y,
                               const Vec& eta, Rng& rng, double tol) {
    const CanonicalMap inv2 = inverse_map(s2.map);
    const int k = composition_index(s1.map, inv2, y, eta, rng, tol);
    const auto [my, meta] = s1.map(y, eta);
    SymbolValue out;
    out.value = ipow(static_cast<long>(k)) * s1.amp(y, eta) * s2.amp(my, meta);
    out.order = s1.order + s2.order;
    out.index = k;
    if (s1.support && s2.support) {
        const CanonicalMap inv1 = inverse_map(s1.map);
        out.support = ConicSupport::intersect(*s1.support, s2.support->map_through(inv1));
    }
    return out;
}

Complex egorov_symbol(const PrincipalSymbol& s1, const PrincipalSymbol& s2,
                      const std::function<Complex(const Vec&, const Vec&)>& a_symbol,
                      const Path& path_from_anchor, const Vec& y, const Vec& eta, int samples,
                      double tol) {
    const Complex sig1 = classical_branch(s1, path_from_anchor, y, eta, samples, tol);
    const Complex sig2 = classical_branch(s2, path_from_anchor, y, eta, samples, tol);
    const auto [my, meta] = s1.map(y, eta);
    return sig1 * a_symbol(my, meta) * std::conj(sig2);
}

}  // namespace fiocalc
