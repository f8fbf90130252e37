#include "fiocalc/canonical.hpp"

#include <Eigen/LU>

#include <sstream>

namespace fiocalc {

std::pair<Vec, Vec> CanonicalMap::operator()(const Vec& y, const Vec& eta) const {
    require_in_domain(y, eta);
    return eval(y, eta);
}

void CanonicalMap::require_in_domain(const Vec& y, const Vec& eta) const {
    if (eta.norm() == 0.0) throw DomainError(name + ": eta = 0 is outside the conic domain");
    if (in_domain && !in_domain(y, eta)) {
        std::ostringstream os;
        os << name << ": point (y, eta) outside the map domain";
        throw DomainError(os.str());
    }
}

double CanonicalReport::max_residual() const {
    double m = two_form_yy;
    for (double v : {two_form_ee, two_form_mixed, euler_x, euler_xi, one_form_e, one_form_y})
        m = std::max(m, v);
    return m;
}

std::string CanonicalReport::worst_identity() const {
    const std::pair<double, const char*> all[] = {
        {two_form_yy, "two-form-yy"},   {two_form_ee, "two-form-ee"},
        {two_form_mixed, "two-form-mixed"}, {euler_x, "euler-x"},
        {euler_xi, "euler-xi"},         {one_form_e, "one-form-e"},
        {one_form_y, "one-form-y"}};
    const char* worst = all[0].second;
    double m = all[0].first;
    for (const auto& [v, id] : all)
        if (v > m) { m = v; worst = id; }
    return worst;
}

CanonicalReport validate_canonical(const CanonicalMap& map,
                                   const std::vector<std::pair<Vec, Vec>>& samples,
                                   double tol) {
    CanonicalReport rep;
    const int n = map.n;
    const Mat I = Mat::Identity(n, n);
    for (const auto& [y, eta] : samples) {
        map.require_in_domain(y, eta);
        const auto [xs, xis] = map.eval(y, eta);
        const JacBlocks J = map.jac(y, eta);
        rep.two_form_yy = std::max(rep.two_form_yy,
                                   (J.Sy.transpose() * J.Xy - J.Xy.transpose() * J.Sy).norm());
        rep.two_form_ee = std::max(rep.two_form_ee,
                                   (J.Se.transpose() * J.Xe - J.Xe.transpose() * J.Se).norm());
        rep.two_form_mixed = std::max(
            rep.two_form_mixed, (J.Se.transpose() * J.Xy - J.Xe.transpose() * J.Sy - I).norm());
        rep.euler_x = std::max(rep.euler_x, (J.Xe * eta).norm());
        rep.euler_xi = std::max(rep.euler_xi, (J.Se * eta - xis).norm());
        rep.one_form_e = std::max(rep.one_form_e, (J.Xe.transpose() * xis).norm());
        rep.one_form_y = std::max(rep.one_form_y, (J.Xy.transpose() * xis - eta).norm());
    }
    rep.pass = rep.max_residual() < resolve_tol(tol, 1.0);
    return rep;
}

LagrangianFrame image_of_vertical(const CanonicalMap& map, const Vec& y, const Vec& eta) {
    map.require_in_domain(y, eta);
    const auto [xs, xis] = map.eval(y, eta);
    const JacBlocks J = map.jac(y, eta);
    return {J.Xe, J.Se, BasePoint{xs, xis}};
}

CanonicalMap compose_maps(const CanonicalMap& first, const CanonicalMap& second) {
    if (first.n != second.n) throw ValidationError("compose_maps: dimension mismatch");
    CanonicalMap out;
    out.n = first.n;
    out.name = second.name + "*" + first.name;
    out.provenance = Provenance::Composed;
    auto f = std::make_shared<CanonicalMap>(first);
    auto s = std::make_shared<CanonicalMap>(second);
    out.eval = [f, s](const Vec& y, const Vec& eta) {
        const auto [mx, mxi] = (*f)(y, eta);
        return (*s)(mx, mxi);
    };
    out.jac = [f, s](const Vec& y, const Vec& eta) {
        const auto [mx, mxi] = (*f)(y, eta);
        const Mat J = s->jac(mx, mxi).full() * f->jac(y, eta).full();
        return JacBlocks::split(J);
    };
    out.in_domain = [f, s](const Vec& y, const Vec& eta) {
        if (f->in_domain && !f->in_domain(y, eta)) return false;
        const auto [mx, mxi] = f->eval(y, eta);
        return !s->in_domain || s->in_domain(mx, mxi);
    };
    if (first.inverse_ptr && second.inverse_ptr) {
        auto finv = first.inverse_ptr;
        auto sinv = second.inverse_ptr;
        out.inverse_ptr = std::make_shared<CanonicalMap>(compose_maps(*sinv, *finv));
    }
    out.translation_invariant = first.translation_invariant && second.translation_invariant;
    return out;
}

namespace {

/// Inverse of a symplectic block matrix without a linear solve.
Mat symplectic_inverse(const JacBlocks& J) {
    const int n = static_cast<int>(J.Xy.rows());
    Mat inv(2 * n, 2 * n);
    inv.block(0, 0, n, n) = J.Se.transpose();
    inv.block(0, n, n, n) = -J.Xe.transpose();
    inv.block(n, 0, n, n) = -J.Sy.transpose();
    inv.block(n, n, n, n) = J.Xy.transpose();
    return inv;
}

}  // namespace

CanonicalMap inverse_map(const CanonicalMap& map) {
    if (map.inverse_ptr) return *map.inverse_ptr;
    // Newton inversion of eval; Jacobian blocks from the symplectic inverse
    // of the forward differential at the preimage.
    auto fwd = std::make_shared<CanonicalMap>(map);
    auto solve_preimage = [fwd](const Vec& x, const Vec& xi) {
        Vec y = x, eta = xi;
        for (int it = 0; it < 100; ++it) {
            const auto [fx, fxi] = fwd->eval(y, eta);
            Vec r(2 * fwd->n);
            r << fx - x, fxi - xi;
            if (r.norm() < 1e-12 * std::max(1.0, xi.norm())) break;
            const Mat J = fwd->jac(y, eta).full();
            const Vec step = J.partialPivLu().solve(r);
            y -= step.head(fwd->n);
            eta -= step.tail(fwd->n);
        }
        return std::make_pair(y, eta);
    };
    CanonicalMap out;
    out.n = map.n;
    out.name = map.name + "^-1";
    out.provenance = map.provenance;
    out.translation_invariant = map.translation_invariant;
    out.eval = solve_preimage;
    out.jac = [fwd, solve_preimage](const Vec& x, const Vec& xi) {
        const auto [y, eta] = solve_preimage(x, xi);
        return JacBlocks::split(symplectic_inverse(fwd->jac(y, eta)));
    };
    out.inverse_ptr = std::make_shared<CanonicalMap>(map);
    return out;
}

JacBlocks fd_jacobian(const std::function<std::pair<Vec, Vec>(const Vec&, const Vec&)>& eval,
                      const Vec& y, const Vec& eta, double rel_step) {
    const int n = static_cast<int>(y.size());
    JacBlocks J{Mat(n, n), Mat(n, n), Mat(n, n), Mat(n, n)};
    const double hy = rel_step * std::max(1.0, y.norm());
    const double he = rel_step * std::max(1.0, eta.norm());
    for (int k = 0; k < n; ++k) {
        Vec yp = y, ym = y;
        yp[k] += hy;
        ym[k] -= hy;
        const auto [xp, xip] = eval(yp, eta);
        const auto [xm, xim] = eval(ym, eta);
        J.Xy.col(k) = (xp - xm) / (2 * hy);
        J.Sy.col(k) = (xip - xim) / (2 * hy);
        Vec ep = eta, em = eta;
        ep[k] += he;
        em[k] -= he;
        const auto [xpe, xipe] = eval(y, ep);
        const auto [xme, xime] = eval(y, em);
        J.Xe.col(k) = (xpe - xme) / (2 * he);
        J.Se.col(k) = (xipe - xime) / (2 * he);
    }
    return J;
}

CanonicalMap conjugate_target_chart(const CanonicalMap& map, const ChartMap& chart) {
    auto base = std::make_shared<CanonicalMap>(map);
    auto ch = std::make_shared<ChartMap>(chart);
    CanonicalMap out;
    out.n = map.n;
    out.name = map.name + "@" + chart.target_chart_id;
    out.provenance = map.provenance;
    out.in_domain = map.in_domain;
    out.eval = [base, ch](const Vec& y, const Vec& eta) {
        const auto [xs, xis] = (*base)(y, eta);
        const BasePoint p = transform_point({xs, xis, "src"}, *ch);
        return std::make_pair(p.x, p.xi);
    };
    out.jac = [base, ch](const Vec& y, const Vec& eta) {
        const auto [xs, xis] = (*base)(y, eta);
        const JacBlocks J = base->jac(y, eta);
        const Mat Jc = ch->jacobian(xs);
        const Mat Jinv = Jc.partialPivLu().inverse();
        const int n = base->n;
        // xtilde = F(xstar):           d xtilde = Jc dxstar
        // xitilde = Jc(xstar)^-T xistar: product rule adds Hessian terms.
        JacBlocks out_blocks;
        out_blocks.Xy = Jc * J.Xy;
        out_blocks.Xe = Jc * J.Xe;
        Mat Sy = Jinv.transpose() * J.Sy;
        Mat Se = Jinv.transpose() * J.Se;
        if (ch->hessians) {
            const std::vector<Mat> H = ch->hessians(xs);
            const Vec xit = Jinv.transpose() * xis;
            Mat contracted = Mat::Zero(n, n);
            for (int a = 0; a < n; ++a) contracted += xit[a] * H[a];
            // d/dt [Jc(x(t))^-T xi(t)] = Jc^-T dxi - Jc^-T (sum_a (Jc^-T xi)_a H_a) Jc^-1 Jc dx
            const Mat curv = -Jinv.transpose() * contracted;
            Sy += curv * J.Xy;
            Se += curv * J.Xe;
        }
        out_blocks.Sy = Sy;
        out_blocks.Se = Se;
        return out_blocks;
    };
    return out;
}

// ---------------------------------------------------------------------------
// Flow integrator: implicit midpoint on the Hamilton equations, with the
// variational system advanced by the same scheme so the Jacobian blocks are
// the exact derivative of the discrete flow (up to the fixed-point and
// finite-difference tolerances).
// ---------------------------------------------------------------------------

namespace {

struct FlowField {
    const FlowSpec* spec;

    Vec state_rhs(const Vec& z) const {
        const int n = spec->n;
        const Vec x = z.head(n), xi = z.tail(n);
        Vec out(2 * n);
        out.head(n) = spec->h_xi(x, xi);
        out.tail(n) = -spec->h_x(x, xi);
        return out;
    }

    /// Linearization of the Hamilton field by central differences of the
    /// gradient callbacks.
    Mat linearization(const Vec& z) const {
        const int n = spec->n;
        const Vec x = z.head(n), xi = z.tail(n);
        Mat A(2 * n, 2 * n);
        const double hx = 1e-6 * std::max(1.0, x.norm());
        const double he = 1e-6 * std::max(1.0, xi.norm());
        for (int k = 0; k < n; ++k) {
            Vec xp = x, xm = x;
            xp[k] += hx;
            xm[k] -= hx;
            A.col(k).head(n) = (spec->h_xi(xp, xi) - spec->h_xi(xm, xi)) / (2 * hx);
            A.col(k).tail(n) = -(spec->h_x(xp, xi) - spec->h_x(xm, xi)) / (2 * hx);
            Vec ep = xi, em = xi;
            ep[k] += he;
            em[k] -= he;
            A.col(n + k).head(n) = (spec->h_xi(x, ep) - spec->h_xi(x, em)) / (2 * he);
            A.col(n + k).tail(n) = -(spec->h_x(x, ep) - spec->h_x(x, em)) / (2 * he);
        }
        return A;
    }
};

struct FlowResult {
    Vec z;
    Mat M;
};

FlowResult integrate_flow(const FlowSpec& spec, const Vec& y, const Vec& eta) {
    const int n = spec.n;
    const int steps = std::max(1, spec.steps);
    const double dt = spec.time / steps;
    FlowField field{&spec};

    Vec z(2 * n);
    z << y, eta;
    Mat M = Mat::Identity(2 * n, 2 * n);
    for (int k = 0; k < steps; ++k) {
        // Fixed-point solve for the midpoint state.
        Vec zmid = z + 0.5 * dt * field.state_rhs(z);
        for (int it = 0; it < 64; ++it) {
            const Vec next = z + 0.5 * dt * field.state_rhs(zmid);
            const double delta = (next - zmid).norm();
            zmid = next;
            if (delta < 1e-14 * std::max(1.0, z.norm())) break;
        }
        z = 2.0 * zmid - z;
        if (z.head(n).norm() > spec.chart_bound) {
            std::ostringstream os;
            os << "flow_map: trajectory left the chart at t = " << (k + 1) * dt;
            throw DomainError(os.str());
        }
        // Midpoint step of the variational system: (I - dt/2 A) M' = (I + dt/2 A) M.
        const Mat A = field.linearization(zmid);
        const Mat lhs = Mat::Identity(2 * n, 2 * n) - 0.5 * dt * A;
        const Mat rhs = Mat::Identity(2 * n, 2 * n) + 0.5 * dt * A;
        M = lhs.partialPivLu().solve(rhs * M);
    }
    return {z, M};
}

}  // namespace

CanonicalMap flow_map(const FlowSpec& spec) {
    if (!spec.h || !spec.h_x || !spec.h_xi)
        throw ValidationError("flow_map: hamiltonian callbacks missing");
    auto sp = std::make_shared<FlowSpec>(spec);

    // Euler identity of degree-one homogeneity checked on a few rays.
    {
        Rng probe(20240u);
        for (int k = 0; k < 4; ++k) {
            const Vec x = probe.vector(spec.n);
            const Vec xi = probe.unit_vector(spec.n) * probe.uniform(0.5, 2.0);
            const double h = spec.h(x, xi);
            const double euler = spec.h_xi(x, xi).dot(xi) - h;
            if (std::abs(euler) > 1e-6 * std::max(1.0, std::abs(h)))
                throw ValidationError("flow_map: hamiltonian is not homogeneous of degree one");
        }
    }

    CanonicalMap out;
    out.n = spec.n;
    out.provenance = Provenance::NumericFlow;
    {
        std::ostringstream os;
        os << "flow(t=" << spec.time << ")";
        out.name = os.str();
    }
    out.eval = [sp](const Vec& y, const Vec& eta) {
        const FlowResult r = integrate_flow(*sp, y, eta);
        return std::make_pair(Vec(r.z.head(sp->n)), Vec(r.z.tail(sp->n)));
    };
    out.jac = [sp](const Vec& y, const Vec& eta) {
        const FlowResult r = integrate_flow(*sp, y, eta);
        return JacBlocks::split(r.M);
    };
    FlowSpec rev = spec;
    rev.time = -spec.time;
    auto revspec = std::make_shared<FlowSpec>(rev);
    auto inv = std::make_shared<CanonicalMap>();
    inv->n = spec.n;
    inv->provenance = Provenance::NumericFlow;
    inv->name = "flow(t=" + std::to_string(-spec.time) + ")";
    inv->eval = [revspec](const Vec& y, const Vec& eta) {
        const FlowResult r = integrate_flow(*revspec, y, eta);
        return std::make_pair(Vec(r.z.head(revspec->n)), Vec(r.z.tail(revspec->n)));
    };
    inv->jac = [revspec](const Vec& y, const Vec& eta) {
        const FlowResult r = integrate_flow(*revspec, y, eta);
        return JacBlocks::split(r.M);
    };
    out.inverse_ptr = inv;
    return out;
}

}  // namespace fiocalc
