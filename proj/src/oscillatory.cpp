#include "fiocalc/oscillatory.hpp"

#include "fiocalc/inertia.hpp"

#include <Eigen/LU>

#include <numeric>
#include <sstream>

namespace fiocalc {

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

double radial_window(double r, const CutoffSpec& cut, const QuadSpec& quad) {
    double w = smooth_step((r - 0.5 * cut.low_radius) / (0.5 * cut.low_radius));
    if (r > quad.r_flat) {
        const double width = std::max(1e-9, (quad.r_max - quad.r_flat) / 2.2);
        const double u = (r - quad.r_flat) / width;
        w *= std::exp(-u * u * u * u);
    }
    return w;
}

struct RadialRule {
    std::vector<double> r;
    std::vector<double> weight;  // gl weight * window * r^(n-1+m)
};

RadialRule make_radial_rule(int n, double order, const CutoffSpec& cut, const QuadSpec& quad) {
    std::vector<double> gx, gw;
    gauss_legendre(quad.n_radial, gx, gw);
    const double a = 0.5 * cut.low_radius;
    const double b = quad.r_max;
    RadialRule rule;
    rule.r.resize(quad.n_radial);
    rule.weight.resize(quad.n_radial);
    for (int k = 0; k < quad.n_radial; ++k) {
        const double r = 0.5 * (a + b) + 0.5 * (b - a) * gx[k];
        rule.r[k] = r;
        rule.weight[k] = 0.5 * (b - a) * gw[k] * radial_window(r, cut, quad) *
                         std::pow(r, n - 1 + order);
    }
    return rule;
}

/// Per-direction data reused across spatial points at a fixed base point.
struct DirectionData {
    Vec omega;
    double ang_weight = 0.0;
    Vec xstar, xistar;
    Mat xe, se;
    Complex p;
    bool skip = false;
};

/// Evaluates the kernel at many x for a fixed second argument: the radial
/// rule is shared, the per-direction map data is rebuilt when y changes.
class KernelEngine {
public:
    KernelEngine(const KernelSpec& spec, std::shared_ptr<const RadialRule> rule)
        : spec_(&spec), rule_(std::move(rule)) {}

    void set_y(const Vec& y) {
        y_ = y;
        const int n = spec_->map.n;
        dirs_.clear();
        if (n == 1) {
            for (double s : {1.0, -1.0}) {
                DirectionData d;
                d.omega = Vec::Constant(1, s);
                d.ang_weight = 1.0;
                dirs_.push_back(std::move(d));
            }
        } else {
            dirs_.resize(spec_->quad.n_angular);
            for (int j = 0; j < spec_->quad.n_angular; ++j) {
                const double th = 2.0 * M_PI * j / spec_->quad.n_angular;
                dirs_[j].omega = Vec(2);
                dirs_[j].omega << std::cos(th), std::sin(th);
                dirs_[j].ang_weight = 2.0 * M_PI / spec_->quad.n_angular;
            }
        }
        for (auto& d : dirs_) {
            if (spec_->support && !spec_->support->contains(y, d.omega)) {
                d.skip = true;
                continue;
            }
            const auto [xs, xis] = spec_->map.eval(y, d.omega);
            const JacBlocks J = spec_->map.jac(y, d.omega);
            d.xstar = xs;
            d.xistar = xis;
            d.xe = J.Xe;
            d.se = J.Se;
            d.p = spec_->amplitude(y, d.omega);
            if (std::abs(d.p) == 0.0) d.skip = true;
        }
    }

    /// Distance from x to the nearest stationary point over directions;
    /// cheap pre-filter for composition sums.
    double stationary_distance(const Vec& x) const {
        double dist = 1e300;
        for (const auto& d : dirs_) {
            if (d.skip) continue;
            dist = std::min(dist, (x - d.xstar).norm());
        }
        return dist;
    }

    Complex eval(const Vec& x) const {
        Complex total(0, 0);
        for (const auto& d : dirs_) {
            if (d.skip) continue;
            const Vec diff = x - d.xstar;
            const double window = bump(diff.norm() / spec_->cutoff.spatial_width);
            if (window == 0.0) continue;
            Complex b(diff.dot(d.xistar), 0.0);
            CMat xe = d.se.cast<Complex>();
            if (spec_->phase == PhaseKind::Gaussian) {
                b += Complex(0, 0.5) * diff.squaredNorm();
                xe += Complex(0, 1) * (diff * d.omega.transpose() - d.xe).cast<Complex>();
            }
            const double amp = window * std::sqrt(std::abs(xe.determinant()));
            Complex radial(0, 0);
            for (std::size_t k = 0; k < rule_->r.size(); ++k) {
                const double r = rule_->r[k];
                radial += rule_->weight[k] * std::exp(Complex(-r * b.imag(), r * b.real()));
            }
            total += d.ang_weight * d.p * amp * radial;
        }
        return total * std::pow(2.0 * M_PI, -spec_->map.n);
    }

private:
    const KernelSpec* spec_;
    std::shared_ptr<const RadialRule> rule_;
    std::vector<DirectionData> dirs_;
    Vec y_;
};

std::shared_ptr<const RadialRule> shared_rule(const KernelSpec& spec) {
    return std::make_shared<RadialRule>(
        make_radial_rule(spec.map.n, spec.order, spec.cutoff, spec.quad));
}

}  // namespace

QuadSpec QuadSpec::for_lambda(int n, double lambda_max, double slope, double radial_bound) {
    QuadSpec q;
    q.r_flat = std::max(1.5 * lambda_max, lambda_max + 60.0);
    q.r_max = q.r_flat + 2.2 * (0.35 * q.r_flat);
    const double radial_cycles = q.r_max * radial_bound / (2.0 * M_PI);
    q.n_radial = std::max(160, static_cast<int>(4.5 * radial_cycles));
    if (n == 1) {
        q.n_angular = 2;
    } else {
        const double ang_cycles = q.r_max * slope / (2.0 * M_PI);
        q.n_angular = std::max(256, 16 * static_cast<int>(std::ceil(4.2 * ang_cycles / 16.0)));
    }
    return q;
}

Complex synthesize_kernel(const KernelSpec& spec, const Vec& x, const Vec& y) {
    KernelEngine engine(spec, shared_rule(spec));
    engine.set_y(y);
    return engine.eval(x);
}

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int c : counts) s *= static_cast<std::size_t>(c);
    return s;
}

Vec GridSpec::point(std::size_t flat) const {
    Vec p(lo.size());
    for (std::size_t d = 0; d < static_cast<std::size_t>(lo.size()); ++d) {
        const std::size_t c = static_cast<std::size_t>(counts[d]);
        p[d] = lo[d] + delta * (0.5 + static_cast<double>(flat % c));
        flat /= c;
    }
    return p;
}

GridSpec GridSpec::lattice(const Vec& anchor, const Vec& lo_corner, const Vec& hi_corner,
                           double delta) {
    GridSpec g;
    g.delta = delta;
    g.lo = lo_corner;
    g.counts.resize(lo_corner.size());
    for (int d = 0; d < lo_corner.size(); ++d) {
        // Snap to the lattice anchored at `anchor` so that grids sharing the
        // anchor have exactly representable point differences.
        const double steps = std::floor((lo_corner[d] - anchor[d]) / delta);
        g.lo[d] = anchor[d] + delta * steps;
        g.counts[d] = static_cast<int>(std::ceil((hi_corner[d] - g.lo[d]) / delta));
        g.counts[d] = std::max(g.counts[d], 1);
    }
    return g;
}

KernelSlice synthesize_slice(const KernelSpec& spec, const Vec& y0, const GridSpec& grid) {
    auto rule = shared_rule(spec);
    KernelEngine engine(spec, rule);
    engine.set_y(y0);

    KernelSlice slice;
    slice.y0 = y0;
    slice.grid = grid;
    slice.values.assign(grid.size(), Complex(0, 0));
    parallel_for(grid.size(), [&](std::size_t i) { slice.values[i] = engine.eval(grid.point(i)); });
    return slice;
}

namespace {

double probe_weight(const Vec& x, const Vec& x0, double radius) {
    return bump((x - x0).norm() / radius, 0.45);
}

struct FitResult {
    Complex limit;
    Complex slope;
    double residual = 0.0;
};

FitResult fit_with_inverse_lambda(const std::vector<double>& lambdas,
                                  const std::vector<Complex>& values) {
    // Least squares for v ~ s + c / lambda.
    const std::size_t k = lambdas.size();
    double a11 = static_cast<double>(k), a12 = 0.0, a22 = 0.0;
    Complex b1(0, 0), b2(0, 0);
    for (std::size_t i = 0; i < k; ++i) {
        const double u = 1.0 / lambdas[i];
        a12 += u;
        a22 += u * u;
        b1 += values[i];
        b2 += values[i] * u;
    }
    const double det = a11 * a22 - a12 * a12;
    FitResult out;
    out.limit = (a22 * b1 - a12 * b2) / det;
    out.slope = (a11 * b2 - a12 * b1) / det;
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const Complex r = values[i] - out.limit - out.slope / lambdas[i];
        ss += std::norm(r);
    }
    out.residual = std::sqrt(ss / k);
    return out;
}

}  // namespace

ExtractResult extract_symbol(const KernelSlice& slice, const CanonicalMap& assoc_map,
                             double order, const ExtractionSpec& probe) {
    if (probe.lambdas.size() < 3)
        throw ValidationError("extract_symbol: need at least three probe frequencies");
    const auto [x0, xi0] = assoc_map(probe.y0, probe.eta0);
    const JacBlocks J = assoc_map.jac(probe.y0, probe.eta0);
    const Mat cross = J.Xe.transpose() * J.Se;
    const int km = inertia(Mat(0.5 * (cross + cross.transpose())), 1e-7).kappa_minus;
    const double det_se = std::abs(J.Se.determinant());
    if (det_se < 1e-10)
        throw DomainError("extract_symbol: det xistar_eta vanishes in the probe chart");

    const double dv = std::pow(slice.grid.delta, slice.grid.lo.size());
    ExtractResult out;
    out.lambdas = probe.lambdas;
    out.normalized.resize(probe.lambdas.size());

    std::vector<Complex> probes(probe.lambdas.size(), Complex(0, 0));
    parallel_for(probe.lambdas.size(), [&](std::size_t li) {
        const double lam = probe.lambdas[li];
        Complex acc(0, 0);
        for (std::size_t i = 0; i < slice.grid.size(); ++i) {
            const Vec x = slice.grid.point(i);
            const double w = probe_weight(x, x0, probe.rho_radius);
            if (w == 0.0) continue;
            const double ph = -lam * x.dot(xi0);
            acc += w * slice.values[i] * Complex(std::cos(ph), std::sin(ph));
        }
        probes[li] = acc * dv;
    });

    for (std::size_t li = 0; li < probe.lambdas.size(); ++li) {
        const double lam = probe.lambdas[li];
        // Quarter-phase exponent: kappa_minus of xstar_eta' xistar_eta with
        // the sign fixed by direct quadrature of the translation kernels
        // (see the extraction tests).
        const Complex c = std::polar(1.0, -lam * x0.dot(xi0)) * ipow(static_cast<long>(-km)) /
                          std::sqrt(det_se);
        out.normalized[li] = probes[li] / (c * std::pow(lam, order));
    }

    const FitResult fit = fit_with_inverse_lambda(probe.lambdas, out.normalized);
    out.value = fit.limit;
    out.error_bar = fit.residual;
    out.low_confidence = fit.residual > probe.low_confidence_threshold * std::abs(fit.limit);

    // Scaling exponent of |probe| against lambda.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t li = 0; li < probe.lambdas.size(); ++li) {
        const double lx = std::log(probe.lambdas[li]);
        const double ly = std::log(std::abs(out.normalized[li]) *
                                   std::pow(probe.lambdas[li], order) + 1e-300);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double kcount = static_cast<double>(probe.lambdas.size());
    out.fitted_exponent = (kcount * sxy - sx * sy) / (kcount * sxx - sx * sx);
    return out;
}

namespace {

GridSpec probe_grid(const CanonicalMap& assoc_map, const ExtractionSpec& probe, double delta) {
    const auto [x0, xi0] = assoc_map(probe.y0, probe.eta0);
    const int n = static_cast<int>(x0.size());
    const Vec pad = Vec::Constant(n, probe.rho_radius + 2 * delta);
    return GridSpec::lattice(probe.y0, x0 - pad, x0 + pad, delta);
}

double grid_delta(const QuadSpec& quad, double lambda_max) {
    return 0.85 * M_PI / (quad.r_max + lambda_max);
}

}  // namespace

ExtractResult extract_symbol(const KernelSpec& spec, const ExtractionSpec& probe) {
    const double lam_max = *std::max_element(probe.lambdas.begin(), probe.lambdas.end());
    const double delta = grid_delta(spec.quad, lam_max);
    const GridSpec grid = probe_grid(spec.map, probe, delta);
    const KernelSlice slice = synthesize_slice(spec, probe.y0, grid);
    return extract_symbol(slice, spec.map, spec.order, probe);
}

KernelSlice compose_slice(const KernelSlice& inner, const KernelSpec& outer, bool star,
                          const GridSpec& x_grid) {
    const int n = outer.map.n;
    if (std::abs(inner.grid.delta - x_grid.delta) > 1e-12)
        throw ValidationError("compose_slice: grids must share the lattice pitch");
    const double dv = std::pow(inner.grid.delta, n);

    KernelSlice out;
    out.y0 = inner.y0;
    out.grid = x_grid;
    out.values.assign(x_grid.size(), Complex(0, 0));

    auto rule = shared_rule(outer);

    if (outer.map.translation_invariant && outer.amplitude_constant) {
        // V2(a, b) depends only on a - b; tabulate on lattice offsets.
        // star:  sum_z conj(F(z - x)) inner(z);  plain: sum_z F(x - z) inner(z).
        std::vector<long> off_lo(n), off_hi(n);
        for (int d = 0; d < n; ++d) {
            const long zi_lo = 0, zi_hi = inner.grid.counts[d] - 1;
            const long xi_lo = std::lround((x_grid.lo[d] - inner.grid.lo[d]) / x_grid.delta);
            const long xi_hi = xi_lo + x_grid.counts[d] - 1;
            if (star) {
                off_lo[d] = zi_lo - xi_hi;
                off_hi[d] = zi_hi - xi_lo;
            } else {
                off_lo[d] = xi_lo - zi_hi;
                off_hi[d] = xi_hi - zi_lo;
            }
        }
        std::vector<long> dims(n);
        std::size_t total = 1;
        for (int d = 0; d < n; ++d) {
            dims[d] = off_hi[d] - off_lo[d] + 1;
            total *= static_cast<std::size_t>(dims[d]);
        }
        KernelEngine base_engine(outer, rule);
        base_engine.set_y(Vec::Zero(n));
        const double reach = outer.cutoff.spatial_width + 3 * x_grid.delta;

        std::vector<Complex> field(total, Complex(0, 0));
        parallel_for(total, [&](std::size_t idx) {
            std::size_t rest = idx;
            Vec u(n);
            for (int d = 0; d < n; ++d) {
                const long o = off_lo[d] + static_cast<long>(rest % dims[d]);
                rest /= dims[d];
                u[d] = o * x_grid.delta;
            }
            if (base_engine.stationary_distance(u) > reach) return;
            field[idx] = base_engine.eval(u);
        });

        auto field_at = [&](const std::vector<long>& off) -> Complex {
            std::size_t idx = 0, stride = 1;
            for (int d = 0; d < n; ++d) {
                const long rel = off[d] - off_lo[d];
                if (rel < 0 || rel >= dims[d]) return Complex(0, 0);
                idx += static_cast<std::size_t>(rel) * stride;
                stride *= static_cast<std::size_t>(dims[d]);
            }
            return field[idx];
        };

        parallel_for(x_grid.size(), [&](std::size_t xi) {
            std::vector<long> xidx(n);
            std::size_t rest = xi;
            for (int d = 0; d < n; ++d) {
                xidx[d] = std::lround((x_grid.lo[d] - inner.grid.lo[d]) / x_grid.delta) +
                          static_cast<long>(rest % x_grid.counts[d]);
                rest /= x_grid.counts[d];
            }
            Complex acc(0, 0);
            std::vector<long> off(n);
            for (std::size_t zi = 0; zi < inner.grid.size(); ++zi) {
                const Complex vin = inner.values[zi];
                if (vin == Complex(0, 0)) continue;
                std::size_t zr = zi;
                for (int d = 0; d < n; ++d) {
                    const long z = static_cast<long>(zr % inner.grid.counts[d]);
                    zr /= inner.grid.counts[d];
                    off[d] = star ? (z - xidx[d]) : (xidx[d] - z);
                }
                const Complex k2 = field_at(off);
                acc += (star ? std::conj(k2) : k2) * vin;
            }
            out.values[xi] = acc * dv;
        });
        return out;
    }

    if (star) {
        // K(x) = sum_z conj(V2(z, x)) inner(z): the base point is x, so each
        // x-row owns one direction table.
        parallel_for(x_grid.size(), [&](std::size_t xi) {
            const Vec x = x_grid.point(xi);
            KernelEngine engine(outer, rule);
            engine.set_y(x);
            Complex acc(0, 0);
            for (std::size_t zi = 0; zi < inner.grid.size(); ++zi) {
                const Complex vin = inner.values[zi];
                if (vin == Complex(0, 0)) continue;
                const Vec z = inner.grid.point(zi);
                if (engine.stationary_distance(z) > outer.cutoff.spatial_width) continue;
                acc += std::conj(engine.eval(z)) * vin;
            }
            out.values[xi] = acc * dv;
        });
        return out;
    }

    // Plain composition K(x) = sum_z V2(x, z) inner(z): the base point is z;
    // walk z serially and fan the x-update out in parallel.
    KernelEngine engine(outer, rule);
    for (std::size_t zi = 0; zi < inner.grid.size(); ++zi) {
        const Complex vin = inner.values[zi];
        if (vin == Complex(0, 0)) continue;
        engine.set_y(inner.grid.point(zi));
        parallel_for(x_grid.size(), [&](std::size_t xi) {
            const Vec x = x_grid.point(xi);
            if (engine.stationary_distance(x) > outer.cutoff.spatial_width) return;
            out.values[xi] += engine.eval(x) * vin * dv;
        });
    }
    return out;
}

ExtractResult compose_numeric(const KernelSpec& spec1, const KernelSpec& spec2, bool star,
                              const ExtractionSpec& probe) {
    const int n = spec1.map.n;
    const CanonicalMap composed =
        star ? compose_maps(spec1.map, inverse_map(spec2.map)) : compose_maps(spec1.map, spec2.map);

    const double lam_max = *std::max_element(probe.lambdas.begin(), probe.lambdas.end());
    const double delta = grid_delta(spec1.quad, lam_max);

    // z-grid: bounding box of the stationary set of the inner kernel.
    Vec z_lo = Vec::Constant(n, 1e300), z_hi = Vec::Constant(n, -1e300);
    const int kdirs = (n == 1) ? 2 : 64;
    for (int j = 0; j < kdirs; ++j) {
        Vec omega(n);
        if (n == 1) omega << (j == 0 ? 1.0 : -1.0);
        else {
            const double th = 2.0 * M_PI * j / kdirs;
            omega << std::cos(th), std::sin(th);
        }
        const Vec zs = spec1.map.eval(probe.y0, omega).first;
        z_lo = z_lo.cwiseMin(zs);
        z_hi = z_hi.cwiseMax(zs);
    }
    const Vec zpad = Vec::Constant(n, spec1.cutoff.spatial_width + 0.15);
    const GridSpec z_grid = GridSpec::lattice(probe.y0, z_lo - zpad, z_hi + zpad, delta);

    const KernelSlice inner = synthesize_slice(spec1, probe.y0, z_grid);
    const GridSpec x_grid = probe_grid(composed, probe, delta);
    const KernelSlice product = compose_slice(inner, spec2, star, x_grid);
    const double order = spec1.order + spec2.order;
    return extract_symbol(product, composed, order, probe);
}

PhaseIndependenceResult phase_independence_residual(const KernelSpec& spec_a,
                                                    const KernelSpec& spec_b,
                                                    const ExtractionSpec& probe) {
    const ExtractResult a = extract_symbol(spec_a, probe);
    const ExtractResult b = extract_symbol(spec_b, probe);
    PhaseIndependenceResult out;
    out.value_first = a.value;
    out.value_second = b.value;
    out.residual = std::abs(a.value - b.value);
    out.combined_error = a.error_bar + b.error_bar;
    return out;
}

Vec xi_hat_solve(const CanonicalMap& map2, const Vec& x, const Vec& target, const Vec& xi0) {
    Vec xi = xi0;
    for (int it = 0; it < 100; ++it) {
        const Vec r = map2.eval(x, xi).second - target;
        if (r.norm() < 1e-13 * std::max(1.0, target.norm())) return xi;
        const Mat Se = map2.jac(x, xi).Se;
        Vec step = Se.partialPivLu().solve(r);
        double alpha = 1.0;
        const double base = r.norm();
        for (int ls = 0; ls < 30; ++ls) {
            const Vec trial = xi - alpha * step;
            if ((map2.eval(x, trial).second - target).norm() < base) {
                xi = trial;
                break;
            }
            alpha *= 0.5;
            if (ls == 29) throw NumericsError("xi_hat_solve: line search failed");
        }
    }
    throw NumericsError("xi_hat_solve: Newton did not converge");
}

Complex composed_phase_value(const CanonicalMap& map1, const CanonicalMap& map2, const Vec& x,
                             const Vec& y, const Vec& eta) {
    const auto [z1, zeta1] = map1.eval(y, eta);
    const CanonicalMap inv2 = inverse_map(map2);
    const CanonicalMap composed = compose_maps(map1, inv2);
    const Vec xi_start = composed.eval(y, eta).second;
    const Vec xih = xi_hat_solve(map2, x, zeta1, xi_start);
    const Vec z2 = map2.eval(x, xih).first;
    return Complex((z2 - z1).dot(zeta1), 0.0);
}

int compose_stationary_hessian_signature(const CanonicalMap& map2, const Vec& x,
                                         const Vec& xi_hat, double tol) {
    const int n = map2.n;
    const JacBlocks J = map2.jac(x, xi_hat);
    // psi_xixi = -phi2_xixi with the chart phase of the outer factor.
    const Mat W = (J.Xe.transpose() * J.Se + J.Se.transpose() * J.Xe) * 0.5;
    Mat H(2 * n, 2 * n);
    H.block(0, 0, n, n).setZero();
    H.block(0, n, n, n) = J.Se;
    H.block(n, 0, n, n) = J.Se.transpose();
    H.block(n, n, n, n) = W;
    return inertia(Mat(0.5 * (H + H.transpose())), tol).sgn;
}

}  // namespace fiocalc
