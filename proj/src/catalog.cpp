#include "fiocalc/catalog.hpp"

#include <Eigen/LU>

#include <array>
#include <set>
#include <sstream>

namespace fiocalc {

CanonicalMap identity_map(int n) {
    CanonicalMap m;
    m.n = n;
    m.name = "identity";
    m.translation_invariant = true;
    m.eval = [](const Vec& y, const Vec& eta) { return std::make_pair(y, eta); };
    m.jac = [n](const Vec&, const Vec&) {
        return JacBlocks{Mat::Identity(n, n), Mat::Zero(n, n), Mat::Zero(n, n),
                         Mat::Identity(n, n)};
    };
    m.inverse_ptr = nullptr;  // self-inverse, set after construction
    auto self = std::make_shared<CanonicalMap>(m);
    m.inverse_ptr = self;
    return m;
}

namespace {

CanonicalMap half_wave_core(int n, double t) {
    CanonicalMap m;
    m.n = n;
    {
        std::ostringstream os;
        os << "half_wave(t=" << t << ")";
        m.name = os.str();
    }
    m.translation_invariant = true;
    m.eval = [t](const Vec& y, const Vec& eta) {
        return std::make_pair(Vec(y + t * eta / eta.norm()), eta);
    };
    m.jac = [n, t](const Vec&, const Vec& eta) {
        const double r = eta.norm();
        const Vec u = eta / r;
        return JacBlocks{Mat::Identity(n, n),
                         Mat(t / r * (Mat::Identity(n, n) - u * u.transpose())),
                         Mat::Zero(n, n), Mat::Identity(n, n)};
    };
    return m;
}

}  // namespace

CanonicalMap half_wave_map(int n, double t) {
    CanonicalMap m = half_wave_core(n, t);
    auto rev = std::make_shared<CanonicalMap>(half_wave_core(n, -t));
    rev->inverse_ptr = std::make_shared<CanonicalMap>(half_wave_core(n, t));
    m.inverse_ptr = rev;
    return m;
}

namespace {

CanonicalMap linear_core(const Mat& L) {
    Eigen::FullPivLU<Mat> lu(L);
    if (!lu.isInvertible()) throw ValidationError("linear_symplectic_map: singular matrix");
    const int n = static_cast<int>(L.rows());
    const Mat LinvT = lu.inverse().transpose();
    CanonicalMap m;
    m.n = n;
    m.name = "linear";
    m.translation_invariant = (L - Mat::Identity(n, n)).norm() == 0.0;
    m.eval = [L, LinvT](const Vec& y, const Vec& eta) {
        return std::make_pair(Vec(L * y), Vec(LinvT * eta));
    };
    m.jac = [L, LinvT, n](const Vec&, const Vec&) {
        return JacBlocks{L, Mat::Zero(n, n), Mat::Zero(n, n), LinvT};
    };
    return m;
}

}  // namespace

CanonicalMap linear_symplectic_map(const Mat& L) {
    CanonicalMap m = linear_core(L);
    const Mat Linv = L.partialPivLu().inverse();
    auto rev = std::make_shared<CanonicalMap>(linear_core(Linv));
    rev->inverse_ptr = std::make_shared<CanonicalMap>(linear_core(L));
    m.inverse_ptr = rev;
    return m;
}

namespace {

struct LiftComponent {
    Expr f, df, ddf;
};

double invert_monotone(const LiftComponent& c, double target) {
    // Newton with bisection fallback on a bracket grown from the target.
    double lo = target, hi = target;
    auto val = [&](double y) { return c.f.eval(std::array<double, 1>{y}); };
    double width = 1.0;
    for (int k = 0; k < 60 && (val(lo) - target) * (val(hi) - target) > 0; ++k) {
        lo -= width;
        hi += width;
        width *= 2.0;
    }
    if ((val(lo) - target) * (val(hi) - target) > 0)
        throw DomainError("lift_map: could not bracket the inverse image");
    if (val(lo) > val(hi)) std::swap(lo, hi);
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fy = val(y);
        if (std::abs(fy - target) < 1e-14 * std::max(1.0, std::abs(target))) break;
        if (fy < target) lo = y;
        else hi = y;
        const double d = c.df.eval(std::array<double, 1>{y});
        double next = (d != 0.0) ? y - (fy - target) / d : 0.5 * (lo + hi);
        if (!(next > std::min(lo, hi) && next < std::max(lo, hi))) next = 0.5 * (lo + hi);
        y = next;
    }
    return y;
}

CanonicalMap lift_from_components(std::shared_ptr<std::vector<LiftComponent>> comps,
                                  const std::string& name, bool build_inverse);

CanonicalMap make_inverse_lift(std::shared_ptr<std::vector<LiftComponent>> comps,
                               const std::string& name) {
    const int n = static_cast<int>(comps->size());
    CanonicalMap m;
    m.n = n;
    m.name = name;
    m.eval = [comps, n](const Vec& x, const Vec& xi) {
        Vec y(n), eta(n);
        for (int i = 0; i < n; ++i) {
            y[i] = invert_monotone((*comps)[i], x[i]);
            eta[i] = xi[i] * (*comps)[i].df.eval(std::array<double, 1>{y[i]});
        }
        return std::make_pair(y, eta);
    };
    m.jac = [comps, n](const Vec& x, const Vec& xi) {
        JacBlocks J{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
        for (int i = 0; i < n; ++i) {
            const double y = invert_monotone((*comps)[i], x[i]);
            const double d = (*comps)[i].df.eval(std::array<double, 1>{y});
            const double dd = (*comps)[i].ddf.eval(std::array<double, 1>{y});
            J.Xy(i, i) = 1.0 / d;
            J.Sy(i, i) = xi[i] * dd / d;
            J.Se(i, i) = d;
        }
        return J;
    };
    return m;
}

CanonicalMap lift_from_components(std::shared_ptr<std::vector<LiftComponent>> comps,
                                  const std::string& name, bool build_inverse) {
    const int n = static_cast<int>(comps->size());
    CanonicalMap m;
    m.n = n;
    m.name = name;
    m.eval = [comps, n](const Vec& y, const Vec& eta) {
        Vec x(n), xi(n);
        for (int i = 0; i < n; ++i) {
            const std::array<double, 1> arg{y[i]};
            x[i] = (*comps)[i].f.eval(arg);
            const double d = (*comps)[i].df.eval(arg);
            if (d == 0.0) throw DomainError("lift_map: derivative vanishes, not a diffeomorphism here");
            xi[i] = eta[i] / d;
        }
        return std::make_pair(x, xi);
    };
    m.jac = [comps, n](const Vec& y, const Vec& eta) {
        JacBlocks J{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
        for (int i = 0; i < n; ++i) {
            const std::array<double, 1> arg{y[i]};
            const double d = (*comps)[i].df.eval(arg);
            const double dd = (*comps)[i].ddf.eval(arg);
            J.Xy(i, i) = d;
            J.Sy(i, i) = -eta[i] * dd / (d * d);
            J.Se(i, i) = 1.0 / d;
        }
        return J;
    };
    if (build_inverse)
        m.inverse_ptr = std::make_shared<CanonicalMap>(make_inverse_lift(comps, name + "^-1"));
    return m;
}

}  // namespace

CanonicalMap lift_map(const std::vector<Expr>& components) {
    if (components.empty()) throw ValidationError("lift_map: no components");
    auto comps = std::make_shared<std::vector<LiftComponent>>();
    for (const Expr& f : components) {
        LiftComponent c{f, f.derivative("y"), f.derivative("y").derivative("y")};
        comps->push_back(std::move(c));
    }
    std::string name = "lift(" + components.front().text() + ")";
    CanonicalMap fwd = lift_from_components(comps, name, false);
    CanonicalMap inv = make_inverse_lift(comps, name + "^-1");
    inv.inverse_ptr = std::make_shared<CanonicalMap>(fwd);
    fwd.inverse_ptr = std::make_shared<CanonicalMap>(std::move(inv));
    return fwd;
}

CanonicalMap lift_map(const std::string& f_text) {
    return lift_map(std::vector<Expr>{Expr::parse(f_text, {"y"})});
}

FlowSpec metric_flow_spec(const std::vector<std::vector<Expr>>& metric, double time, int steps) {
    const int n = static_cast<int>(metric.size());
    for (const auto& row : metric)
        if (static_cast<int>(row.size()) != n)
            throw ValidationError("metric_flow_spec: metric must be square");

    std::vector<std::string> vars;
    for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));

    // Entry derivatives for h_x; the dual norm uses the inverse metric.
    auto entries = std::make_shared<std::vector<std::vector<Expr>>>(metric);
    auto dentries = std::make_shared<std::vector<std::vector<std::vector<Expr>>>>();
    for (int k = 0; k < n; ++k) {
        std::vector<std::vector<Expr>> dk(n, std::vector<Expr>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dk[i][j] = metric[i][j].derivative(vars[k]);
        dentries->push_back(std::move(dk));
    }

    auto eval_mat = [n](const std::vector<std::vector<Expr>>& e, const Vec& x) {
        Mat g(n, n);
        std::vector<double> vals(x.data(), x.data() + x.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = e[i][j].eval(vals);
        return g;
    };

    FlowSpec spec;
    spec.n = n;
    spec.time = time;
    spec.steps = steps;
    spec.h = [entries, eval_mat](const Vec& x, const Vec& xi) {
        const Mat W = eval_mat(*entries, x).inverse();
        return std::sqrt(xi.dot(W * xi));
    };
    spec.h_xi = [entries, eval_mat](const Vec& x, const Vec& xi) {
        const Mat W = eval_mat(*entries, x).inverse();
        return Vec(W * xi / std::sqrt(xi.dot(W * xi)));
    };
    spec.h_x = [entries, dentries, eval_mat, n](const Vec& x, const Vec& xi) {
        const Mat W = eval_mat(*entries, x).inverse();
        const double h = std::sqrt(xi.dot(W * xi));
        Vec out(n);
        for (int k = 0; k < n; ++k) {
            const Mat dg = eval_mat((*dentries)[k], x);
            const Mat dW = -W * dg * W;
            out[k] = xi.dot(dW * xi) / (2.0 * h);
        }
        return out;
    };
    return spec;
}

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& what) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError(what + ": unknown field '" + it.key() + "'");
}

Expr entry_to_expr(const nlohmann::json& e, const std::vector<std::string>& vars) {
    if (e.is_number()) return Expr::parse(std::to_string(e.get<double>()), vars);
    if (e.is_string()) return Expr::parse(e.get<std::string>(), vars);
    throw ValidationError("metric entries must be numbers or expression strings");
}

}  // namespace

CanonicalMap map_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("map"))
        throw ValidationError("map spec: expected an object with a 'map' field");
    const std::string kind = j.at("map").get<std::string>();
    if (kind == "identity") {
        reject_unknown_keys(j, {"map", "n"}, "identity");
        return identity_map(j.value("n", 1));
    }
    if (kind == "half_wave") {
        reject_unknown_keys(j, {"map", "n", "t"}, "half_wave");
        return half_wave_map(j.value("n", 2), j.at("t").get<double>());
    }
    if (kind == "linear") {
        reject_unknown_keys(j, {"map", "L"}, "linear");
        const auto rows = j.at("L");
        const int n = static_cast<int>(rows.size());
        Mat L(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) L(i, k) = rows.at(i).at(k).get<double>();
        return linear_symplectic_map(L);
    }
    if (kind == "lift") {
        reject_unknown_keys(j, {"map", "f"}, "lift");
        const auto& f = j.at("f");
        std::vector<Expr> comps;
        if (f.is_string()) {
            comps.push_back(Expr::parse(f.get<std::string>(), {"y"}));
        } else {
            for (const auto& part : f) comps.push_back(Expr::parse(part.get<std::string>(), {"y"}));
        }
        return lift_map(comps);
    }
    if (kind == "flow") {
        reject_unknown_keys(j, {"map", "metric", "t", "steps"}, "flow");
        const auto rows = j.at("metric");
        const int n = static_cast<int>(rows.size());
        std::vector<std::string> vars;
        for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
        std::vector<std::vector<Expr>> metric(n, std::vector<Expr>(n));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) metric[i][k] = entry_to_expr(rows.at(i).at(k), vars);
        return flow_map(metric_flow_spec(metric, j.at("t").get<double>(), j.value("steps", 1000)));
    }
    throw ValidationError("map spec: unknown catalog item '" + kind + "'");
}

std::vector<std::pair<Vec, Vec>> random_samples(int n, int count, Rng& rng, double y_box) {
    std::vector<std::pair<Vec, Vec>> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        Vec y(n), eta(n);
        for (int i = 0; i < n; ++i) y[i] = rng.uniform(-y_box, y_box);
        eta = rng.unit_vector(n) * rng.uniform(0.5, 2.0);
        out.emplace_back(y, eta);
    }
    return out;
}

}  // namespace fiocalc
