#include "marc/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace marc::gp {

double Monomial::eval(std::span<const double> x) const {
    double v = coeff;
    for (auto [id, e] : exps) v *= std::pow(x[id], e);
    return v;
}

double Posynomial::eval(std::span<const double> x) const {
    double s = 0;
    for (const auto& m : terms) s += m.eval(x);
    return s;
}

Monomial monomial_approx(const Posynomial& g, std::span<const double> anchor) {
    double total = g.eval(anchor);
    Monomial out;
    double log_coeff = 0;
    std::map<int, double> exps;
    for (const auto& m : g.terms) {
        double gamma = m.eval(anchor) / total;
        if (gamma <= 0) continue;
        log_coeff += gamma * (std::log(m.coeff) - std::log(gamma));
        for (auto [id, e] : m.exps) exps[id] += gamma * e;
    }
    out.coeff = std::exp(log_coeff);
    out.exps = std::move(exps);
    return out;
}

double LseFunction::eval(std::span<const double> y) const {
    double zmax = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
        double z = t.log_coeff;
        for (size_t i = 0; i < t.lin.size(); ++i) z += t.lin[i] * y[i];
        zmax = std::max(zmax, z);
    }
    double s = 0;
    for (const auto& t : terms) {
        double z = t.log_coeff;
        for (size_t i = 0; i < t.lin.size(); ++i) z += t.lin[i] * y[i];
        s += std::exp(z - zmax);
    }
    return zmax + std::log(s);
}

double AffineFunction::eval(std::span<const double> y) const {
    double v = constant;
    for (size_t i = 0; i < lin.size(); ++i) v += lin[i] * y[i];
    return v;
}

namespace {

LseTerm term_from_monomial(const Monomial& m, int n) {
    LseTerm t;
    t.log_coeff = std::log(m.coeff);
    t.lin.assign(n, 0.0);
    for (auto [id, e] : m.exps) t.lin[id] = e;
    return t;
}

LseFunction lse_from_posynomial(const Posynomial& p, int n) {
    LseFunction f;
    for (const auto& m : p.terms) f.terms.push_back(term_from_monomial(m, n));
    return f;
}

}  // namespace

ConvexGp to_convex_form(const GpProblem& p) {
    ConvexGp c;
    c.n_vars = p.n_vars;
    c.objective = lse_from_posynomial(p.objective, p.n_vars);
    for (const auto& q : p.ineq) c.ineq.push_back(lse_from_posynomial(q, p.n_vars));
    for (int i = 0; i < p.n_vars; ++i) {
        auto [lo, hi] = p.box[i];
        LseFunction up, down;  // x_i/hi <= 1 and lo/x_i <= 1
        up.terms.push_back({-std::log(hi), std::vector<double>(p.n_vars, 0.0)});
        up.terms.back().lin[i] = 1.0;
        down.terms.push_back({std::log(lo), std::vector<double>(p.n_vars, 0.0)});
        down.terms.back().lin[i] = -1.0;
        c.ineq.push_back(std::move(up));
        c.ineq.push_back(std::move(down));
    }
    for (const auto& m : p.mono_eq) {
        AffineFunction a;
        a.constant = std::log(m.coeff);
        a.lin.assign(p.n_vars, 0.0);
        for (auto [id, e] : m.exps) a.lin[id] = e;
        c.eq.push_back(std::move(a));
    }
    return c;
}

// ----- barrier machinery -----

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<double>;  // row-major n x n

// value, gradient and Hessian contribution of an LSE function
struct LseEval {
    double value;
    Vec grad;
};

LseEval lse_eval_grad(const LseFunction& f, const Vec& y, Mat* hess, double hess_w) {
    int n = int(y.size());
    double zmax = -std::numeric_limits<double>::infinity();
    std::vector<double> z(f.terms.size());
    for (size_t j = 0; j < f.terms.size(); ++j) {
        double v = f.terms[j].log_coeff;
        const auto& a = f.terms[j].lin;
        for (int i = 0; i < n; ++i) v += a[i] * y[i];
        z[j] = v;
        zmax = std::max(zmax, v);
    }
    double s = 0;
    for (double v : z) s += std::exp(v - zmax);

    LseEval out;
    out.value = zmax + std::log(s);
    out.grad.assign(n, 0.0);
    for (size_t j = 0; j < f.terms.size(); ++j) {
        double w = std::exp(z[j] - zmax) / s;
        const auto& a = f.terms[j].lin;
        for (int i = 0; i < n; ++i) out.grad[i] += w * a[i];
        if (hess && hess_w != 0.0) {
            for (int r = 0; r < n; ++r)
                for (int col = 0; col < n; ++col) (*hess)[r * n + col] += hess_w * w * a[r] * a[col];
        }
    }
    if (hess && hess_w != 0.0) {
        for (int r = 0; r < n; ++r)
            for (int col = 0; col < n; ++col)
                (*hess)[r * n + col] -= hess_w * out.grad[r] * out.grad[col];
    }
    return out;
}

// dense LU with partial pivoting; returns false when singular
bool lu_solve(Mat a, Vec b, Vec& x) {
    int n = int(b.size());
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
        if (std::abs(a[p * n + k]) < 1e-300) return false;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            double m = a[i * n + k] / a[k * n + k];
            a[i * n + k] = m;
            for (int j = k + 1; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
            b[i] -= m * b[k];
        }
    }
    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double v = b[i];
        for (int j = i + 1; j < n; ++j) v -= a[i * n + j] * x[j];
        x[i] = v / a[i * n + i];
    }
    return true;
}

struct BarrierProblem {
    int n = 0;
    LseFunction objective;
    std::vector<LseFunction> ineq;
    std::vector<AffineFunction> eq;
};

bool strictly_feasible(const BarrierProblem& bp, const Vec& y, double margin = 0.0) {
    for (const auto& g : bp.ineq)
        if (g.eval(y) >= -margin) return false;
    return true;
}

struct NewtonOutcome {
    bool ok = true;
    int steps = 0;
    double grad_norm = 0;
};

// minimize f0(y) + mu * phi(y) s.t. eq(y) = 0 for fixed mu
NewtonOutcome newton_minimize(const BarrierProblem& bp, double mu, Vec& y, int max_steps,
                              double tol) {
    int n = bp.n;
    int m = int(bp.eq.size());
    NewtonOutcome out;

    auto merit = [&](const Vec& pt) {
        double v = bp.objective.eval(pt);
        for (const auto& g : bp.ineq) {
            double gv = g.eval(pt);
            if (gv >= 0) return std::numeric_limits<double>::infinity();
            v -= mu * std::log(-gv);
        }
        return v;
    };

    for (int it = 0; it < max_steps; ++it) {
        Mat hess(n * n, 0.0);
        Vec grad(n, 0.0);

        LseEval fo = lse_eval_grad(bp.objective, y, &hess, 1.0);
        for (int i = 0; i < n; ++i) grad[i] += fo.grad[i];

        for (const auto& g : bp.ineq) {
            // evaluate once for value+grad, then add both barrier Hessian pieces
            LseEval ge = lse_eval_grad(g, y, &hess, mu / (-g.eval(y)));
            double gv = ge.value;
            double inv = 1.0 / (-gv);
            for (int i = 0; i < n; ++i) grad[i] += mu * inv * ge.grad[i];
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    hess[r * n + c] += mu * inv * inv * ge.grad[r] * ge.grad[c];
        }

        out.grad_norm = 0;
        for (double v : grad) out.grad_norm = std::max(out.grad_norm, std::abs(v));

        // KKT system with the affine equalities appended
        int dim = n + m;
        Mat kkt(dim * dim, 0.0);
        Vec rhs(dim, 0.0);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) kkt[r * dim + c] = hess[r * n + c];
            rhs[r] = -grad[r];
        }
        for (int e = 0; e < m; ++e) {
            const auto& a = bp.eq[e];
            for (int c = 0; c < n; ++c) {
                kkt[(n + e) * dim + c] = a.lin[c];
                kkt[c * dim + (n + e)] = a.lin[c];
            }
            rhs[n + e] = -a.eval(y);
        }

        Vec step;
        bool solved = lu_solve(kkt, rhs, step);
        if (!solved) {
            for (int i = 0; i < n; ++i) kkt[i * dim + i] += 1e-10;
            solved = lu_solve(kkt, rhs, step);
            if (!solved) { out.ok = false; return out; }
        }

        double decrement = 0;
        for (int i = 0; i < n; ++i) decrement += -grad[i] * step[i];
        if (decrement * 0.5 < tol && out.grad_norm < 1e-9 * std::max(1.0, std::abs(fo.value))) {
            return out;
        }

        double f0 = merit(y);
        double t = 1.0;
        Vec trial(n);
        for (;;) {
            for (int i = 0; i < n; ++i) trial[i] = y[i] + t * step[i];
            double ft = merit(trial);
            if (ft <= f0 - 0.25 * t * decrement + 1e-15 * std::abs(f0)) break;
            t *= 0.5;
            if (t < 1e-14) break;
        }
        if (t < 1e-14) {
            return out;  // no progress possible at this mu
        }
        y = trial;
        out.steps++;
    }
    return out;
}

Vec barrier_path(const BarrierProblem& bp, Vec y, int* total_steps) {
    for (double mu = 1.0; mu >= 1e-9; mu *= 0.1) {
        NewtonOutcome o = newton_minimize(bp, mu, y, 60, 1e-12);
        if (total_steps) *total_steps += o.steps;
    }
    return y;
}

// Phase I: minimize s over (y, s) with every constraint shifted by -s. The
// shift folds into each LSE term, so the machinery above applies unchanged.
Vec find_interior_point(const BarrierProblem& bp, Vec y0) {
    BarrierProblem ph;
    ph.n = bp.n + 1;
    LseTerm sterm{0.0, Vec(ph.n, 0.0)};
    sterm.lin[bp.n] = 1.0;
    ph.objective.terms.push_back(sterm);
    for (const auto& g : bp.ineq) {
        LseFunction shifted;
        for (const auto& t : g.terms) {
            LseTerm nt{t.log_coeff, Vec(ph.n, 0.0)};
            std::copy(t.lin.begin(), t.lin.end(), nt.lin.begin());
            nt.lin[bp.n] = -1.0;
            shifted.terms.push_back(std::move(nt));
        }
        ph.ineq.push_back(std::move(shifted));
    }
    for (const auto& e : bp.eq) {
        AffineFunction a = e;
        a.lin.push_back(0.0);
        ph.eq.push_back(std::move(a));
    }

    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& g : bp.ineq) worst = std::max(worst, g.eval(y0));
    Vec z = y0;
    z.push_back(worst + 1.0);

    for (double mu = 1.0; mu >= 1e-8; mu *= 0.1) {
        newton_minimize(ph, mu, z, 60, 1e-12);
        if (z[bp.n] < -1e-3) break;  // comfortably interior
    }
    if (z[bp.n] >= 0.0) throw InfeasibleGp("no strictly feasible point (phase I)");
    Vec y(z.begin(), z.begin() + bp.n);
    return y;
}

}  // namespace

GpResult solve_gp(const GpProblem& p, const std::vector<double>* start) {
    if (int(p.box.size()) != p.n_vars) throw InfeasibleGp("box size mismatch");
    for (auto [lo, hi] : p.box)
        if (!(lo > 0) || !(hi >= lo)) throw InfeasibleGp("box bounds must satisfy 0 < lo <= hi");

    ConvexGp c = to_convex_form(p);
    BarrierProblem bp{c.n_vars, c.objective, c.ineq, c.eq};

    Vec y(p.n_vars);
    bool have_start = false;
    if (start) {
        for (int i = 0; i < p.n_vars; ++i) y[i] = std::log((*start)[i]);
        have_start = strictly_feasible(bp, y);
    }
    if (!have_start) {
        Vec centre(p.n_vars);
        for (int i = 0; i < p.n_vars; ++i)
            centre[i] = 0.5 * (std::log(p.box[i].first) + std::log(p.box[i].second));
        if (strictly_feasible(bp, centre, 1e-9)) y = centre;
        else y = find_interior_point(bp, centre);
    }

    GpResult res;
    res.status = GpStatus::converged;
    int steps = 0;
    y = barrier_path(bp, std::move(y), &steps);
    res.newton_steps = steps;

    // final polish at the smallest barrier weight
    NewtonOutcome last = newton_minimize(bp, 1e-9, y, 40, 1e-14);
    res.newton_steps += last.steps;

    res.x.assign(p.n_vars, 0.0);
    for (int i = 0; i < p.n_vars; ++i) res.x[i] = std::exp(y[i]);
    res.objective = p.objective.eval(res.x);

    // KKT residual of the log-space program with barrier multipliers
    double comp = 0;
    Vec grad(bp.n, 0.0);
    LseEval fo = lse_eval_grad(bp.objective, y, nullptr, 0.0);
    for (int i = 0; i < bp.n; ++i) grad[i] = fo.grad[i];
    for (const auto& g : bp.ineq) {
        LseEval ge = lse_eval_grad(g, y, nullptr, 0.0);
        double lambda = 1e-9 / (-ge.value);
        comp += lambda * (-ge.value);
        for (int i = 0; i < bp.n; ++i) grad[i] += lambda * ge.grad[i];
    }
    double stat = 0;
    for (double v : grad) stat = std::max(stat, std::abs(v));
    res.kkt_residual = stat + comp;
    if (last.grad_norm > 1e-6) res.status = GpStatus::max_iterations;
    return res;
}

}  // namespace marc::gp
