#include "macouple/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "macouple/errors.hpp"

namespace macouple {

namespace {

constexpr double kEigenTolFloor = 1e-12;    // keeps the ratio-spread gate meaningful
constexpr double kBalancedMatchTol = 1e-6;  // |lambda mu^{a/N} - C| <= tol * C
constexpr double kRatioSpreadCutoff = 1e-6; // nodes entering the T(w)/w spread
constexpr double kNormDriftFloor = 1e-200;  // iterate norm collapse guard

double rel_change(const RadialProfile& a, const RadialProfile& b) {
    double num = 0.0;
    for (int i = 0; i < a.size(); ++i)
        num = std::max(num, std::fabs(a[i] - b[i]));
    const double den = std::max(sup_norm(a), sup_norm(b));
    return den > 0.0 ? num / den : num;
}

RadialProfile scaled(const RadialProfile& v, double c) {
    std::vector<double> vals(v.values().begin(), v.values().end());
    for (double& x : vals)
        x *= c;
    return RadialProfile(v.grid_ptr(), std::move(vals));
}

RadialProfile make_initial(const SolveConfig& cfg) {
    if (cfg.initial_profile) {
        if (!(cfg.initial_profile->grid() == *cfg.grid))
            throw std::invalid_argument("initial profile grid does not match config grid");
        return *cfg.initial_profile;
    }
    if (cfg.initial_preset == "parabola")
        return RadialProfile::sample(cfg.grid, [](double t) { return 1.0 - t * t; });
    if (cfg.initial_preset == "linear")
        return RadialProfile::sample(cfg.grid, [](double t) { return 1.0 - t; });
    if (cfg.initial_preset == "constant-on-cone")
        return RadialProfile::sample(cfg.grid, [](double) { return 1.0; });
    throw std::invalid_argument("unknown initial profile preset: " + cfg.initial_preset);
}

void maybe_check_bounds(const SolveConfig& cfg, const RadialProfile& v,
                        const ProblemSpec& spec) {
    if (!cfg.check_bounds_each_iter)
        return;
    if (!cone_report(v).passes())
        return;
    const BoundsReport rep = verify_bounds(v, spec);
    if (!rep.pass)
        throw std::logic_error("norm bound violated on an iterate");
}

struct PowerIterOutcome {
    RadialProfile shape;
    double kappa = 0.0;
    int iterations = 0;
    double final_change = 0.0;
    double ratio_spread = 0.0;
    std::vector<double> trace;
    bool converged = false;
};

using Operator = std::function<RadialProfile(const RadialProfile&)>;

PowerIterOutcome power_iterate(const Operator& op, RadialProfile w, double tol, int max_iter) {
    const double n0 = sup_norm(w);
    if (n0 <= 0.0)
        throw std::invalid_argument("power iteration requires a nonzero start");
    w = scaled(w, 1.0 / n0);

    PowerIterOutcome out{w};
    for (int k = 1; k <= max_iter; ++k) {
        RadialProfile Tw = op(w);
        const double kap = sup_norm(Tw);
        if (kap < 1e-300)
            throw ZeroCollapseError("iterate collapsed to zero under the operator");
        RadialProfile next = scaled(Tw, 1.0 / kap);
        out.final_change = rel_change(next, w);
        out.trace.push_back(kap);
        out.iterations = k;
        w = std::move(next);
        if (out.final_change < tol) {
            out.converged = true;
            break;
        }
    }

    // One confirming application on the final shape fixes kappa and the
    // node-wise eigen-ratio spread.
    RadialProfile Tw = op(w);
    out.kappa = sup_norm(Tw);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < w.size(); ++i) {
        if (w[i] > kRatioSpreadCutoff) {
            const double r = Tw[i] / w[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    out.ratio_spread = (hi >= lo) ? hi - lo : 0.0;
    out.shape = std::move(w);
    return out;
}

void attach_pair(SolveResult& res, RadialProfile v1, RadialProfile v2, const ProblemSpec& spec) {
    res.v1 = std::move(v1);
    res.v2 = std::move(v2);
    res.u1 = scaled(res.v1, -1.0);
    res.u2 = scaled(res.v2, -1.0);
    res.residuals = full_residual_report(res.v1, res.v2, spec);
    res.residual_sup = res.residuals.ode_residual_sup;
}

EigenResult eigen_from_outcome(const PowerIterOutcome& po, int N, double alpha) {
    EigenResult eig{po.kappa,
                    std::pow(po.kappa, -static_cast<double>(N)),
                    0.0,
                    po.shape,
                    po.iterations,
                    po.ratio_spread};
    eig.critical_radius = std::pow(eig.C, 1.0 / (2.0 * (static_cast<double>(N) + alpha)));
    return eig;
}

SolveConfig eigen_config(const SolveConfig& cfg) {
    SolveConfig tight = cfg;
    tight.tol_fixpoint = std::min(cfg.tol_fixpoint, kEigenTolFloor);
    return tight;
}

} // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::nonexistence_certified: return "nonexistence_certified";
    case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
    }
    return "unknown";
}

SolveResult solve_picard_sublinear(const ProblemSpec& spec, const SolveConfig& cfg) {
    if (spec.regime() != Regime::sublinear)
        throw WrongRegimeError("solve_picard_sublinear requires alpha*beta < N^2");

    SolveResult res(cfg.grid, spec.regime());
    RadialProfile v = make_initial(cfg);
    bool converged = false;
    double change = 0.0;
    int k = 0;
    for (k = 1; k <= cfg.max_iter; ++k) {
        RadialProfile Tv = apply_T_scaled(v, spec);
        change = rel_change(Tv, v);
        v = std::move(Tv);
        res.trace.push_back(change);
        maybe_check_bounds(cfg, v, spec);
        if (change < cfg.tol_fixpoint) {
            converged = true;
            break;
        }
    }
    res.iterations = std::min(k, cfg.max_iter);
    res.final_change = change;
    attach_pair(res, v, apply_T2_scaled(v, spec), spec);
    res.status = (converged && res.residual_sup <= ode_residual_gate(*cfg.grid))
                     ? SolveStatus::converged
                     : SolveStatus::max_iter_exceeded;
    return res;
}

NormalizedIterationResult normalized_iteration(const ProblemSpec& spec, const SolveConfig& cfg) {
    PowerIterOutcome po =
        power_iterate([&](const RadialProfile& w) { return apply_T_scaled(w, spec); },
                      make_initial(cfg), cfg.tol_fixpoint, cfg.max_iter);
    if (!po.converged)
        throw MaxIterExceededError("normalized iteration did not converge");
    return NormalizedIterationResult{std::move(po.shape), po.kappa,       po.iterations,
                                     po.final_change,     po.ratio_spread, std::move(po.trace)};
}

RadialProfile rescale_to_fixed_point(const RadialProfile& shape, double kappa,
                                     const ProblemSpec& spec) {
    if (spec.regime() == Regime::balanced)
        throw BalancedRegimeError("rescale is undefined at homogeneity degree 1");
    const double p = spec.homogeneity();
    const double c = std::pow(kappa, 1.0 / (1.0 - p));
    return scaled(shape, c);
}

SolveResult solve_system(const ProblemSpec& spec, const SolveConfig& cfg) {
    const Regime regime = spec.regime();
    if (regime == Regime::sublinear)
        return solve_picard_sublinear(spec, cfg);

    if (regime == Regime::superlinear) {
        SolveResult res(cfg.grid, regime);
        PowerIterOutcome po =
            power_iterate([&](const RadialProfile& w) { return apply_T_scaled(w, spec); },
                          make_initial(cfg), cfg.tol_fixpoint, cfg.max_iter);
        res.trace = po.trace;
        res.final_change = po.final_change;
        res.iterations = po.iterations + 1;
        if (!po.converged) {
            res.status = SolveStatus::max_iter_exceeded;
            return res;
        }
        RadialProfile v1 = rescale_to_fixed_point(po.shape, po.kappa, spec);
        // Confirming application: the rescaled profile must be an actual
        // fixed point of the scaled composite, not just a shape.
        const double fp = rel_change(apply_T_scaled(v1, spec), v1);
        attach_pair(res, v1, apply_T2_scaled(v1, spec), spec);
        res.status = (fp <= 10.0 * cfg.tol_fixpoint &&
                      res.residual_sup <= ode_residual_gate(*cfg.grid))
                         ? SolveStatus::converged
                         : SolveStatus::max_iter_exceeded;
        return res;
    }

    // Balanced: the composite operator is homogeneous of degree 1 and the
    // system is solvable exactly at the threshold scale product.
    SolveResult res(cfg.grid, regime);
    const ProblemSpec unit(spec.N, spec.alpha, spec.beta, 1.0, 1.0);
    const SolveConfig tight = eigen_config(cfg);
    PowerIterOutcome po =
        power_iterate([&](const RadialProfile& w) { return apply_T(w, unit); },
                      make_initial(tight), tight.tol_fixpoint, tight.max_iter);
    res.trace = po.trace;
    res.final_change = po.final_change;
    res.iterations = po.iterations;
    if (!po.converged) {
        res.status = SolveStatus::max_iter_exceeded;
        return res;
    }
    EigenResult eig = eigen_from_outcome(po, spec.N, spec.alpha);
    res.eigen = eig;

    const double product = spec.scale_product();
    if (std::fabs(product - eig.C) <= kBalancedMatchTol * eig.C) {
        // Solvable: the eigen shape solves the scaled system once the second
        // component carries the mu^{1/N} factor.
        attach_pair(res, eig.eigen_shape, apply_T2_scaled(eig.eigen_shape, spec), spec);
        res.status = res.residual_sup <= ode_residual_gate(*cfg.grid)
                         ? SolveStatus::converged
                         : SolveStatus::max_iter_exceeded;
    } else {
        res.status = SolveStatus::nonexistence_certified;
    }
    return res;
}

EigenResult principal_constant(int N, double alpha) {
    SolveConfig cfg(make_grid(2049));
    cfg.tol_fixpoint = 1e-13;
    cfg.max_iter = 20000;
    return principal_constant(N, alpha, cfg);
}

EigenResult principal_constant(int N, double alpha, const SolveConfig& cfg) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("principal_constant: alpha must be positive");
    const double beta = static_cast<double>(N) * static_cast<double>(N) / alpha;
    const ProblemSpec spec(N, alpha, beta, 1.0, 1.0);
    const SolveConfig tight = eigen_config(cfg);
    PowerIterOutcome po =
        power_iterate([&](const RadialProfile& w) { return apply_T(w, spec); },
                      make_initial(tight), tight.tol_fixpoint, tight.max_iter);
    if (!po.converged)
        throw MaxIterExceededError("principal_constant: eigen iteration did not converge");
    return eigen_from_outcome(po, N, alpha);
}

double single_equation_eigen(int N, const SolveConfig& cfg) {
    if (N < 1)
        throw std::invalid_argument("single_equation_eigen: N must be >= 1");
    auto S = [&](const RadialProfile& v) {
        return outer_tail(inner_cumulative(v, static_cast<double>(N), N));
    };
    const SolveConfig tight = eigen_config(cfg);
    PowerIterOutcome po = power_iterate(S, make_initial(tight), tight.tol_fixpoint,
                                        tight.max_iter);
    if (!po.converged)
        throw MaxIterExceededError("single_equation_eigen: iteration did not converge");
    return 1.0 / po.kappa;
}

SolveResult solve_general(const Nonlinearity& f, const Nonlinearity& g, int N,
                          const SolveConfig& cfg) {
    const Classification cls = classify_general(f, g, N, 1e-6, 1e6);
    Regime regime = Regime::balanced;
    if (cls.category == GeneralCase::case1)
        regime = Regime::superlinear;
    else if (cls.category == GeneralCase::case2)
        regime = Regime::sublinear;

    SolveResult res(cfg.grid, regime);
    res.classification = to_string(cls.category);

    RadialProfile v = make_initial(cfg);
    double theta = 1.0;
    double prev_increment = 0.0;
    int flips_in_a_row = 0;
    bool converged = false;
    double change = 0.0;
    int k = 0;
    for (k = 1; k <= cfg.max_iter; ++k) {
        RadialProfile Tv = apply_general(apply_general(v, g, N), f, N);
        RadialProfile next(cfg.grid);
        for (int i = 0; i < v.size(); ++i)
            next[i] = (1.0 - theta) * v[i] + theta * Tv[i];
        change = rel_change(next, v);

        const double norm_before = sup_norm(v);
        const double increment = sup_norm(next) - norm_before;
        // Two consecutive sign flips of the norm increment indicate
        // oscillation around the fixed point; halve the damping.
        if (std::fabs(increment) > 1e-14 * std::max(norm_before, 1.0)) {
            if (increment * prev_increment < 0.0) {
                if (++flips_in_a_row >= 2) {
                    theta = std::max(theta * 0.5, 1.0 / 64.0);
                    flips_in_a_row = 0;
                }
            } else {
                flips_in_a_row = 0;
            }
            prev_increment = increment;
        }

        v = std::move(next);
        res.trace.push_back(change);
        if (sup_norm(v) < kNormDriftFloor)
            break; // norm drift: the iterate is collapsing, not converging
        if (change < cfg.tol_fixpoint) {
            converged = true;
            break;
        }
    }
    res.iterations = std::min(k, cfg.max_iter);
    res.final_change = change;

    res.v1 = v;
    res.v2 = apply_general(v, g, N);
    res.u1 = scaled(res.v1, -1.0);
    res.u2 = scaled(res.v2, -1.0);
    // Residual certificate: the iterate must reproduce itself through the
    // composite map, which blocks false convergence claims.
    const double fp = rel_change(apply_general(res.v2, f, N), res.v1);
    res.residual_sup = fp;
    res.status = (converged && fp <= 10.0 * cfg.tol_fixpoint) ? SolveStatus::converged
                                                              : SolveStatus::max_iter_exceeded;
    return res;
}

} // namespace macouple
