#include "macouple/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "macouple/errors.hpp"
#include "macouple/solvers.hpp"

namespace macouple {

namespace {

double ipow(double t, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k)
        r *= t;
    return r;
}

// Central differences at interior nodes; endpoints are left at zero and never
// read by the callers below.
std::vector<double> central_diff(std::span<const double> x, double h) {
    const int n = static_cast<int>(x.size());
    std::vector<double> d(x.size(), 0.0);
    for (int i = 1; i + 1 < n; ++i)
        d[static_cast<std::size_t>(i)] =
            (x[static_cast<std::size_t>(i + 1)] - x[static_cast<std::size_t>(i - 1)]) / (2.0 * h);
    return d;
}

double one_sided_derivative_at_0(const RadialProfile& v) {
    const double h = v.grid().spacing();
    return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
}

// One scaled defect sup of ((-v')^N)' against N t^{N-1} scale * w^expo.
double ode_defect(const RadialProfile& v, const RadialProfile& w, double expo, double scale,
                  int N) {
    const int n = v.size();
    const double h = v.grid().spacing();
    const std::vector<double> d = central_diff(v.values(), h);

    std::vector<double> q(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i + 1 < n; ++i)
        q[static_cast<std::size_t>(i)] = clamped_power(-d[static_cast<std::size_t>(i)], N);

    double sup_rhs = 0.0;
    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double t = v.grid().node(i);
        rhs[static_cast<std::size_t>(i)] =
            static_cast<double>(N) * ipow(t, N - 1) * scale * clamped_power(w[i], expo);
        sup_rhs = std::max(sup_rhs, std::fabs(rhs[static_cast<std::size_t>(i)]));
    }

    double sup_defect = 0.0;
    for (int i = 2; i + 2 < n; ++i) {
        const double t = v.grid().node(i);
        if (t > 1.0 - kOdeBoundaryCut)
            break;
        const double dq =
            (q[static_cast<std::size_t>(i + 1)] - q[static_cast<std::size_t>(i - 1)]) / (2.0 * h);
        sup_defect = std::max(sup_defect, std::fabs(dq - rhs[static_cast<std::size_t>(i)]));
    }
    return sup_rhs > 0.0 ? sup_defect / sup_rhs : sup_defect;
}

RadialProfile power_rhs(const RadialProfile& w, double expo, double scale) {
    std::vector<double> vals(static_cast<std::size_t>(w.size()));
    for (int i = 0; i < w.size(); ++i)
        vals[static_cast<std::size_t>(i)] = scale * clamped_power(w[i], expo);
    return RadialProfile(w.grid_ptr(), std::move(vals));
}

// Fritsch-Carlson monotone cubic slopes on a uniform grid, with slope 0 at
// the left endpoint (even extension through t = 0).
std::vector<double> pchip_slopes(std::span<const double> y, double h) {
    const int n = static_cast<int>(y.size());
    std::vector<double> delta(static_cast<std::size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i)
        delta[static_cast<std::size_t>(i)] =
            (y[static_cast<std::size_t>(i + 1)] - y[static_cast<std::size_t>(i)]) / h;

    std::vector<double> m(static_cast<std::size_t>(n), 0.0);
    m[0] = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double dl = delta[static_cast<std::size_t>(i - 1)];
        const double dr = delta[static_cast<std::size_t>(i)];
        m[static_cast<std::size_t>(i)] = (dl * dr > 0.0) ? 2.0 * dl * dr / (dl + dr) : 0.0;
    }
    // Shape-preserving one-sided endpoint rule at t = 1.
    const double d1 = delta[static_cast<std::size_t>(n - 2)];
    const double d2 = delta[static_cast<std::size_t>(n - 3)];
    double me = (3.0 * d1 - d2) / 2.0;
    if (me * d1 <= 0.0)
        me = 0.0;
    else if (std::fabs(me) > 3.0 * std::fabs(d1))
        me = 3.0 * d1;
    m[static_cast<std::size_t>(n - 1)] = me;
    return m;
}

double pchip_eval(std::span<const double> y, std::span<const double> m, double h, double r) {
    const int n = static_cast<int>(y.size());
    int k = static_cast<int>(r / h);
    k = std::clamp(k, 0, n - 2);
    const double xi = (r - static_cast<double>(k) * h) / h;
    const double y0 = y[static_cast<std::size_t>(k)];
    const double y1 = y[static_cast<std::size_t>(k + 1)];
    const double m0 = m[static_cast<std::size_t>(k)] * h;
    const double m1 = m[static_cast<std::size_t>(k + 1)] * h;
    const double xi2 = xi * xi;
    const double xi3 = xi2 * xi;
    return (2.0 * xi3 - 3.0 * xi2 + 1.0) * y0 + (xi3 - 2.0 * xi2 + xi) * m0 +
           (-2.0 * xi3 + 3.0 * xi2) * y1 + (xi3 - xi2) * m1;
}

} // namespace

double gamma_constant(int N) {
    if (N < 1)
        throw std::invalid_argument("gamma_constant: N must be >= 1");
    const double floor = ipow(0.25, N);
    auto f = [&](double s) { return clamped_power(std::max(ipow(s, N) - floor, 0.0),
                                                  1.0 / static_cast<double>(N)); };
    // tanh-sinh handles the (s - 1/4)^{1/N} endpoint derivative singularity.
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, 0.25, 0.75, 1e-13);
}

double gamma1_constant(int N, double alpha, double beta) {
    const double g = gamma_constant(N);
    const double an = alpha / static_cast<double>(N);
    const double p = alpha * beta / (static_cast<double>(N) * static_cast<double>(N));
    return std::pow(g, 1.0 + an) * std::pow(4.0, -an - p);
}

BoundsReport verify_bounds(const RadialProfile& v, const ProblemSpec& spec) {
    BoundsReport rep;
    rep.p = spec.homogeneity();
    rep.gamma1 = gamma1_constant(spec.N, spec.alpha, spec.beta);
    rep.in_cone = cone_report(v).passes();

    const double nv = sup_norm(v);
    const double nv_p = clamped_power(nv, rep.p);
    const double nTv = sup_norm(apply_T(v, spec));

    rep.upper_margin = nv_p - nTv;
    rep.pass = rep.upper_margin >= -kBoundMarginTol;
    if (rep.in_cone) {
        rep.lower_margin = nTv - rep.gamma1 * nv_p;
        rep.pass = rep.pass && *rep.lower_margin >= -kBoundMarginTol;
    }
    return rep;
}

ResidualReport ode_residual(const RadialProfile& v1, const RadialProfile& v2,
                            const ProblemSpec& spec) {
    if (!(v1.grid() == v2.grid()))
        throw std::invalid_argument("ode_residual: profiles must share a grid");

    ResidualReport rep;
    rep.ode_residual_sup = std::max(ode_defect(v1, v2, spec.alpha, spec.lambda, spec.N),
                                    ode_defect(v2, v1, spec.beta, spec.mu, spec.N));
    rep.boundary_v1_at_1 = std::fabs(v1[v1.size() - 1]);
    rep.boundary_v2_at_1 = std::fabs(v2[v2.size() - 1]);
    rep.boundary_dv1_at_0 = std::fabs(one_sided_derivative_at_0(v1));
    rep.boundary_dv2_at_0 = std::fabs(one_sided_derivative_at_0(v2));
    return rep;
}

double pde_residual(const RadialProfile& v, const RadialProfile& rhs, int N, double t_cut) {
    if (!(t_cut > 0.0) || t_cut > 0.25)
        throw std::invalid_argument("pde_residual: t_cut must lie in (0, 1/4]");
    if (!(v.grid() == rhs.grid()))
        throw std::invalid_argument("pde_residual: profiles must share a grid");

    const int n = v.size();
    const double h = v.grid().spacing();

    std::vector<double> phi(static_cast<std::size_t>(n));
    double sup_rhs = 0.0;
    for (int i = 0; i < n; ++i) {
        phi[static_cast<std::size_t>(i)] = std::max(rhs[i], 0.0);
        sup_rhs = std::max(sup_rhs, std::fabs(rhs[i]));
    }
    const std::vector<double> I = kernel_cumulative(v.grid(), phi, N);
    const std::vector<double> d = central_diff(v.values(), h);

    const double inner_expo = (1.0 - static_cast<double>(N)) / static_cast<double>(N);
    double sup_defect = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double t = v.grid().node(i);
        if (t < t_cut)
            continue;
        const double Ii = I[static_cast<std::size_t>(i)];
        // I(t) = 0 forces rhs == 0 on [0, t]; the second derivative vanishes
        // there along with the right side.
        const double udd =
            Ii > 0.0 ? ipow(t, N - 1) * rhs[i] * std::pow(Ii, inner_expo) : 0.0;
        const double up = -d[static_cast<std::size_t>(i)];
        const double det = udd * clamped_power(up / t, N - 1);
        sup_defect = std::max(sup_defect, std::fabs(det - rhs[i]));
    }
    return sup_rhs > 0.0 ? sup_defect / sup_rhs : sup_defect;
}

ResidualReport full_residual_report(const RadialProfile& v1, const RadialProfile& v2,
                                    const ProblemSpec& spec) {
    ResidualReport rep = ode_residual(v1, v2, spec);
    const RadialProfile rhs1 = power_rhs(v2, spec.alpha, spec.lambda);
    const RadialProfile rhs2 = power_rhs(v1, spec.beta, spec.mu);
    rep.pde_residual_sup = std::max(pde_residual(v1, rhs1, spec.N, kPdeDefaultCut),
                                    pde_residual(v2, rhs2, spec.N, kPdeDefaultCut));
    return rep;
}

ThresholdBracket threshold_bracket(int N, double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("threshold_bracket: alpha must be positive");
    ThresholdBracket b;
    b.gamma = gamma_constant(N);
    b.gamma1 = std::pow(b.gamma, 1.0 + alpha / static_cast<double>(N)) *
               std::pow(4.0, -alpha / static_cast<double>(N) - 1.0);
    b.lower = 1.0;
    b.upper = std::pow(4.0 / b.gamma, static_cast<double>(N) + alpha);
    return b;
}

std::vector<double> reconstruct_ball(const RadialProfile& v, int dim,
                                     std::span<const std::vector<double>> points) {
    if (dim < 1)
        throw std::invalid_argument("reconstruct_ball: dim must be >= 1");
    const double h = v.grid().spacing();
    const std::vector<double> slopes = pchip_slopes(v.values(), h);

    std::vector<double> out;
    out.reserve(points.size());
    std::vector<double> sq(static_cast<std::size_t>(dim));
    for (const auto& x : points) {
        if (static_cast<int>(x.size()) != dim)
            throw std::invalid_argument("reconstruct_ball: point dimension mismatch");
        for (int k = 0; k < dim; ++k)
            sq[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] *
                                              x[static_cast<std::size_t>(k)];
        // Summing the sorted squares makes the radius exactly invariant under
        // coordinate permutations and sign flips.
        std::sort(sq.begin(), sq.end());
        double r2 = 0.0;
        for (double s : sq)
            r2 += s;
        double r = std::sqrt(r2);
        if (r > 1.0 + 1e-12)
            throw OutOfDomainError("reconstruct_ball: point outside the closed unit ball");
        r = std::min(r, 1.0);
        out.push_back(-pchip_eval(v.values(), slopes, h, r));
    }
    return out;
}

double critical_radius(int N, double alpha) {
    return principal_constant(N, alpha).critical_radius;
}

} // namespace macouple
