#include "macouple/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "macouple/errors.hpp"

namespace macouple {

namespace {

constexpr int kMinNodes = 16;

// t^n for small integer n; keeps the kernel moments at full accuracy.
double ipow(double t, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k)
        r *= t;
    return r;
}

} // namespace

Grid::Grid(int n_nodes) {
    if (n_nodes < kMinNodes)
        throw std::invalid_argument("Grid: need at least 16 nodes");
    nodes_.resize(static_cast<std::size_t>(n_nodes));
    const double denom = static_cast<double>(n_nodes - 1);
    for (int i = 0; i < n_nodes; ++i)
        nodes_[static_cast<std::size_t>(i)] = static_cast<double>(i) / denom;
    spacing_ = 1.0 / denom;
}

GridPtr make_grid(int n_nodes) { return std::make_shared<const Grid>(n_nodes); }

RadialProfile::RadialProfile(GridPtr grid)
    : grid_(std::move(grid)), values_(static_cast<std::size_t>(grid_->size()), 0.0) {}

RadialProfile::RadialProfile(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_->size())
        throw std::invalid_argument("RadialProfile: value count does not match grid");
    for (double x : values_)
        if (!std::isfinite(x))
            throw std::invalid_argument("RadialProfile: non-finite value");
}

double sup_norm(const RadialProfile& v) {
    double m = 0.0;
    for (double x : v.values())
        m = std::max(m, std::fabs(x));
    return m;
}

double clamped_power(double x, double p) {
    if (x <= 0.0)
        return 0.0;
    return std::pow(std::max(x, 1e-300), p);
}

std::vector<double> nonnegative_values(const RadialProfile& v) {
    const double tol = 1e-12 * sup_norm(v);
    std::vector<double> out(v.values().begin(), v.values().end());
    for (double& x : out) {
        if (x < -tol)
            throw NegativeInputError("profile value below the negative-input tolerance");
        if (x < 0.0)
            x = 0.0;
    }
    return out;
}

std::vector<double> kernel_cumulative(const Grid& g, std::span<const double> phi, int N) {
    if (N < 1)
        throw std::invalid_argument("kernel_cumulative: N must be >= 1");
    if (static_cast<int>(phi.size()) != g.size())
        throw std::invalid_argument("kernel_cumulative: phi size does not match grid");

    const int n = g.size();
    const double h = g.spacing();
    const double ratio = static_cast<double>(N) / static_cast<double>(N + 1);

    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    double tl = g.node(0);
    double pl = ipow(tl, N);
    double ql = ipow(tl, N + 1);
    for (int j = 1; j < n; ++j) {
        const double tr = g.node(j);
        const double pr = ipow(tr, N);
        const double qr = ipow(tr, N + 1);
        const double P = pr - pl;
        const double Q = ratio * (qr - ql);
        // Exact first moments of N tau^{N-1} against the linear hat pair on
        // the cell; clamped at zero so round-off cancellation can never make
        // the cumulative decrease.
        const double wl = std::max((tr * P - Q) / h, 0.0);
        const double wr = std::max((Q - tl * P) / h, 0.0);
        acc[static_cast<std::size_t>(j)] =
            acc[static_cast<std::size_t>(j - 1)] + wl * phi[static_cast<std::size_t>(j - 1)] +
            wr * phi[static_cast<std::size_t>(j)];
        tl = tr;
        pl = pr;
        ql = qr;
    }
    return acc;
}

RadialProfile inner_cumulative(const RadialProfile& v, double gamma, int N) {
    if (gamma <= 0.0)
        throw std::invalid_argument("inner_cumulative: gamma must be positive");
    std::vector<double> phi = nonnegative_values(v);
    for (double& x : phi)
        x = clamped_power(x, gamma);
    std::vector<double> acc = kernel_cumulative(v.grid(), phi, N);
    const double root = 1.0 / static_cast<double>(N);
    for (double& x : acc)
        x = clamped_power(x, root);
    return RadialProfile(v.grid_ptr(), std::move(acc));
}

RadialProfile outer_tail(const RadialProfile& w) {
    const int n = w.size();
    const double h = w.grid().spacing();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 2; i >= 0; --i)
        out[static_cast<std::size_t>(i)] =
            out[static_cast<std::size_t>(i + 1)] + 0.5 * h * (w[i] + w[i + 1]);
    return RadialProfile(w.grid_ptr(), std::move(out));
}

ConeReport cone_report(const RadialProfile& v, double tol) {
    ConeReport rep;
    rep.tolerance_used = tol;

    const int n = v.size();
    double minval = v[0];
    for (int i = 1; i < n; ++i)
        minval = std::min(minval, v[i]);
    rep.nonnegative = minval >= -tol;

    double max_second_diff = 0.0;
    for (int i = 1; i + 1 < n; ++i)
        max_second_diff = std::max(max_second_diff, v[i + 1] - 2.0 * v[i] + v[i - 1]);
    rep.concave_within_tol = max_second_diff <= tol;

    const double sup = sup_norm(v);
    double window_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double t = v.grid().node(i);
        if (t >= 0.25 - 1e-12 && t <= 0.75 + 1e-12)
            window_min = std::min(window_min, v[i]);
    }
    // The zero profile belongs to the cone; report ratio 1 so it passes.
    rep.harnack_ratio = sup > 0.0 ? window_min / sup : 1.0;
    return rep;
}

ConeReport cone_report(const RadialProfile& v) {
    const double h = v.grid().spacing();
    return cone_report(v, 10.0 * h * h);
}

} // namespace macouple
