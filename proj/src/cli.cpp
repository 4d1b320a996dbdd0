#include "macouple/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "macouple/record.hpp"

namespace macouple {

namespace {

constexpr int kExitNonexistence = 2;
constexpr int kExitMaxIter = 3;
constexpr int kExitUsage = 64;
constexpr int kExitDataErr = 65;
constexpr int kExitNoInput = 66;
constexpr int kDefaultGrid = 1025;

std::string iso_timestamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

/// --grid beats MA_COUPLE_GRID beats the built-in default.
int resolve_grid_n(const std::optional<int>& flag_value, std::string& err) {
    if (flag_value)
        return *flag_value;
    if (const char* env = std::getenv("MA_COUPLE_GRID")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 16) {
            err = "MA_COUPLE_GRID must be an integer >= 16, got '" + std::string(env) + "'";
            return -1;
        }
        return static_cast<int>(v);
    }
    return kDefaultGrid;
}

struct CommonOpts {
    std::optional<int> grid_n;
    double tol = 1e-10;
    int max_iter = 10000;
    std::string initial = "parabola";
    std::string out_path;
    bool timestamp = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--grid", o.grid_n, "grid node count (>= 16)")->check(CLI::Range(16, 1 << 24));
    cmd->add_option("--tol", o.tol, "fixed-point tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", o.max_iter, "iteration budget")->check(CLI::PositiveNumber);
    cmd->add_option("--init", o.initial, "initial profile preset");
    cmd->add_option("--out", o.out_path, "write the JSON result document here");
    cmd->add_flag("--timestamp", o.timestamp,
                  "attach a wall-clock timestamp (off by default: identical runs then "
                  "produce byte-identical documents)");
}

RunRecord base_record(const std::string& kind, const ProblemSpec& spec, const CommonOpts& o,
                      int grid_n) {
    RunRecord rec{.kind = kind, .spec = spec};
    rec.grid_n = grid_n;
    rec.tol_fixpoint = o.tol;
    rec.max_iter = o.max_iter;
    rec.initial = o.initial;
    rec.hash = input_hash(spec, grid_n, o.tol, o.max_iter, o.initial);
    if (o.timestamp)
        rec.timestamp = iso_timestamp_now();
    return rec;
}

void emit_document(const RunRecord& rec, const std::string& out_path, std::ostream& os) {
    if (out_path.empty())
        os << to_json_string(rec);
    else
        save_record(rec, out_path);
}

int cmd_solve(const ProblemSpec& spec, const CommonOpts& o, const std::string& csv_path) {
    std::string err;
    const int grid_n = resolve_grid_n(o.grid_n, err);
    if (grid_n < 0) {
        std::cerr << "error: " << err << "\n";
        return kExitUsage;
    }
    SolveConfig cfg(make_grid(grid_n));
    cfg.tol_fixpoint = o.tol;
    cfg.max_iter = o.max_iter;
    cfg.initial_preset = o.initial;

    const SolveResult res = solve_system(spec, cfg);

    RunRecord rec = base_record("solve", spec, o, grid_n);
    rec.solve = res;
    rec.eigen = res.eigen;
    emit_document(rec, o.out_path, std::cout);
    if (!csv_path.empty())
        save_csv(res, csv_path);

    if (!o.out_path.empty()) {
        std::cout << "status=" << to_string(res.status) << " regime=" << to_string(res.regime)
                  << " iterations=" << res.iterations
                  << " residual=" << format_double(res.residual_sup);
        if (res.eigen)
            std::cout << " C=" << format_double(res.eigen->C)
                      << " scale_product=" << format_double(spec.scale_product());
        std::cout << "\n";
        if (res.status == SolveStatus::nonexistence_certified)
            std::cout << "no radial convex solution: balanced regime with "
                         "lambda*mu^(alpha/N) away from the threshold constant C\n";
    }

    switch (res.status) {
    case SolveStatus::converged: return 0;
    case SolveStatus::nonexistence_certified: return kExitNonexistence;
    case SolveStatus::max_iter_exceeded: return kExitMaxIter;
    }
    return kExitMaxIter;
}

int cmd_eigen(int dim, double alpha, bool cross_check, const CommonOpts& o) {
    std::string err;
    const int grid_n = resolve_grid_n(o.grid_n, err);
    if (grid_n < 0) {
        std::cerr << "error: " << err << "\n";
        return kExitUsage;
    }
    if (cross_check && std::fabs(alpha - static_cast<double>(dim)) > 0.0) {
        std::cerr << "error: --cross-check requires alpha == dim (the single-equation "
                     "identity only holds there)\n";
        return kExitUsage;
    }
    SolveConfig cfg(make_grid(grid_n));
    cfg.tol_fixpoint = o.tol;
    cfg.max_iter = o.max_iter;
    cfg.initial_preset = o.initial;

    const double beta = static_cast<double>(dim) * static_cast<double>(dim) / alpha;
    const ProblemSpec spec(dim, alpha, beta, 1.0, 1.0);
    const EigenResult eig = principal_constant(dim, alpha, cfg);
    const ThresholdBracket bracket = threshold_bracket(dim, alpha);

    RunRecord rec = base_record("eigen", spec, o, grid_n);
    rec.eigen = eig;
    if (cross_check) {
        const double lam1 = single_equation_eigen(dim, cfg);
        const double identity = std::pow(lam1, 2.0 * dim);
        rec.cross_check = {lam1, std::fabs(eig.C - identity) / eig.C};
    }
    emit_document(rec, o.out_path, std::cout);

    std::ostream& os = std::cout;
    os << "kappa=" << format_double(eig.kappa) << " C=" << format_double(eig.C)
       << " critical_radius=" << format_double(eig.critical_radius) << " bracket=[1,"
       << format_double(bracket.upper) << "]"
       << " gamma=" << format_double(bracket.gamma) << "\n";
    if (rec.cross_check)
        os << "cross_check lambda1=" << format_double(rec.cross_check->first)
           << " rel_diff=" << format_double(rec.cross_check->second) << "\n";
    return 0;
}

struct SweepRow {
    double alpha = 0.0;
    double beta = 0.0;
    std::string regime = "error";
    std::string status = "error";
    double norm_v1 = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

int cmd_sweep(int dim, const std::vector<double>& alphas, const std::vector<double>& betas,
              int jobs, const CommonOpts& o) {
    if (alphas.empty() || betas.empty()) {
        std::cerr << "error: --alphas and --betas must be non-empty\n";
        return kExitUsage;
    }
    std::string err;
    const int grid_n = resolve_grid_n(o.grid_n, err);
    if (grid_n < 0) {
        std::cerr << "error: " << err << "\n";
        return kExitUsage;
    }

    std::vector<SweepRow> rows(alphas.size() * betas.size());
    const GridPtr grid = make_grid(grid_n);

    // Rows are independent solves; workers pull indices and write into their
    // own slot, so the emitted table is identical for any job count.
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= rows.size())
                return;
            const double a = alphas[i / betas.size()];
            const double b = betas[i % betas.size()];
            SweepRow row;
            row.alpha = a;
            row.beta = b;
            try {
                SolveConfig cfg(grid);
                cfg.tol_fixpoint = o.tol;
                cfg.max_iter = o.max_iter;
                cfg.initial_preset = o.initial;
                const ProblemSpec spec(dim, a, b);
                const SolveResult res = solve_system(spec, cfg);
                row.regime = to_string(res.regime);
                row.status = to_string(res.status);
                row.norm_v1 = sup_norm(res.v1);
                row.residual = res.residual_sup;
                row.iterations = res.iterations;
            } catch (const std::exception& e) {
                std::cerr << "row alpha=" << a << " beta=" << b << " failed: " << e.what()
                          << "\n";
            }
            rows[i] = std::move(row);
        }
    };
    const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(rows.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();

    std::ostringstream csv;
    csv << "alpha,beta,regime,status,norm_v1,residual,iterations\n";
    for (const SweepRow& r : rows)
        csv << format_double(r.alpha) << ',' << format_double(r.beta) << ',' << r.regime << ','
            << r.status << ',' << format_double(r.norm_v1) << ',' << format_double(r.residual)
            << ',' << r.iterations << '\n';

    if (o.out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << o.out_path << "\n";
            return 1;
        }
        out << csv.str();
    }
    return 0;
}

int cmd_verify(const std::string& record_path) {
    if (!std::filesystem::exists(record_path)) {
        std::cerr << "error: no such record: " << record_path << "\n";
        return kExitNoInput;
    }
    RunRecord rec = [&] {
        try {
            return load_record(record_path);
        } catch (const std::exception& e) {
            std::cerr << "error: malformed record: " << e.what() << "\n";
            std::exit(kExitDataErr);
        }
    }();
    const VerifyReport rep = verify_record(rec);
    for (const auto& [name, pass] : rep.gates)
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << "\n";
    std::cout << (rep.ok ? "verification passed" : "verification FAILED") << "\n";
    return rep.ok ? 0 : 1;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"radial solver for the power-coupled Monge-Ampere system on the unit ball"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "solve the coupled system");
    int dim = 2;
    double alpha = 1.0, beta = 1.0, lambda = 1.0, mu = 1.0;
    CommonOpts solve_opts;
    std::string csv_path;
    solve->add_option("--dim", dim, "space dimension N")->required()->check(CLI::Range(2, 64));
    solve->add_option("--alpha", alpha, "exponent alpha")->required()->check(CLI::PositiveNumber);
    solve->add_option("--beta", beta, "exponent beta")->required()->check(CLI::PositiveNumber);
    solve->add_option("--lambda", lambda, "scale lambda")->check(CLI::PositiveNumber);
    solve->add_option("--mu", mu, "scale mu")->check(CLI::PositiveNumber);
    solve->add_option("--csv", csv_path, "write the profile table (t,v1,v2,u1,u2) here");
    add_common(solve, solve_opts);

    // eigen
    auto* eigen = app.add_subcommand("eigen", "balanced-regime threshold constant");
    int edim = 2;
    double ealpha = 1.0;
    bool cross = false;
    CommonOpts eigen_opts;
    eigen->add_option("--dim", edim, "space dimension N")->required()->check(CLI::Range(2, 64));
    eigen->add_option("--alpha", ealpha, "exponent alpha (beta = N^2/alpha implied)")
        ->required()
        ->check(CLI::PositiveNumber);
    eigen->add_flag("--cross-check", cross,
                    "check C against the single-equation principal eigenvalue (alpha = N)");
    add_common(eigen, eigen_opts);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "classification table over exponent pairs");
    int sdim = 2;
    std::vector<double> alphas, betas;
    int jobs = 1;
    CommonOpts sweep_opts;
    sweep->add_option("--dim", sdim, "space dimension N")->required()->check(CLI::Range(2, 64));
    sweep->add_option("--alphas", alphas, "comma-separated alpha values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--betas", betas, "comma-separated beta values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--jobs", jobs, "parallel workers")->check(CLI::Range(1, 256));
    add_common(sweep, sweep_opts);

    // verify
    auto* verify = app.add_subcommand("verify", "re-check all gates of a stored run");
    std::string record_path;
    verify->add_option("--record", record_path, "path to a stored JSON result document")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help / --version
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (solve->parsed())
            return cmd_solve(ProblemSpec(dim, alpha, beta, lambda, mu), solve_opts, csv_path);
        if (eigen->parsed())
            return cmd_eigen(edim, ealpha, cross, eigen_opts);
        if (sweep->parsed())
            return cmd_sweep(sdim, alphas, betas, jobs, sweep_opts);
        if (verify->parsed())
            return cmd_verify(record_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("macouple");
    for (const std::string& a : args)
        argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace macouple
