#include "macouple/record.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace macouple {

namespace {

using nlohmann::json;

Regime regime_from_string(const std::string& s) {
    if (s == "sublinear")
        return Regime::sublinear;
    if (s == "balanced")
        return Regime::balanced;
    if (s == "superlinear")
        return Regime::superlinear;
    throw std::invalid_argument("unknown regime: " + s);
}

SolveStatus status_from_string(const std::string& s) {
    if (s == "converged")
        return SolveStatus::converged;
    if (s == "nonexistence_certified")
        return SolveStatus::nonexistence_certified;
    if (s == "max_iter_exceeded")
        return SolveStatus::max_iter_exceeded;
    throw std::invalid_argument("unknown status: " + s);
}

json profile_to_json(const RadialProfile& p) {
    return json(std::vector<double>(p.values().begin(), p.values().end()));
}

RadialProfile profile_from_json(const GridPtr& g, const json& j) {
    return RadialProfile(g, j.get<std::vector<double>>());
}

json residuals_to_json(const ResidualReport& r) {
    return json{{"ode", r.ode_residual_sup},
                {"pde", r.pde_residual_sup},
                {"boundary",
                 {{"v1_at_1", r.boundary_v1_at_1},
                  {"v2_at_1", r.boundary_v2_at_1},
                  {"dv1_at_0", r.boundary_dv1_at_0},
                  {"dv2_at_0", r.boundary_dv2_at_0}}}};
}

ResidualReport residuals_from_json(const json& j) {
    ResidualReport r;
    r.ode_residual_sup = j.at("ode").get<double>();
    r.pde_residual_sup = j.at("pde").get<double>();
    const json& b = j.at("boundary");
    r.boundary_v1_at_1 = b.at("v1_at_1").get<double>();
    r.boundary_v2_at_1 = b.at("v2_at_1").get<double>();
    r.boundary_dv1_at_0 = b.at("dv1_at_0").get<double>();
    r.boundary_dv2_at_0 = b.at("dv2_at_0").get<double>();
    return r;
}

json record_to_json(const RunRecord& rec) {
    json doc;
    doc["schema_version"] = rec.schema_version;
    doc["kind"] = rec.kind;
    doc["spec"] = {{"N", rec.spec.N},
                   {"alpha", rec.spec.alpha},
                   {"beta", rec.spec.beta},
                   {"lambda", rec.spec.lambda},
                   {"mu", rec.spec.mu}};
    doc["config"] = {{"grid_n", rec.grid_n},
                     {"tol_fixpoint", rec.tol_fixpoint},
                     {"max_iter", rec.max_iter},
                     {"initial_profile", rec.initial}};
    doc["tool_version"] = rec.tool_version;
    doc["input_hash"] = rec.hash;
    if (rec.timestamp)
        doc["timestamp"] = *rec.timestamp;

    if (rec.solve) {
        const SolveResult& s = *rec.solve;
        doc["status"] = to_string(s.status);
        doc["regime"] = to_string(s.regime);
        doc["norms"] = {{"v1", sup_norm(s.v1)}, {"v2", sup_norm(s.v2)}};
        doc["residuals"] = residuals_to_json(s.residuals);
        doc["iterations"] = s.iterations;
        doc["final_change"] = s.final_change;
        if (!s.classification.empty())
            doc["classification"] = s.classification;
        const Grid& g = s.v1.grid();
        std::vector<double> t(g.nodes().begin(), g.nodes().end());
        doc["profiles"] = {{"t", t},
                           {"v1", profile_to_json(s.v1)},
                           {"v2", profile_to_json(s.v2)},
                           {"u1", profile_to_json(s.u1)},
                           {"u2", profile_to_json(s.u2)}};
        doc["trace"] = s.trace;
    }
    if (rec.eigen) {
        const EigenResult& e = *rec.eigen;
        doc["eigen"] = {{"kappa", e.kappa},
                        {"C", e.C},
                        {"critical_radius", e.critical_radius},
                        {"iterations", e.iterations},
                        {"ratio_spread", e.ratio_spread}};
        doc["eigen_shape"] = profile_to_json(e.eigen_shape);
    }
    if (rec.cross_check)
        doc["cross_check"] = {{"lambda1", rec.cross_check->first},
                              {"rel_diff", rec.cross_check->second}};
    return doc;
}

RunRecord record_from(const json& doc) {
    const json& jspec = doc.at("spec");
    ProblemSpec spec(jspec.at("N").get<int>(), jspec.at("alpha").get<double>(),
                     jspec.at("beta").get<double>(), jspec.at("lambda").get<double>(),
                     jspec.at("mu").get<double>());
    RunRecord rec{.schema_version = doc.at("schema_version").get<int>(),
                  .kind = doc.at("kind").get<std::string>(),
                  .spec = spec};
    const json& jcfg = doc.at("config");
    rec.grid_n = jcfg.at("grid_n").get<int>();
    rec.tol_fixpoint = jcfg.at("tol_fixpoint").get<double>();
    rec.max_iter = jcfg.at("max_iter").get<int>();
    rec.initial = jcfg.at("initial_profile").get<std::string>();
    rec.tool_version = doc.at("tool_version").get<std::string>();
    rec.hash = doc.at("input_hash").get<std::string>();
    if (doc.contains("timestamp"))
        rec.timestamp = doc.at("timestamp").get<std::string>();

    GridPtr grid = make_grid(rec.grid_n);
    if (doc.contains("profiles")) {
        SolveResult s(grid, regime_from_string(doc.at("regime").get<std::string>()));
        s.status = status_from_string(doc.at("status").get<std::string>());
        s.iterations = doc.at("iterations").get<int>();
        s.final_change = doc.at("final_change").get<double>();
        s.residuals = residuals_from_json(doc.at("residuals"));
        s.residual_sup = s.residuals.ode_residual_sup;
        if (doc.contains("classification"))
            s.classification = doc.at("classification").get<std::string>();
        const json& p = doc.at("profiles");
        s.v1 = profile_from_json(grid, p.at("v1"));
        s.v2 = profile_from_json(grid, p.at("v2"));
        s.u1 = profile_from_json(grid, p.at("u1"));
        s.u2 = profile_from_json(grid, p.at("u2"));
        s.trace = doc.at("trace").get<std::vector<double>>();
        rec.solve = std::move(s);
    }
    if (doc.contains("eigen")) {
        const json& je = doc.at("eigen");
        EigenResult e{je.at("kappa").get<double>(),
                      je.at("C").get<double>(),
                      je.at("critical_radius").get<double>(),
                      profile_from_json(grid, doc.at("eigen_shape")),
                      je.at("iterations").get<int>(),
                      je.at("ratio_spread").get<double>()};
        if (rec.solve)
            rec.solve->eigen = e;
        rec.eigen = std::move(e);
    }
    if (doc.contains("cross_check")) {
        const json& jc = doc.at("cross_check");
        rec.cross_check = {jc.at("lambda1").get<double>(), jc.at("rel_diff").get<double>()};
    }
    return rec;
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    if (ec != std::errc())
        throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

std::string input_hash(const ProblemSpec& spec, int grid_n, double tol, int max_iter,
                       const std::string& initial) {
    std::ostringstream canon;
    canon << "N=" << spec.N << ";alpha=" << format_double(spec.alpha)
          << ";beta=" << format_double(spec.beta) << ";lambda=" << format_double(spec.lambda)
          << ";mu=" << format_double(spec.mu) << ";grid=" << grid_n
          << ";tol=" << format_double(tol) << ";max_iter=" << max_iter << ";init=" << initial;
    const std::string s = canon.str();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string to_json_string(const RunRecord& rec) { return record_to_json(rec).dump(2) + "\n"; }

RunRecord record_from_json(const std::string& text) {
    return record_from(json::parse(text));
}

void save_record(const RunRecord& rec, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << to_json_string(rec);
}

RunRecord load_record(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return record_from_json(buf.str());
}

bool operator==(const RunRecord& a, const RunRecord& b) {
    return to_json_string(a) == to_json_string(b);
}

std::string to_csv(const SolveResult& res) {
    std::ostringstream out;
    out << "t,v1,v2,u1,u2\n";
    const Grid& g = res.v1.grid();
    for (int i = 0; i < g.size(); ++i)
        out << format_double(g.node(i)) << ',' << format_double(res.v1[i]) << ','
            << format_double(res.v2[i]) << ',' << format_double(res.u1[i]) << ','
            << format_double(res.u2[i]) << '\n';
    return out.str();
}

void save_csv(const SolveResult& res, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    out << to_csv(res);
}

VerifyReport verify_record(const RunRecord& rec) {
    VerifyReport rep;
    rep.add("schema", rec.schema_version == kSchemaVersion);
    rep.add("kind", rec.kind == "solve" || rec.kind == "eigen");
    rep.add("input_hash", rec.hash == input_hash(rec.spec, rec.grid_n, rec.tol_fixpoint,
                                                 rec.max_iter, rec.initial));

    if (rec.solve) {
        const SolveResult& s = *rec.solve;
        rep.add("regime", s.regime == rec.spec.regime());

        const Grid& g = s.v1.grid();
        const double h = g.spacing();
        const double sup1 = sup_norm(s.v1);
        const double sup2 = sup_norm(s.v2);

        bool mirrored = true;
        for (int i = 0; i < s.v1.size(); ++i)
            mirrored = mirrored && std::fabs(s.u1[i] + s.v1[i]) <= 1e-12 * std::max(1.0, sup1) &&
                       std::fabs(s.u2[i] + s.v2[i]) <= 1e-12 * std::max(1.0, sup2);
        rep.add("u_equals_minus_v", mirrored);

        if (s.status == SolveStatus::converged) {
            const ResidualReport fresh = full_residual_report(s.v1, s.v2, rec.spec);
            rep.add("ode_residual", fresh.ode_residual_sup <= kOdeResidualGateFactor * h * h);
            rep.add("pde_residual", fresh.pde_residual_sup <= kPdeResidualGateFactor * h * h);
            rep.add("residuals_match",
                    std::fabs(fresh.ode_residual_sup - s.residuals.ode_residual_sup) <=
                        1e-9 * (1.0 + s.residuals.ode_residual_sup));
            const double fp = [&] {
                const RadialProfile t1 = apply_T1_scaled(s.v2, rec.spec);
                double num = 0.0;
                for (int i = 0; i < t1.size(); ++i)
                    num = std::max(num, std::fabs(t1[i] - s.v1[i]));
                return sup1 > 0.0 ? num / sup1 : num;
            }();
            rep.add("fixed_point", fp <= std::max(100.0 * rec.tol_fixpoint, 1e-5));
            rep.add("boundary",
                    s.residuals.boundary_v1_at_1 <= 1e-10 * std::max(1.0, sup1) &&
                        s.residuals.boundary_v2_at_1 <= 1e-10 * std::max(1.0, sup2) &&
                        s.residuals.boundary_dv1_at_0 <=
                            100.0 * h * h * std::max(1.0, sup1) &&
                        s.residuals.boundary_dv2_at_0 <= 100.0 * h * h * std::max(1.0, sup2));
        }
        if (s.status == SolveStatus::nonexistence_certified) {
            const bool has_eigen = rec.eigen.has_value();
            rep.add("nonexistence_margin",
                    has_eigen && std::fabs(rec.spec.scale_product() - rec.eigen->C) >
                                     1e-6 * rec.eigen->C);
        }
    }

    if (rec.eigen) {
        const EigenResult& e = *rec.eigen;
        const ThresholdBracket b = threshold_bracket(rec.spec.N, rec.spec.alpha);
        rep.add("eigen_bracket", e.C > b.lower && e.C <= b.upper * (1.0 + 1e-9));
        const double expo = 2.0 * (static_cast<double>(rec.spec.N) + rec.spec.alpha);
        rep.add("eigen_identity", std::fabs(std::pow(e.critical_radius, expo) - e.C) <=
                                      1e-12 * e.C);
        rep.add("ratio_spread", e.ratio_spread <= 1e-5 * e.kappa);
        rep.add("eigen_shape_norm", std::fabs(sup_norm(e.eigen_shape) - 1.0) <= 1e-12);
    }

    if (rec.cross_check) {
        SolveConfig cfg(make_grid(rec.grid_n));
        cfg.tol_fixpoint = rec.tol_fixpoint;
        cfg.max_iter = rec.max_iter;
        const double lam1 = single_equation_eigen(rec.spec.N, cfg);
        const double identity = std::pow(lam1, 2.0 * rec.spec.N);
        const bool have_C = rec.eigen.has_value();
        rep.add("cross_check", have_C && rec.cross_check->second <= 1e-4 &&
                                   std::fabs(identity - rec.eigen->C) <= 1e-4 * rec.eigen->C);
    }
    return rep;
}

} // namespace macouple
