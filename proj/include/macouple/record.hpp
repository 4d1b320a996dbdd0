#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "macouple/solvers.hpp"

namespace macouple {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Locale-independent numeric formatting with 17 significant digits
/// (round-trip exact for doubles).
std::string format_double(double x);

/// FNV-1a hash of the canonical problem + config description, as a hex string.
std::string input_hash(const ProblemSpec& spec, int grid_n, double tol, int max_iter,
                       const std::string& initial);

/// Persistable description of one solver or eigen run. Timestamps are only
/// attached on request so that repeated runs with identical flags produce
/// byte-identical documents.
struct RunRecord {
    int schema_version = kSchemaVersion;
    std::string kind; ///< "solve" or "eigen"
    ProblemSpec spec;
    int grid_n = 0;
    double tol_fixpoint = 0.0;
    int max_iter = 0;
    std::string initial = "parabola";
    std::string tool_version = kToolVersion;
    std::string hash;
    std::optional<std::string> timestamp;

    std::optional<SolveResult> solve;
    std::optional<EigenResult> eigen;
    /// Cross-check payload for eigen runs with alpha = N: the single-equation
    /// principal eigenvalue and the relative defect of C vs lambda_1^{2N}.
    std::optional<std::pair<double, double>> cross_check;
};

std::string to_json_string(const RunRecord& rec);
RunRecord record_from_json(const std::string& text);

void save_record(const RunRecord& rec, const std::filesystem::path& path);
RunRecord load_record(const std::filesystem::path& path);

/// Field-for-field equality (via the canonical serialization).
bool operator==(const RunRecord& a, const RunRecord& b);

/// Profile table `t,v1,v2,u1,u2`, one row per node, 17 significant digits.
std::string to_csv(const SolveResult& res);
void save_csv(const SolveResult& res, const std::filesystem::path& path);

/// Named re-checks of a stored run; `ok` iff every gate holds.
struct VerifyReport {
    std::vector<std::pair<std::string, bool>> gates;
    bool ok = true;

    void add(const std::string& name, bool pass) {
        gates.emplace_back(name, pass);
        ok = ok && pass;
    }
};

VerifyReport verify_record(const RunRecord& rec);

} // namespace macouple
