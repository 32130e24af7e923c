#pragma once

// Problem and report JSON (schema "semiflow/1") and the combined index report.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "semiflow/conjugate.hpp"
#include "semiflow/system.hpp"

namespace semiflow {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "semiflow/1";

/// Overrides applied on top of a problem file (command-line flags).
struct ProblemOverrides {
    std::optional<int> steps;
    std::optional<double> rank_rel_tol;
    std::optional<double> instant_tol;
    std::optional<double> o_height;
    std::optional<double> delta;
};

/// Explicit form:  {"n", "nu", "field": {"kind", "matrices", "sin_matrices"},
///                  "o_height", "tolerances": {...}, "delta"}
/// Generator form: {"generator": {"kind": "constant-diagonal", "n", "nu", "diagonal"} | ...}
/// Throws InvalidInput on malformed documents.
ProblemSystem parse_problem(const Json& doc, const ProblemOverrides& overrides = {});
ProblemSystem load_problem(const std::string& path, const ProblemOverrides& overrides = {});  // "-" reads stdin

/// Explicit form of sys (generator input is emitted as its field).
Json problem_to_json(const ProblemSystem& sys);

struct InstantEntry {
    double t = 0.0;
    int multiplicity = 0;
    std::optional<int> signature;  // empty when irregular

    friend bool operator==(const InstantEntry&, const InstantEntry&) = default;
};

struct ReportDiagnostics {
    int winding_samples = 0;
    double max_phase_step = 0.0;
    double symplectic_residual = 0.0;
    double delta = 0.0;
    int unresolved_dips = 0;

    friend bool operator==(const ReportDiagnostics&, const ReportDiagnostics&) = default;
};

struct IndexReport {
    std::vector<InstantEntry> instants;
    int mu_spec = 0;
    int mu_con = 0;
    int mu_maslov = 0;
    std::optional<int> i_con;
    bool agreement = false;
    ReportDiagnostics diagnostics;

    friend bool operator==(const IndexReport&, const IndexReport&) = default;
};

IndexReport index_report(const ProblemSystem& sys);

Json instants_to_json(const std::vector<ConjugateInstant>& instants);
Json report_to_json(const IndexReport& r);
IndexReport report_from_json(const Json& j);

/// Locale-independent shortest-safe decimal: 17 significant digits.
std::string format_real(double x);

}  // namespace semiflow
