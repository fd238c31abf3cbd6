#pragma once

// Named studies shared by the command line and the C API. Each run carries
// its own PASS/FAIL checks and renders one CSV table and one JSON report.

#include "analysis.hpp"
#include "solver.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace peridyn {

enum class StudyKind { Moments, KDelta, Converge, Blowup, Natural, Star, Solve };

const char* study_name(StudyKind k);

struct MaterialSpec {
    enum class Kind { CaseDefault, TwoPhase, Homogeneous };
    Kind kind = Kind::CaseDefault;
    /// lambda+, mu+, lambda-, mu- (two-phase) or lambda, mu (homogeneous).
    std::array<double, 4> values{};
};

/// Parses "default" (the case material), "two-phase:l+,m+,l-,m-" or "homogeneous:l,m". Throws Config.
MaterialSpec parse_material_spec(const std::string& text);

struct StudyConfig {
    StudyKind study = StudyKind::Moments;
    std::string field;  // empty selects the study default
    MaterialSpec material;
    Vec3 normal{0.0, 0.0, 1.0};
    /// Point on the interface; interface studies evaluate there.
    Vec3 origin{0.5, 0.5, 0.5};
    std::vector<double> deltas;  // empty selects the study default
    std::optional<double> delta_min;
    int radial_order = kDefaultRadialOrder;
    int angular_order = kDefaultAngularOrder;
    LdForm ld_form = LdForm::Reduced;
    double p = 2.0;
    int threads = 0;
    /// converge only: "L" compares L with N, "star" compares L_star with N.
    std::string op = "L";
    int samples = 5;
    double sample_lo = 0.0;
    double sample_hi = 1.0;
    Box box;
    double h = 1.0 / 16.0;
    double ratio = 3.0;
    /// solve only: "navier" sets b = N u of the manufactured field, "zero" sets b = 0.
    std::string body_force = "navier";
    std::string out_dir;
};

/// Keys: study, field, material, normal, origin, deltas, delta_min, quad, ld_form, p,
/// threads, operator, samples {n, lo, hi}, box {lo, hi}, h, ratio, body_force, out.
/// Unknown keys and malformed values throw Config.
StudyConfig parse_config(const nlohmann::json& j);

/// Resolved parameters echoed into reports (threads and output paths omitted).
nlohmann::ordered_json config_to_json(const StudyConfig& c);

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct StudyResult {
    std::string study;
    std::vector<Check> checks;
    std::string csv;
    nlohmann::ordered_json report;

    bool passed() const;
};

StudyResult run_study(const StudyConfig& c);

/// "PASS name value=... tol=... detail"
std::string check_line(const Check& c);

/// Writes <dir>/<study>.csv and <dir>/<study>.json, creating dir. Throws Io.
void write_outputs(const StudyResult& r, const std::string& dir);

}  // namespace peridyn
