#pragma once

// Delta-series studies built on point evaluations of the operators.

#include "operators.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace peridyn {

struct DeltaSeries {
    std::vector<double> deltas;

    /// Throws InvalidArgument unless the values are positive, finite and strictly decreasing.
    static DeltaSeries make(std::vector<double> deltas);
    /// 0.1, 0.05, 0.025, 0.0125, 0.00625
    static DeltaSeries standard();
    /// d_min 2^k for k = 4, ..., 0
    static DeltaSeries halving_to(double delta_min, int count = 5);
};

struct StudyOptions {
    int radial_order = kDefaultRadialOrder;
    int angular_order = kDefaultAngularOrder;
    LdForm ld_form = LdForm::Reduced;
    double p = 2.0;  // norm exponent; infinity selects the max norm
    int threads = 1;
};

struct PointRecord {
    double delta = 0.0;
    int point_id = 0;
    Vec3 v;
    double err_p = 0.0;

    friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

struct RateFit {
    double slope = 0.0;
    bool exact = false;  // every error below the exactness tolerance; slope is not fitted
};

struct ConvergenceReport {
    std::string study;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::vector<double> deltas;
    /// Ordered by delta index, then point id.
    std::vector<PointRecord> records;
    /// One aggregated value per delta (discrete norm or single-point magnitude).
    std::vector<double> aggregate;
    RateFit fit;
    std::optional<Vec3> limit_estimate;
    std::optional<Vec3> expected;

    const PointRecord& record(std::size_t delta_index, int point_id) const;
};

/// Least-squares slope of log(e) against log(delta).
/// Throws InvalidArgument with fewer than 3 positive errors unless the series is exact.
RateFit fit_rate(const std::vector<double>& deltas, const std::vector<double>& errors, double exact_tol = 1e-12);

/// Linear extrapolation to delta = 0 through the two smallest deltas.
Vec3 richardson_limit(double d_fine, const Vec3& v_fine, double d_coarse, const Vec3& v_coarse);

/// (mean |e_i|^p)^(1/p); p = infinity gives max |e_i|. Throws InvalidArgument for p < 1.
double discrete_lp(const std::vector<double>& values, double p);

/// Cell centers of an n^3 lattice on [lo, hi]^3.
std::vector<Vec3> lattice_points(int n, double lo = 0.0, double hi = 1.0);

/// Drops points with |d| < width (no-op without an interface).
std::vector<Vec3> exclude_band(const std::vector<Vec3>& points, const std::optional<PlanarInterface>& plane,
                               double width);

/// Records v = L - N, err_p = |v|; aggregate = discrete L^p norm over points.
/// Throws Domain if a point lies within 2 delta_max of a two-phase interface.
ConvergenceReport converge_to_navier(const DeltaSeries& series, const Material& material, const PiecewiseField& field,
                                     const std::vector<Vec3>& points, const StudyOptions& opt);

/// Records v = L(x), err_p = |v|. Throws Domain unless x lies on the interface.
ConvergenceReport interface_blowup(const DeltaSeries& series, const Material& material, const PiecewiseField& field,
                                   const Vec3& x, const StudyOptions& opt);

/// Records v = delta L(x), err_p = |v - formula|; the limit is extrapolated from the two smallest deltas.
ConvergenceReport natural_limit_check(const DeltaSeries& series, const Material& material,
                                      const PiecewiseField& field, const Vec3& x, const StudyOptions& opt);

/// Records v = delta L_star(x), err_p = |v - (45/32) traction jump|.
ConvergenceReport star_limit_check(const DeltaSeries& series, const Material& material, const PiecewiseField& field,
                                   const Vec3& x, const StudyOptions& opt);

/// Records v = L_star - N for points with |d| >= delta and v = delta L_star for points
/// inside the extended interface (err_p = |v| in both cases). The aggregate norm uses
/// only the points outside the extended interface.
ConvergenceReport star_converges_offinterface(const DeltaSeries& series, const Material& material,
                                              const PiecewiseField& field, const std::vector<Vec3>& points,
                                              const StudyOptions& opt);

/// Lossless JSON form {study, params, deltas, records, aggregate, slope, exact, limit_estimate, expected}.
nlohmann::ordered_json report_to_json(const ConvergenceReport& r);
ConvergenceReport report_from_json(const nlohmann::ordered_json& j);

/// RFC 4180 CSV with header delta,point_id,vx,vy,vz,err_p and 17 significant digits.
void write_records_csv(std::ostream& os, const std::vector<PointRecord>& records);
std::vector<PointRecord> read_records_csv(std::istream& is);

/// %.16e formatting shared by every CSV writer.
std::string format_real(double v);

}  // namespace peridyn
