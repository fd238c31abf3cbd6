#include "analysis.hpp"

#include "parallel.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace peridyn {

DeltaSeries DeltaSeries::make(std::vector<double> deltas) {
    if (deltas.empty()) fail(ErrorCode::InvalidArgument, "delta series is empty");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i]))
            fail(ErrorCode::InvalidArgument, "delta values must be positive and finite");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            fail(ErrorCode::InvalidArgument, "delta series must be strictly decreasing");
    }
    return {std::move(deltas)};
}

DeltaSeries DeltaSeries::standard() { return make({0.1, 0.05, 0.025, 0.0125, 0.00625}); }

DeltaSeries DeltaSeries::halving_to(double delta_min, int count) {
    if (count < 1) fail(ErrorCode::InvalidArgument, "delta series needs at least one value");
    std::vector<double> d;
    for (int k = count - 1; k >= 0; --k) d.push_back(std::ldexp(delta_min, k));
    return make(std::move(d));
}

const PointRecord& ConvergenceReport::record(std::size_t delta_index, int point_id) const {
    for (const auto& r : records) {
        if (r.delta == deltas.at(delta_index) && r.point_id == point_id) return r;
    }
    fail(ErrorCode::InvalidArgument, "no such record");
}

RateFit fit_rate(const std::vector<double>& deltas, const std::vector<double>& errors, double exact_tol) {
    if (deltas.size() != errors.size()) fail(ErrorCode::InvalidArgument, "deltas and errors differ in length");
    bool exact = !errors.empty();
    for (double e : errors) exact = exact && std::fabs(e) < exact_tol;
    if (exact) return {0.0, true};
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(errors[i] > 0.0) || !(deltas[i] > 0.0)) continue;
        const double x = std::log(deltas[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) fail(ErrorCode::InvalidArgument, "rate fit needs at least 3 positive errors");
    const double dn = static_cast<double>(n);
    const double den = dn * sxx - sx * sx;
    if (!(den > 0.0)) fail(ErrorCode::InvalidArgument, "rate fit needs distinct deltas");
    return {(dn * sxy - sx * sy) / den, false};
}

Vec3 richardson_limit(double d_fine, const Vec3& v_fine, double d_coarse, const Vec3& v_coarse) {
    if (!(d_coarse > d_fine)) fail(ErrorCode::InvalidArgument, "extrapolation needs two distinct deltas");
    return v_fine - (d_fine / (d_coarse - d_fine)) * (v_coarse - v_fine);
}

double discrete_lp(const std::vector<double>& values, double p) {
    if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "norm exponent must be at least 1");
    if (values.empty()) return 0.0;
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : values) m = std::fmax(m, std::fabs(v));
        return m;
    }
    double s = 0.0;
    for (double v : values) s += std::pow(std::fabs(v), p);
    return std::pow(s / static_cast<double>(values.size()), 1.0 / p);
}

std::vector<Vec3> lattice_points(int n, double lo, double hi) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "lattice needs at least one point per axis");
    std::vector<Vec3> pts;
    const double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) pts.push_back({lo + (i + 0.5) * h, lo + (j + 0.5) * h, lo + (k + 0.5) * h});
    return pts;
}

std::vector<Vec3> exclude_band(const std::vector<Vec3>& points, const std::optional<PlanarInterface>& plane,
                               double width) {
    if (!plane) return points;
    std::vector<Vec3> out;
    for (const auto& x : points) {
        if (std::fabs(signed_distance(*plane, x)) >= width) out.push_back(x);
    }
    return out;
}

namespace {

std::vector<OperatorConfig> configs_for(const DeltaSeries& s, const StudyOptions& opt) {
    std::vector<OperatorConfig> cfgs;
    for (double d : s.deltas) cfgs.push_back(make_config(d, opt.radial_order, opt.angular_order, opt.ld_form));
    return cfgs;
}

ConvergenceReport start_report(const std::string& study, const DeltaSeries& s) {
    ConvergenceReport r;
    r.study = study;
    r.deltas = s.deltas;
    return r;
}

// Evaluates eval(cfg, point) for every (delta, point) pair in a fixed order.
template <class Eval>
std::vector<PointRecord> sweep(const DeltaSeries& s, const std::vector<Vec3>& points, const StudyOptions& opt,
                               Eval&& eval) {
    const std::vector<OperatorConfig> cfgs = configs_for(s, opt);
    const std::size_t np = points.size();
    std::vector<PointRecord> out(cfgs.size() * np);
    parallel_for(out.size(), opt.threads, [&](std::size_t i) {
        const std::size_t di = i / np;
        const std::size_t pi = i % np;
        PointRecord& rec = out[i];
        rec.delta = cfgs[di].delta;
        rec.point_id = static_cast<int>(pi);
        eval(cfgs[di], points[pi], rec);
    });
    return out;
}

void require_on_interface(const Material& m, const PiecewiseField& f, const Vec3& x) {
    const auto plane = discontinuity_plane(m, f);
    if (!plane) fail(ErrorCode::Domain, "study requires an interface");
    if (std::fabs(signed_distance(*plane, x)) > 1e-12) fail(ErrorCode::Domain, "point is not on the interface");
}

void finish_single_point(ConvergenceReport& r) {
    for (const auto& rec : r.records) r.aggregate.push_back(rec.err_p);
    if (r.deltas.size() >= 3) r.fit = fit_rate(r.deltas, r.aggregate);
    const std::size_t n = r.records.size();
    if (n >= 2) {
        const auto& fine = r.records[n - 1];
        const auto& coarse = r.records[n - 2];
        r.limit_estimate = richardson_limit(fine.delta, fine.v, coarse.delta, coarse.v);
    }
}

double parse_real(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) fail(ErrorCode::Io, "malformed CSV number '" + s + "'");
    return v;
}

nlohmann::ordered_json vec_json(const Vec3& v) { return nlohmann::ordered_json::array({v[0], v[1], v[2]}); }

Vec3 vec_from(const nlohmann::ordered_json& j) {
    if (!j.is_array() || j.size() != 3) fail(ErrorCode::Io, "expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

ConvergenceReport converge_to_navier(const DeltaSeries& series, const Material& material, const PiecewiseField& field,
                                     const std::vector<Vec3>& points, const StudyOptions& opt) {
    const auto plane = discontinuity_plane(material, field);
    if (plane && material.is_two_phase()) {
        const double dmax = series.deltas.front();
        for (const auto& x : points) {
            if (std::fabs(signed_distance(*plane, x)) < 2.0 * dmax)
                fail(ErrorCode::Domain, "sample point lies within 2 delta of the interface");
        }
    }
    ConvergenceReport r = start_report("converge", series);
    r.records = sweep(series, points, opt, [&](const OperatorConfig& cfg, const Vec3& x, PointRecord& rec) {
        const SideTag s = field.side(x);
        rec.v = eval_L(cfg, material, field, x) - navier(material, field, x, s);
        rec.err_p = norm(rec.v);
    });
    const std::size_t np = points.size();
    for (std::size_t di = 0; di < series.deltas.size(); ++di) {
        std::vector<double> e;
        for (std::size_t pi = 0; pi < np; ++pi) e.push_back(r.records[di * np + pi].err_p);
        r.aggregate.push_back(discrete_lp(e, opt.p));
    }
    if (series.deltas.size() >= 3) r.fit = fit_rate(series.deltas, r.aggregate, 1e-9);
    return r;
}

ConvergenceReport interface_blowup(const DeltaSeries& series, const Material& material, const PiecewiseField& field,
                                   const Vec3& x, const StudyOptions& opt) {
    require_on_interface(material, field, x);
    ConvergenceReport r = start_report("blowup", series);
    r.records = sweep(series, {x}, opt, [&](const OperatorConfig& cfg, const Vec3& p, PointRecord& rec) {
        rec.v = eval_L(cfg, material, field, p);
        rec.err_p = norm(rec.v);
    });
    for (const auto& rec : r.records) r.aggregate.push_back(rec.err_p);
    if (series.deltas.size() >= 3) r.fit = fit_rate(series.deltas, r.aggregate);
    return r;
}

ConvergenceReport natural_limit_check(const DeltaSeries& series, const Material& material,
                                      const PiecewiseField& field, const Vec3& x, const StudyOptions& opt) {
    require_on_interface(material, field, x);
    const Vec3 expected = natural_limit_formula(material, field, x);
    ConvergenceReport r = start_report("natural", series);
    r.expected = expected;
    r.records = sweep(series, {x}, opt, [&](const OperatorConfig& cfg, const Vec3& p, PointRecord& rec) {
        rec.v = cfg.delta * eval_L(cfg, material, field, p);
        rec.err_p = norm(rec.v - expected);
    });
    finish_single_point(r);
    return r;
}

ConvergenceReport star_limit_check(const DeltaSeries& series, const Material& material, const PiecewiseField& field,
                                   const Vec3& x, const StudyOptions& opt) {
    require_on_interface(material, field, x);
    const Vec3 expected = (45.0 / 32.0) * traction_jump(material, field, x);
    ConvergenceReport r = start_report("star", series);
    r.expected = expected;
    r.records = sweep(series, {x}, opt, [&](const OperatorConfig& cfg, const Vec3& p, PointRecord& rec) {
        rec.v = cfg.delta * eval_L_star(cfg, material, field, p);
        rec.err_p = norm(rec.v - expected);
    });
    finish_single_point(r);
    return r;
}

ConvergenceReport star_converges_offinterface(const DeltaSeries& series, const Material& material,
                                              const PiecewiseField& field, const std::vector<Vec3>& points,
                                              const StudyOptions& opt) {
    const auto plane = discontinuity_plane(material, field);
    auto in_band = [&](const Vec3& x, double delta) {
        return plane && std::fabs(signed_distance(*plane, x)) < delta;
    };
    ConvergenceReport r = start_report("star_offinterface", series);
    r.records = sweep(series, points, opt, [&](const OperatorConfig& cfg, const Vec3& x, PointRecord& rec) {
        const Vec3 ls = eval_L_star(cfg, material, field, x);
        rec.v = in_band(x, cfg.delta) ? cfg.delta * ls : ls - navier(material, field, x, field.side(x));
        rec.err_p = norm(rec.v);
    });
    const std::size_t np = points.size();
    for (std::size_t di = 0; di < series.deltas.size(); ++di) {
        std::vector<double> e;
        for (std::size_t pi = 0; pi < np; ++pi) {
            if (!in_band(points[pi], series.deltas[di])) e.push_back(r.records[di * np + pi].err_p);
        }
        r.aggregate.push_back(discrete_lp(e, opt.p));
    }
    if (series.deltas.size() >= 3) r.fit = fit_rate(series.deltas, r.aggregate, 1e-9);
    return r;
}

nlohmann::ordered_json report_to_json(const ConvergenceReport& r) {
    nlohmann::ordered_json j;
    j["study"] = r.study;
    j["params"] = r.params;
    j["deltas"] = r.deltas;
    auto recs = nlohmann::ordered_json::array();
    for (const auto& rec : r.records) {
        nlohmann::ordered_json o;
        o["delta"] = rec.delta;
        o["point_id"] = rec.point_id;
        o["v"] = vec_json(rec.v);
        o["err_p"] = rec.err_p;
        recs.push_back(std::move(o));
    }
    j["records"] = std::move(recs);
    j["aggregate"] = r.aggregate;
    j["slope"] = (r.fit.exact || !std::isfinite(r.fit.slope)) ? nlohmann::ordered_json(nullptr)
                                                               : nlohmann::ordered_json(r.fit.slope);
    j["exact"] = r.fit.exact;
    j["limit_estimate"] = r.limit_estimate ? vec_json(*r.limit_estimate) : nlohmann::ordered_json(nullptr);
    j["expected"] = r.expected ? vec_json(*r.expected) : nlohmann::ordered_json(nullptr);
    return j;
}

ConvergenceReport report_from_json(const nlohmann::ordered_json& j) {
    try {
        ConvergenceReport r;
        r.study = j.at("study").get<std::string>();
        r.params = j.at("params");
        r.deltas = j.at("deltas").get<std::vector<double>>();
        for (const auto& o : j.at("records")) {
            r.records.push_back(
                {o.at("delta").get<double>(), o.at("point_id").get<int>(), vec_from(o.at("v")), o.at("err_p").get<double>()});
        }
        r.aggregate = j.at("aggregate").get<std::vector<double>>();
        r.fit.exact = j.at("exact").get<bool>();
        r.fit.slope = j.at("slope").is_null() ? 0.0 : j.at("slope").get<double>();
        if (!j.at("limit_estimate").is_null()) r.limit_estimate = vec_from(j.at("limit_estimate"));
        if (!j.at("expected").is_null()) r.expected = vec_from(j.at("expected"));
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Io, std::string("malformed report: ") + e.what());
    }
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void write_records_csv(std::ostream& os, const std::vector<PointRecord>& records) {
    os << "delta,point_id,vx,vy,vz,err_p\r\n";
    for (const auto& r : records) {
        os << format_real(r.delta) << ',' << r.point_id << ',' << format_real(r.v[0]) << ',' << format_real(r.v[1])
           << ',' << format_real(r.v[2]) << ',' << format_real(r.err_p) << "\r\n";
    }
}

std::vector<PointRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) fail(ErrorCode::Io, "missing CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "delta,point_id,vx,vy,vz,err_p") fail(ErrorCode::Io, "unexpected CSV header");
    std::vector<PointRecord> out;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) fail(ErrorCode::Io, "CSV row must have 6 fields");
        PointRecord r;
        r.delta = parse_real(cells[0]);
        r.point_id = static_cast<int>(parse_real(cells[1]));
        r.v = {parse_real(cells[2]), parse_real(cells[3]), parse_real(cells[4])};
        r.err_p = parse_real(cells[5]);
        out.push_back(r);
    }
    return out;
}

}  // namespace peridyn
