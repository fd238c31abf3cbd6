#include "analysis.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace peridyn;

namespace {

const PlanarInterface kPlane = PlanarInterface::make(Vec3{}, Vec3{0.0, 0.0, 1.0});

StudyOptions options() {
    StudyOptions o;
    o.threads = 0;
    return o;
}

// Largest |v_i - v_{i+1}| / (delta_i - delta_{i+1}) along a single-point series.
double first_order_slope(const ConvergenceReport& r) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
        const auto& a = r.records[i];
        const auto& b = r.records[i + 1];
        m = std::fmax(m, norm(a.v - b.v) / (a.delta - b.delta));
    }
    return m;
}

void check_richardson_remainder(const ConvergenceReport& r) {
    REQUIRE(r.limit_estimate.has_value());
    const auto& fine = r.records.back();
    CHECK(norm(*r.limit_estimate - fine.v) <= first_order_slope(r) * fine.delta + 1e-12);
}

void check_same(const ConvergenceReport& a, const ConvergenceReport& b) {
    CHECK(a.study == b.study);
    CHECK(a.params == b.params);
    CHECK(a.deltas == b.deltas);
    CHECK(a.records == b.records);
    CHECK(a.aggregate == b.aggregate);
    CHECK(a.fit.slope == b.fit.slope);
    CHECK(a.fit.exact == b.fit.exact);
    CHECK(a.limit_estimate == b.limit_estimate);
    CHECK(a.expected == b.expected);
}

}  // namespace

TEST_CASE("rate fit examples") {
    const std::vector<double> d{0.1, 0.05, 0.025, 0.0125, 0.00625};
    std::vector<double> sq, flat, noisy;
    for (double x : d) {
        sq.push_back(x * x);
        flat.push_back(0.3);
        noisy.push_back(x * (1.0 + 0.01 * oracle::uniform()));
    }
    CHECK(std::fabs(fit_rate(d, sq).slope - 2.0) < 1e-12);
    CHECK(std::fabs(fit_rate(d, flat).slope) < 1e-12);
    CHECK(std::fabs(fit_rate(d, noisy).slope - 1.0) < 0.05);

    const RateFit z = fit_rate(d, std::vector<double>(5, 1e-14));
    CHECK(z.exact);
    CHECK(z.slope == 0.0);
    CHECK_THROWS_AS(fit_rate({0.1, 0.05, 0.025}, {1.0, 0.0, 0.0}), Error);
    CHECK_THROWS_AS(fit_rate({0.1, 0.05}, {1.0, 0.5}), Error);
    CHECK_THROWS_AS(fit_rate({0.1, 0.05, 0.025}, {1.0, 0.5}), Error);
}

TEST_CASE("delta series") {
    CHECK(DeltaSeries::standard().deltas == std::vector<double>{0.1, 0.05, 0.025, 0.0125, 0.00625});
    CHECK(DeltaSeries::halving_to(1e-3).deltas == std::vector<double>{16e-3, 8e-3, 4e-3, 2e-3, 1e-3});
    CHECK_THROWS_AS(DeltaSeries::make({}), Error);
    CHECK_THROWS_AS(DeltaSeries::make({0.1, 0.1}), Error);
    CHECK_THROWS_AS(DeltaSeries::make({0.1, 0.2}), Error);
    CHECK_THROWS_AS(DeltaSeries::make({0.1, -0.05}), Error);
    CHECK_THROWS_AS(DeltaSeries::make({std::numeric_limits<double>::infinity(), 0.1}), Error);
    CHECK_THROWS_AS(DeltaSeries::halving_to(0.0), Error);
}

TEST_CASE("discrete norms and extrapolation") {
    CHECK(discrete_lp({3.0, 4.0}, 2.0) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
    CHECK(discrete_lp({3.0, 4.0}, 1.0) == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(discrete_lp({3.0, -4.0, 1.0}, std::numeric_limits<double>::infinity()) == 4.0);
    CHECK_THROWS_AS(discrete_lp({1.0}, 0.5), Error);

    // v(delta) = a + b delta is extrapolated exactly
    const Vec3 a{1.0, -2.0, 0.5}, b{3.0, 1.0, -4.0};
    const Vec3 lim = richardson_limit(0.01, a + 0.01 * b, 0.02, a + 0.02 * b);
    CHECK(max_abs(lim - a) < 1e-14);
    CHECK_THROWS_AS(richardson_limit(0.02, a, 0.01, a), Error);

    const auto pts = lattice_points(5);
    CHECK(pts.size() == 125);
    CHECK(max_abs(pts.front() - Vec3{0.1, 0.1, 0.1}) < 1e-15);
    CHECK(max_abs(pts.back() - Vec3{0.9, 0.9, 0.9}) < 1e-15);
    const auto kept = exclude_band(pts, PlanarInterface::make({0.5, 0.5, 0.5}, {0.0, 0.0, 1.0}), 0.15);
    CHECK(kept.size() == 100);
    CHECK(exclude_band(pts, std::nullopt, 0.15).size() == 125);
}

TEST_CASE("quadratic fields converge exactly to navier") {
    const auto q = make_manufactured("quadratic");
    const auto r = converge_to_navier(DeltaSeries::make({0.1, 0.05, 0.025}), q.material, q.field,
                                      {Vec3{0.3, 0.6, 0.2}, Vec3{0.7, 0.4, 0.5}}, options());
    CHECK(r.records.size() == 6);
    CHECK(r.fit.exact);
    for (double e : r.aggregate) CHECK(e < 1e-9);
    CHECK(r.record(2, 1).delta == 0.025);
    CHECK(r.record(2, 1).point_id == 1);
}

TEST_CASE("smooth media error decreases at least linearly") {
    const auto s = make_manufactured("smooth_material_trig");
    const auto r = converge_to_navier(DeltaSeries::make({0.1, 0.05, 0.025}), s.material, s.field,
                                      {Vec3{0.4, 0.55, 0.35}}, options());
    REQUIRE_FALSE(r.fit.exact);
    CHECK(r.fit.slope >= 0.9);
    CHECK(r.aggregate[1] < r.aggregate[0]);
    CHECK(r.aggregate[2] < r.aggregate[1]);
}

TEST_CASE("converge rejects points near a two-phase interface") {
    const auto g = make_manufactured("gradient_jump", kPlane);
    CHECK_THROWS_AS(converge_to_navier(DeltaSeries::standard(), g.material, g.field, {Vec3{0.0, 0.0, 0.15}}, options()),
                    Error);
}

TEST_CASE("interface blow-up rate") {
    const auto patch = make_manufactured("patch_jump_zero_traction", kPlane);
    const auto r = interface_blowup(DeltaSeries::standard(), patch.material, patch.field, Vec3{}, options());
    CHECK(std::fabs(r.fit.slope + 1.0) < 0.05);
    // delta L = (45/16) e3 exactly at the patch point
    for (const auto& rec : r.records) CHECK(max_abs(rec.delta * rec.v - Vec3{0.0, 0.0, 45.0 / 16.0}) < 1e-3);
    CHECK_THROWS_AS(interface_blowup(DeltaSeries::standard(), patch.material, patch.field, Vec3{0.0, 0.0, 0.01},
                                     options()),
                    Error);

    const auto trig = make_manufactured("trig_smooth");
    CHECK_THROWS_AS(interface_blowup(DeltaSeries::standard(), trig.material, trig.field, Vec3{}, options()), Error);
}

TEST_CASE("natural limit examples") {
    const auto patch = make_manufactured("patch_jump_zero_traction", kPlane);
    const auto r = natural_limit_check(DeltaSeries::halving_to(1e-3), patch.material, patch.field, Vec3{}, options());
    REQUIRE(r.limit_estimate.has_value());
    const Vec3 expect{0.0, 0.0, 45.0 / 16.0};
    CHECK(norm(*r.limit_estimate - expect) / norm(expect) < 0.01);
    CHECK(max_abs(*r.expected - expect) < 1e-14);
    check_richardson_remainder(r);

    const auto g = make_manufactured("gradient_jump", kPlane);
    const auto rg = natural_limit_check(DeltaSeries::halving_to(1e-3), g.material, g.field, Vec3{}, options());
    const Vec3 formula = natural_limit_formula(g.material, g.field, Vec3{});
    CHECK(norm(*rg.limit_estimate - formula) / norm(formula) < 0.01);
    check_richardson_remainder(rg);

    // no jump anywhere: delta L -> 0
    const Material same(TwoPhaseMaterial::make(1.0, 1.0, 1.0, 1.0, kPlane));
    const auto trig = make_manufactured("trig_smooth");
    const auto rs = natural_limit_check(DeltaSeries::make({0.02, 0.01, 0.005}), same, trig.field, Vec3{0.3, 0.2, 0.0},
                                        options());
    CHECK(max_abs(*rs.limit_estimate) < 1e-4);
}

TEST_CASE("star limit examples") {
    const auto g = make_manufactured("gradient_jump", kPlane);
    const auto r = star_limit_check(DeltaSeries::halving_to(1e-3), g.material, g.field, Vec3{}, options());
    const Vec3 expect{0.0, 0.0, -135.0 / 32.0};
    CHECK(norm(*r.limit_estimate - expect) / norm(expect) < 0.01);
    CHECK(max_abs(*r.expected - expect) < 1e-14);
    check_richardson_remainder(r);

    const Material same(TwoPhaseMaterial::make(1.0, 1.0, 1.0, 1.0, kPlane));
    const auto trig = make_manufactured("trig_smooth");
    const auto rs =
        star_limit_check(DeltaSeries::make({0.02, 0.01, 0.005}), same, trig.field, Vec3{0.3, 0.2, 0.0}, options());
    CHECK(max_abs(*rs.limit_estimate) < 1e-4);
    CHECK_THROWS_AS(star_limit_check(DeltaSeries::standard(), g.material, g.field, Vec3{0.0, 0.0, 0.2}, options()),
                    Error);
}

TEST_CASE("star and natural series differ by the delta-scaled interface correction") {
    const auto g = make_manufactured("gradient_jump", kPlane);
    const auto series = DeltaSeries::make({0.02, 0.01, 0.005});
    const Vec3 x{0.1, -0.2, 0.0};
    const auto star = star_limit_check(series, g.material, g.field, x, options());
    const auto nat = natural_limit_check(series, g.material, g.field, x, options());
    for (std::size_t i = 0; i < series.deltas.size(); ++i) {
        const double d = series.deltas[i];
        const Vec3 corr = d * eval_L_gamma(make_config(d), g.material, g.field, x);
        CHECK(max_abs(star.records[i].v - nat.records[i].v - corr) < 1e-12 * std::fmax(1.0, norm(corr)));
    }
}

TEST_CASE("star operator off the interface") {
    const auto patch = make_manufactured("patch_jump_zero_traction", kPlane);
    const auto series = DeltaSeries::make({0.1, 0.05, 0.025});
    const std::vector<Vec3> far{Vec3{0.1, 0.2, 0.25}, Vec3{-0.3, 0.1, -0.2}, Vec3{0.0, 0.0, 0.4}};
    const auto r = star_converges_offinterface(series, patch.material, patch.field, far, options());
    for (const auto& rec : r.records) CHECK(rec.err_p < 1e-9);

    const ClosedFormField q = make_manufactured("quadratic").field.plus;
    const PiecewiseField fq{q, q, kPlane};
    const Material same(TwoPhaseMaterial::make(1.0, 1.0, 1.0, 1.0, kPlane));
    const auto rq = star_converges_offinterface(series, same, fq, {Vec3{0.2, 0.1, 0.3}, Vec3{0.0, 0.4, -0.25}},
                                                options());
    for (const auto& rec : rq.records) CHECK(rec.err_p < 1e-9);

    // the indicator switches off once delta < |d|
    const Vec3 x{0.05, 0.1, 0.03};
    const auto rs = star_converges_offinterface(DeltaSeries::make({0.1, 0.05, 0.02, 0.01}), patch.material,
                                                patch.field, {x}, options());
    for (std::size_t i = 0; i < 4; ++i) {
        const auto cfg = make_config(rs.deltas[i]);
        const Vec3 ls = eval_L_star(cfg, patch.material, patch.field, x);
        if (rs.deltas[i] < 0.03) {
            CHECK(ls == eval_L(cfg, patch.material, patch.field, x));
            CHECK(rs.records[i].v == ls - navier(patch.material, patch.field, x, SideTag::Plus));
        } else {
            CHECK(rs.records[i].v == rs.deltas[i] * ls);
        }
    }
}

TEST_CASE("reports round-trip through JSON and CSV") {
    const auto g = make_manufactured("gradient_jump", kPlane);
    auto r = natural_limit_check(DeltaSeries::make({0.04, 0.02, 0.01}), g.material, g.field, Vec3{}, options());
    r.params["field"] = "gradient_jump";
    r.params["p"] = 2.0;
    check_same(report_from_json(report_to_json(r)), r);
    check_same(report_from_json(nlohmann::ordered_json::parse(report_to_json(r).dump())), r);

    std::vector<PointRecord> recs = r.records;
    recs.push_back({1e-300, 7, Vec3{-0.1, 1.0 / 3.0, 6.02214076e23}, std::nextafter(1.0, 2.0)});
    std::stringstream ss;
    write_records_csv(ss, recs);
    std::string header;
    std::getline(std::stringstream(ss.str()), header);
    CHECK(header == "delta,point_id,vx,vy,vz,err_p\r");
    CHECK(read_records_csv(ss) == recs);

    std::stringstream bad("delta,point_id,vx,vy,vz,err_p\n0.1,0,1,2,x,4\n");
    CHECK_THROWS_AS(read_records_csv(bad), Error);
    CHECK_THROWS_AS(report_from_json(nlohmann::ordered_json{{"study", "x"}}), Error);
}
