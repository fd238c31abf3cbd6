#include "peridyn/peridyn.h"

#include "error.hpp"
#include "operators.hpp"
#include "studies.hpp"

#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct pd_case {
    peridyn::PlanarInterface gamma;
    peridyn::ManufacturedCase mc;
};

struct pd_study {
    peridyn::StudyResult result;
    std::vector<std::string> lines;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

pd_status to_status(peridyn::ErrorCode c) {
    switch (c) {
        case peridyn::ErrorCode::InvalidArgument: return PD_ERR_INVALID_ARGUMENT;
        case peridyn::ErrorCode::Domain: return PD_ERR_DOMAIN;
        case peridyn::ErrorCode::NonFinite: return PD_ERR_NON_FINITE;
        case peridyn::ErrorCode::Config: return PD_ERR_CONFIG;
        case peridyn::ErrorCode::Io: return PD_ERR_IO;
        case peridyn::ErrorCode::Singular: return PD_ERR_SINGULAR;
    }
    return PD_ERR_INTERNAL;
}

template <class F>
pd_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return PD_OK;
    } catch (const peridyn::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const nlohmann::json::exception& e) {
        g_last_error = std::string("invalid JSON: ") + e.what();
        return PD_ERR_CONFIG;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return PD_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PD_ERR_INTERNAL;
    }
}

pd_status null_arg(const char* what) {
    g_last_error = std::string(what) + " must not be null";
    return PD_ERR_INVALID_ARGUMENT;
}

peridyn::Vec3 vec(const double v[3]) { return {v[0], v[1], v[2]}; }

void put(const peridyn::Vec3& v, double out[3]) {
    out[0] = v[0];
    out[1] = v[1];
    out[2] = v[2];
}

}  // namespace

extern "C" {

const char* pd_version(void) { return "1.0.0"; }

const char* pd_status_name(pd_status s) {
    switch (s) {
        case PD_OK: return "ok";
        case PD_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PD_ERR_DOMAIN: return "domain error";
        case PD_ERR_NON_FINITE: return "non-finite value";
        case PD_ERR_CONFIG: return "configuration error";
        case PD_ERR_IO: return "i/o error";
        case PD_ERR_SINGULAR: return "singular system";
        case PD_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* pd_last_error(void) { return g_last_error.c_str(); }

pd_status pd_case_create(const char* field_name, const double origin[3], const double normal[3], pd_case** out) {
    if (!field_name) return null_arg("field_name");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        const peridyn::Vec3 p = origin ? vec(origin) : peridyn::Vec3{};
        const peridyn::Vec3 n = normal ? vec(normal) : peridyn::Vec3{0.0, 0.0, 1.0};
        const auto gamma = peridyn::PlanarInterface::make(p, n);
        *out = new pd_case{gamma, peridyn::make_manufactured(field_name, gamma)};
    });
}

pd_status pd_case_set_two_phase(pd_case* c, double lambda_plus, double mu_plus, double lambda_minus, double mu_minus) {
    if (!c) return null_arg("case");
    return guarded([&] {
        c->mc.material = peridyn::Material(
            peridyn::TwoPhaseMaterial::make(lambda_plus, mu_plus, lambda_minus, mu_minus, c->gamma));
    });
}

pd_status pd_case_set_homogeneous(pd_case* c, double lambda, double mu) {
    if (!c) return null_arg("case");
    return guarded([&] {
        if (!(mu > 0.0) || !std::isfinite(lambda)) peridyn::fail(peridyn::ErrorCode::InvalidArgument, "shear modulus must be positive");
        c->mc.material = peridyn::Material::homogeneous(lambda, mu);
    });
}

void pd_case_destroy(pd_case* c) { delete c; }

pd_status pd_case_value(const pd_case* c, const double x[3], double out[3]) {
    if (!c) return null_arg("case");
    if (!x || !out) return null_arg("x and out");
    return guarded([&] { put(c->mc.field.value(vec(x)), out); });
}

pd_status pd_eval(const pd_case* c, pd_operator op, double delta, int radial_order, int angular_order,
                  const double x[3], double out[3]) {
    if (!c) return null_arg("case");
    if (!x || !out) return null_arg("x and out");
    return guarded([&] {
        using namespace peridyn;
        const OperatorConfig cfg = make_config(delta, radial_order > 0 ? radial_order : kDefaultRadialOrder,
                                               angular_order > 0 ? angular_order : kDefaultAngularOrder);
        const Material& m = c->mc.material;
        const PiecewiseField& f = c->mc.field;
        const Vec3 p = vec(x);
        Vec3 v;
        switch (op) {
            case PD_OP_L: v = eval_L(cfg, m, f, p); break;
            case PD_OP_LS: v = eval_Ls(cfg, m, f, p); break;
            case PD_OP_LD: v = eval_Ld(cfg, m, f, p); break;
            case PD_OP_L1: v = eval_L1(cfg, m, f, p); break;
            case PD_OP_L2: v = eval_L2(cfg, m, f, p, c->gamma.normal); break;
            case PD_OP_L_GAMMA: v = eval_L_gamma(cfg, m, f, p); break;
            case PD_OP_L_STAR: v = eval_L_star(cfg, m, f, p); break;
            default: fail(ErrorCode::InvalidArgument, "unknown operator");
        }
        put(v, out);
    });
}

pd_status pd_traction_jump(const pd_case* c, const double x[3], double out[3]) {
    if (!c) return null_arg("case");
    if (!x || !out) return null_arg("x and out");
    return guarded([&] { put(peridyn::traction_jump(c->mc.material, c->mc.field, vec(x)), out); });
}

pd_status pd_natural_limit(const pd_case* c, const double x[3], double out[3]) {
    if (!c) return null_arg("case");
    if (!x || !out) return null_arg("x and out");
    return guarded([&] { put(peridyn::natural_limit_formula(c->mc.material, c->mc.field, vec(x)), out); });
}

pd_status pd_study_run(const char* config_json, pd_study** out) {
    if (!config_json) return null_arg("config_json");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        const peridyn::StudyConfig cfg = peridyn::parse_config(nlohmann::json::parse(config_json));
        auto s = std::make_unique<pd_study>();
        s->result = peridyn::run_study(cfg);
        for (const auto& ch : s->result.checks) s->lines.push_back(peridyn::check_line(ch));
        s->json = s->result.report.dump(2);
        *out = s.release();
    });
}

void pd_study_destroy(pd_study* s) { delete s; }

int pd_study_passed(const pd_study* s) { return s && s->result.passed() ? 1 : 0; }

size_t pd_study_check_count(const pd_study* s) { return s ? s->lines.size() : 0; }

const char* pd_study_check_line(const pd_study* s, size_t i) {
    if (!s || i >= s->lines.size()) return nullptr;
    return s->lines[i].c_str();
}

const char* pd_study_name(const pd_study* s) { return s ? s->result.study.c_str() : nullptr; }

const char* pd_study_csv(const pd_study* s) { return s ? s->result.csv.c_str() : nullptr; }

const char* pd_study_json(const pd_study* s) { return s ? s->json.c_str() : nullptr; }

pd_status pd_study_write(const pd_study* s, const char* dir) {
    if (!s) return null_arg("study");
    if (!dir) return null_arg("dir");
    return guarded([&] { peridyn::write_outputs(s->result, dir); });
}

}  // extern "C"
