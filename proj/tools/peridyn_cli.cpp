// Command-line front end. Exit codes: 0 all checks pass, 1 a check failed,
// 2 configuration error, 3 runtime failure.

#include "peridyn/peridyn.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_list(const std::string& text, std::size_t want, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end != cell.c_str() + cell.size()) throw CLI::ValidationError(flag, "malformed number '" + cell + "'");
        out.push_back(v);
    }
    if (want != 0 && out.size() != want)
        throw CLI::ValidationError(flag, "expected " + std::to_string(want) + " comma-separated values");
    if (out.empty()) throw CLI::ValidationError(flag, "expected a comma-separated list");
    return out;
}

int exit_code_for(pd_status s) {
    switch (s) {
        case PD_ERR_CONFIG:
        case PD_ERR_INVALID_ARGUMENT:
        case PD_ERR_DOMAIN: return 2;
        default: return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal interface operator studies"};
    app.set_version_flag("--version", std::string(pd_version()));

    std::string study, config_path, out_dir, delta_series, quad, material, field, normal, origin, p_text, op;
    std::optional<double> delta_min, h, ratio;
    std::optional<int> threads;

    app.add_option("study", study, "moments, kdelta, converge, blowup, natural, star or solve");
    app.add_option("--config", config_path, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: out)");
    auto* series_opt = app.add_option("--delta-series", delta_series, "decreasing horizons a,b,c");
    app.add_option("--delta-min", delta_min, "smallest horizon of a five-term halving series")->excludes(series_opt);
    app.add_option("--quad", quad, "radial and angular orders R,A");
    app.add_option("--material", material, "default, two-phase:l+,m+,l-,m- or homogeneous:l,m");
    app.add_option("--field", field, "manufactured field name");
    app.add_option("--normal", normal, "interface normal x,y,z");
    app.add_option("--origin", origin, "point on the interface x,y,z");
    app.add_option("--p", p_text, "norm exponent (>= 1 or inf)");
    app.add_option("--operator", op, "converge: L or star");
    app.add_option("--spacing", h, "solve: lattice spacing h");
    app.add_option("--ratio", ratio, "solve: horizon to spacing ratio");
    app.add_option("--threads", threads, "worker threads (0: all cores; default from PERIDYN_THREADS)");

    nlohmann::json cfg = nlohmann::json::object();
    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            cfg = nlohmann::json::parse(f);
            if (!cfg.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");
        }
        if (!study.empty()) cfg["study"] = study;
        if (!delta_series.empty()) {
            cfg["deltas"] = parse_list(delta_series, 0, "--delta-series");
            cfg.erase("delta_min");
        }
        if (delta_min) {
            cfg["delta_min"] = *delta_min;
            cfg.erase("deltas");
        }
        if (!quad.empty()) {
            const auto q = parse_list(quad, 2, "--quad");
            cfg["quad"] = {static_cast<int>(q[0]), static_cast<int>(q[1])};
            if (q[0] != static_cast<int>(q[0]) || q[1] != static_cast<int>(q[1]))
                throw CLI::ValidationError("--quad", "orders must be integers");
        }
        if (!material.empty()) cfg["material"] = material;
        if (!field.empty()) cfg["field"] = field;
        if (!normal.empty()) cfg["normal"] = parse_list(normal, 3, "--normal");
        if (!origin.empty()) cfg["origin"] = parse_list(origin, 3, "--origin");
        if (!p_text.empty()) {
            if (p_text == "inf" || p_text == "infinity") cfg["p"] = "inf";
            else cfg["p"] = parse_list(p_text, 1, "--p")[0];
        }
        if (!op.empty()) cfg["operator"] = op;
        if (h) cfg["h"] = *h;
        if (ratio) cfg["ratio"] = *ratio;
        if (threads) {
            cfg["threads"] = *threads;
        } else if (!cfg.contains("threads")) {
            if (const char* env = std::getenv("PERIDYN_THREADS")) {
                char* end = nullptr;
                const long t = std::strtol(env, &end, 10);
                if (*env == '\0' || *end != '\0' || t < 0) {
                    std::cerr << "error: PERIDYN_THREADS must be a nonnegative integer\n";
                    return 2;
                }
                cfg["threads"] = static_cast<int>(t);
            }
        }
        if (!out_dir.empty()) cfg["out"] = out_dir;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << config_path << ": " << e.what() << '\n';
        return 2;
    }

    const std::string dir = cfg.contains("out") && cfg["out"].is_string() ? cfg["out"].get<std::string>() : "out";
    pd_study* s = nullptr;
    pd_status st = pd_study_run(cfg.dump().c_str(), &s);
    if (st != PD_OK) {
        std::cerr << "error (" << pd_status_name(st) << "): " << pd_last_error() << '\n';
        return exit_code_for(st);
    }
    std::cout << pd_study_name(s) << '\n';
    for (std::size_t i = 0; i < pd_study_check_count(s); ++i) std::cout << pd_study_check_line(s, i) << '\n';
    st = pd_study_write(s, dir.c_str());
    if (st != PD_OK) {
        std::cerr << "error (" << pd_status_name(st) << "): " << pd_last_error() << '\n';
        pd_study_destroy(s);
        return 3;
    }
    std::cout << "wrote " << dir << '/' << pd_study_name(s) << ".csv and .json\n";
    const int rc = pd_study_passed(s) ? 0 : 1;
    pd_study_destroy(s);
    return rc;
}
