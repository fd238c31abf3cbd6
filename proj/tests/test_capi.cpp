#include "peridyn/peridyn.h"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

TEST_CASE("status names and version") {
    CHECK(std::string(pd_version()).size() > 0);
    CHECK(std::string(pd_status_name(PD_OK)) == "ok");
    CHECK(std::string(pd_status_name(PD_ERR_CONFIG)) == "configuration error");
    CHECK(std::string(pd_status_name(static_cast<pd_status>(99))) == "unknown status");
}

TEST_CASE("case handles") {
    pd_case* c = nullptr;
    const double n[3] = {0.0, 0.0, 1.0};
    REQUIRE(pd_case_create("patch_jump_zero_traction", nullptr, n, &c) == PD_OK);
    REQUIRE(c != nullptr);

    double out[3];
    const double x[3] = {0.0, 0.0, 0.0};
    REQUIRE(pd_natural_limit(c, x, out) == PD_OK);
    CHECK(std::fabs(out[2] - 45.0 / 16.0) < 1e-14);
    REQUIRE(pd_traction_jump(c, x, out) == PD_OK);
    CHECK(std::fabs(out[0]) + std::fabs(out[1]) + std::fabs(out[2]) < 1e-14);

    const double off[3] = {0.1, 0.2, 0.3};
    REQUIRE(pd_eval(c, PD_OP_L, 0.1, 0, 0, off, out) == PD_OK);
    CHECK(std::fabs(out[0]) + std::fabs(out[1]) + std::fabs(out[2]) < 1e-9);
    double star[3];
    REQUIRE(pd_eval(c, PD_OP_L_STAR, 0.1, 0, 0, off, star) == PD_OK);
    CHECK(std::memcmp(out, star, sizeof out) == 0);

    CHECK(pd_eval(c, PD_OP_L_GAMMA, 0.1, 0, 0, off, out) == PD_ERR_DOMAIN);
    CHECK(std::string(pd_last_error()).size() > 0);
    CHECK(pd_eval(c, static_cast<pd_operator>(42), 0.1, 0, 0, off, out) == PD_ERR_INVALID_ARGUMENT);
    CHECK(pd_eval(c, PD_OP_L, -1.0, 0, 0, off, out) == PD_ERR_INVALID_ARGUMENT);
    CHECK(pd_eval(c, PD_OP_L, 0.1, 0, 0, nullptr, out) == PD_ERR_INVALID_ARGUMENT);
    REQUIRE(pd_case_value(c, off, out) == PD_OK);
    CHECK(std::string(pd_last_error()).empty());

    CHECK(pd_case_set_two_phase(c, 1.0, -1.0, 1.0, 1.0) == PD_ERR_INVALID_ARGUMENT);
    CHECK(pd_case_set_homogeneous(c, 1.0, 0.0) == PD_ERR_INVALID_ARGUMENT);
    REQUIRE(pd_case_set_two_phase(c, 1.0, 1.0, 1.0, 1.0) == PD_OK);
    REQUIRE(pd_traction_jump(c, x, out) == PD_OK);
    CHECK(std::fabs(out[2] - 3.0) < 1e-14);  // (lambda + 2 mu)(2 - 1)
    pd_case_destroy(c);
    pd_case_destroy(nullptr);

    CHECK(pd_case_create("no_such_field", nullptr, nullptr, &c) == PD_ERR_INVALID_ARGUMENT);
    CHECK(c == nullptr);
    const double zero[3] = {0.0, 0.0, 0.0};
    CHECK(pd_case_create("gradient_jump", nullptr, zero, &c) != PD_OK);
    CHECK(pd_case_create(nullptr, nullptr, nullptr, &c) == PD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("study handles") {
    pd_study* s = nullptr;
    REQUIRE(pd_study_run(R"({"study": "kdelta", "normal": [0, 0, 1]})", &s) == PD_OK);
    CHECK(pd_study_passed(s) == 1);
    CHECK(std::string(pd_study_name(s)) == "kdelta");
    REQUIRE(pd_study_check_count(s) > 0);
    for (size_t i = 0; i < pd_study_check_count(s); ++i) CHECK(std::strncmp(pd_study_check_line(s, i), "PASS ", 5) == 0);
    CHECK(pd_study_check_line(s, pd_study_check_count(s)) == nullptr);

    const auto j = nlohmann::json::parse(pd_study_json(s));
    CHECK(j.at("study") == "kdelta");
    CHECK(j.at("checks").is_array());
    std::istringstream csv(pd_study_csv(s));
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("delta,", 0) == 0);

    const auto dir = std::filesystem::temp_directory_path() / "peridyn_capi_test";
    std::filesystem::remove_all(dir);
    REQUIRE(pd_study_write(s, dir.c_str()) == PD_OK);
    std::ifstream f(dir / "kdelta.csv", std::ios::binary);
    std::stringstream written;
    written << f.rdbuf();
    CHECK(written.str() == pd_study_csv(s));
    CHECK(std::filesystem::exists(dir / "kdelta.json"));
    std::filesystem::remove_all(dir);
    pd_study_destroy(s);

    CHECK(pd_study_run(R"({"study": "kdelta", "bogus": 1})", &s) == PD_ERR_CONFIG);
    CHECK(s == nullptr);
    CHECK(std::string(pd_last_error()).find("bogus") != std::string::npos);
    CHECK(pd_study_run("{not json", &s) == PD_ERR_CONFIG);
    CHECK(pd_study_run(R"({"study": "moments", "deltas": [0.1, 0.2]})", &s) != PD_OK);
    CHECK(pd_study_passed(nullptr) == 0);
    CHECK(pd_study_check_count(nullptr) == 0);
}
