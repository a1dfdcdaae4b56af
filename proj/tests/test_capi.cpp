#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <thread>

#include <json.hpp>

#include "toricgap.h"

TEST(CApi, Version) { EXPECT_STRNE(tg_version(), ""); }

TEST(CApi, LatticeLifecycle) {
    tg_lattice *lat = nullptr;
    ASSERT_EQ(tg_lattice_create("torus", 3, 3, &lat), TG_OK);
    int n = 0;
    EXPECT_EQ(tg_lattice_num_edges(lat, &n), TG_OK);
    EXPECT_EQ(n, 18);
    tg_lattice_destroy(lat);
    tg_lattice_destroy(nullptr);
}

TEST(CApi, LatticeErrors) {
    tg_lattice *lat = nullptr;
    EXPECT_EQ(tg_lattice_create("torus", 1, 3, &lat), TG_ERR_SIZING);
    EXPECT_EQ(lat, nullptr);
    EXPECT_NE(std::string(tg_last_error()).find("at least 2"), std::string::npos);
    EXPECT_EQ(tg_lattice_create("moebius", 3, 3, &lat), TG_ERR_CONFIG);
    EXPECT_EQ(tg_lattice_create(nullptr, 3, 3, &lat), TG_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(tg_lattice_create("torus", 3, 3, nullptr), TG_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(tg_lattice_num_edges(nullptr, nullptr), TG_ERR_INVALID_ARGUMENT);
}

TEST(CApi, HamiltonianDegeneracyAndEnergy) {
    tg_lattice *lat = nullptr;
    ASSERT_EQ(tg_lattice_create("torus", 2, 2, &lat), TG_OK);
    tg_hamiltonian *h = nullptr;
    ASSERT_EQ(tg_hamiltonian_toric_code(lat, &h), TG_OK);
    double deg = 0;
    EXPECT_EQ(tg_hamiltonian_ground_degeneracy(h, &deg), TG_OK);
    EXPECT_EQ(deg, 4.0);
    EXPECT_STREQ(tg_last_error(), "");

    ASSERT_EQ(tg_hamiltonian_add_perturbation(h, "z-field", 0.05), TG_OK);
    EXPECT_EQ(tg_hamiltonian_ground_degeneracy(h, &deg), TG_ERR_DOMAIN);
    double e = 0;
    ASSERT_EQ(tg_sector_ground_energy(h, "++", 1e-10, &e), TG_OK);
    EXPECT_NEAR(e, -0.020296849601931, 1e-10);
    EXPECT_EQ(tg_sector_ground_energy(h, "+?", 1e-10, &e), TG_ERR_CONFIG);
    EXPECT_EQ(tg_sector_ground_energy(h, "++", 0, &e), TG_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(tg_hamiltonian_add_perturbation(h, "custom", 0.1), TG_ERR_CONFIG);
    tg_hamiltonian_destroy(h);
    tg_lattice_destroy(lat);
}

TEST(CApi, RunReport) {
    tg_report *rep = nullptr;
    ASSERT_EQ(tg_run(R"({"command":"count-clusters","expansion":{"N":3,"max_volume":4}})", &rep), TG_OK);
    const auto j = nlohmann::json::parse(tg_report_json(rep));
    EXPECT_EQ(j["summary"]["config"]["command"], "count-clusters");
    ASSERT_EQ(tg_report_table_count(rep), 1u);
    const char *name = nullptr, *csv = nullptr;
    ASSERT_EQ(tg_report_table(rep, 0, &name, &csv), TG_OK);
    EXPECT_STREQ(name, "counts");
    EXPECT_EQ(std::strncmp(csv, "# schema=1\n", 11), 0);
    EXPECT_EQ(tg_report_table(rep, 5, &name, &csv), TG_ERR_INVALID_ARGUMENT);
    tg_report_destroy(rep);
}

TEST(CApi, RunErrors) {
    tg_report *rep = nullptr;
    EXPECT_EQ(tg_run("{not json", &rep), TG_ERR_CONFIG);
    EXPECT_EQ(rep, nullptr);
    EXPECT_EQ(tg_run(R"({"command":"spectrum","solver":{"sector":"bogus"}})", &rep), TG_ERR_CONFIG);
    EXPECT_EQ(tg_run(R"({"command":"spectrum","lattice":{"l1":1}})", &rep), TG_ERR_SIZING);
    EXPECT_EQ(tg_run(R"({"command":"count-clusters","expansion":{"max_volume":20}})", &rep), TG_ERR_CAPACITY);
    EXPECT_EQ(tg_run(nullptr, &rep), TG_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(tg_report_json(nullptr), nullptr);
    EXPECT_EQ(tg_report_table_count(nullptr), 0u);
}

TEST(CApi, LastErrorIsThreadLocal) {
    tg_lattice *lat = nullptr;
    EXPECT_EQ(tg_lattice_create("torus", 0, 0, &lat), TG_ERR_SIZING);
    std::string other;
    std::thread t([&] { other = tg_last_error(); });
    t.join();
    EXPECT_EQ(other, "");
    EXPECT_STRNE(tg_last_error(), "");
}
