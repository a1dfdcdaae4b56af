#include <gtest/gtest.h>

#include "toricgap/error.hpp"
#include "toricgap/experiments.hpp"

using namespace toricgap;
using nlohmann::json;

namespace {

ErrorKind kind_of(const json &j) {
    try {
        run(parse_config(j));
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for " << j.dump();
    return ErrorKind::Domain;
}

const std::string &cell(const Table &t, std::size_t row, const std::string &col) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), col);
    return t.rows.at(row).at(static_cast<std::size_t>(it - t.columns.begin()));
}

const Table &table(const Report &r, const std::string &name) {
    for (const auto &t : r.tables)
        if (t.name == name) return t;
    throw std::runtime_error("missing table " + name);
}

}  // namespace

TEST(Fmt, RoundTrip) {
    EXPECT_EQ(fmt(0.1), "0.1");
    EXPECT_EQ(fmt(2.0), "2");
    EXPECT_EQ(fmt(-0.020296849601931188), "-0.020296849601931188");
    EXPECT_EQ(fmt(std::nan("")), "nan");
    EXPECT_EQ(fmt(-INFINITY), "-inf");
    for (double x : {1.0 / 3.0, 1e-300, 6.02214076e23, -7.5e-9}) EXPECT_EQ(std::stod(fmt(x)), x);
}

TEST(Config, Defaults) {
    const RunConfig c = parse_config({{"command", "spectrum"}});
    EXPECT_EQ(c.l1, 2);
    EXPECT_EQ(c.topology, Topology::Torus);
    EXPECT_EQ(c.output_format, "csv");
}

TEST(Config, RoundTrip) {
    const json in = {{"command", "splitting"},
                     {"lattice", {{"topology", "torus"}, {"l1", 3}, {"l2", 4}}},
                     {"perturbation", {{"kind", "z-ising"}, {"beta", 0.2}}},
                     {"solver", {{"k", 3}, {"tol", 1e-9}, {"seed", 5}, {"sector", "+-"}}},
                     {"expansion", {{"N", 4}, {"max_volume", 5}, {"ledger_volume", 2}, {"samples", 10}, {"sites", 2}}},
                     {"sizes", json::array({"2x2", "3x3"})},
                     {"identity", "partition"},
                     {"syndrome", json::array({0, 4})},
                     {"workers", 2},
                     {"output", {{"path", "out/x"}, {"format", "both"}}}};
    const RunConfig c = parse_config(in);
    EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c));
    EXPECT_EQ(c.sizes.size(), 2u);
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.perturbation.kind, PerturbationKind::ZIsing);
}

TEST(Config, StrictRejection) {
    auto bad = [](const json &j) {
        try {
            parse_config(j);
        } catch (const Error &e) {
            return e.kind() == ErrorKind::Config;
        }
        return false;
    };
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"colour", "red"}}));
    EXPECT_TRUE(bad({{"command", "dance"}}));
    EXPECT_TRUE(bad(json::object()));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"lattice", {{"l1", "three"}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"lattice", {{"l3", 2}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"lattice", {{"topology", "klein"}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"perturbation", {{"kind", "x-field"}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"perturbation", {{"kind", "custom"}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"perturbation", {{"terms", json::array({{{"coefficient", 1}, {"pauli", "Z0"}}})}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"solver", {{"tol", -1}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"solver", {{"sector", "+x"}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"solver", {{"seed", -3}}}}));
    EXPECT_TRUE(bad({{"command", "splitting"}, {"sizes", "2by2"}}));
    EXPECT_TRUE(bad({{"command", "verify"}, {"identity", "everything"}}));
    EXPECT_TRUE(bad({{"command", "excitation-gap"}, {"syndrome", json::array({1})}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"output", {{"format", "xml"}}}}));
    EXPECT_TRUE(bad({{"command", "spectrum"}, {"workers", 0}}));
    EXPECT_TRUE(bad(json::array({1, 2})));
}

TEST(Config, Sizes) {
    const auto s = parse_sizes("2x2, 3x4");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[1], std::make_pair(3, 4));
    EXPECT_THROW(parse_sizes(""), Error);
    EXPECT_THROW(parse_sizes("3x"), Error);
}

TEST(Table, CsvSchemaHeader) {
    const Table t{"demo", {"a", "b"}, {{"1", "2"}, {"3", "4"}}};
    EXPECT_EQ(t.to_csv(), "# schema=1\na,b\n1,2\n3,4\n");
}

TEST(Run, SpectrumUnperturbedTorus) {
    const Report r = run(parse_config({{"command", "spectrum"}, {"perturbation", {{"beta", 0.0}}}}));
    EXPECT_EQ(r.summary["degeneracy"], 4);
    EXPECT_NEAR(std::stod(r.summary["ground"].get<std::string>()), 0.0, 1e-12);
    EXPECT_NEAR(std::stod(r.summary["gap"].get<std::string>()), 2.0, 1e-10);
}

TEST(Run, SpectrumPlanarUnique) {
    const Report r = run(parse_config({{"command", "spectrum"},
                                       {"lattice", {{"topology", "planar"}, {"l1", 3}, {"l2", 3}}},
                                       {"perturbation", {{"beta", 0.0}}}}));
    EXPECT_EQ(r.summary["degeneracy"], 1);
    // Gap inside the x-free block: a pair of charges.
    EXPECT_EQ(r.summary["scope"], "x-free sectors");
    EXPECT_NEAR(std::stod(r.summary["gap"].get<std::string>()), 2.0, 1e-9);
}

TEST(Run, SpectrumFullSpaceForXPerturbation) {
    const Report r = run(parse_config(
        {{"command", "spectrum"},
         {"perturbation", {{"kind", "custom"}, {"beta", 0.1}, {"terms", json::array({{{"coefficient", 1.0}, {"pauli", "X0"}}})}}}}));
    EXPECT_EQ(r.summary["scope"], "full space");
}

TEST(Run, ThinTorus) {
    const Report r = run(parse_config({{"command", "thin-torus"}, {"lattice", {{"l1", 3}, {"l2", 2}}}}));
    EXPECT_NEAR(std::stod(r.summary["step_cost"].get<std::string>()), 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(std::stod(r.summary["cut_energy"].get<std::string>()), -6.0, 1e-12);
    const Table &eig = table(r, "eigenvalues");
    bool four = false;
    for (std::size_t i = 0; i < eig.rows.size(); ++i)
        if (cell(eig, i, "hamiltonian") == "gapless") four = std::abs(std::stod(cell(eig, i, "energy")) + 4.0) < 1e-10;
    EXPECT_TRUE(four);
}

TEST(Run, SplittingStrictlyDecreasing) {
    const Report r = run(parse_config({{"command", "splitting"}, {"perturbation", {{"beta", 0.1}}}, {"sizes", "2x2,3x3"}}));
    EXPECT_TRUE(r.summary["strictly_decreasing"].get<bool>());
    const Table &t = table(r, "splitting");
    EXPECT_LT(std::stod(cell(t, 1, "delta")), std::stod(cell(t, 0, "delta")));
}

TEST(Run, VerifyInclusionExclusion) {
    const Report r = run(parse_config({{"command", "verify"}, {"identity", "inclusion-exclusion"}, {"perturbation", {{"beta", 0.1}}}}));
    EXPECT_TRUE(r.summary["all_pass"].get<bool>());
    const Table &t = table(r, "residuals");
    EXPECT_LT(std::stod(cell(t, 0, "value")), 1e-8);
}

TEST(Run, ClusterEnergyAndCounting) {
    const Report e = run(parse_config({{"command", "cluster-energy"},
                                       {"perturbation", {{"beta", 0.05}}},
                                       {"expansion", {{"max_volume", 6}, {"ledger_volume", 2}}}}));
    EXPECT_TRUE(e.summary["monotone"].get<bool>());
    EXPECT_LT(std::stod(e.summary["ledger_series_max_difference"].get<std::string>()), 1e-12);
    const Report c = run(parse_config({{"command", "count-clusters"}, {"expansion", {{"N", 3}, {"max_volume", 5}}}}));
    EXPECT_TRUE(c.summary["bound_holds"].get<bool>());
    EXPECT_EQ(table(c, "counts").rows.size(), 5u);
}

TEST(Run, ExcitationGapUnperturbed) {
    const Report r = run(parse_config({{"command", "excitation-gap"}, {"perturbation", {{"beta", 0.0}}}, {"syndrome", json::array({0, 1})}}));
    EXPECT_NEAR(std::stod(r.summary["gap"].get<std::string>()), 2.0, 1e-10);
    EXPECT_LT(std::stod(r.summary["xc_identity_residual"].get<std::string>()), 1e-10);
}

TEST(Run, EmbedsResolvedConfig) {
    const json in = {{"command", "count-clusters"}, {"expansion", {{"N", 2}, {"max_volume", 3}}}};
    const Report r = run(parse_config(in));
    EXPECT_EQ(r.summary["config"], to_json(parse_config(in)));
    EXPECT_EQ(r.to_json()["summary"]["config"]["command"], "count-clusters");
}

TEST(Run, Deterministic) {
    const json in = {{"command", "verify"}, {"identity", "norm-bound"}, {"expansion", {{"samples", 30}}}, {"solver", {{"seed", 7}}},
                     {"perturbation", {{"beta", 0.1}}}};
    EXPECT_EQ(run(parse_config(in)).to_json().dump(), run(parse_config(in)).to_json().dump());
}

TEST(Run, ErrorKinds) {
    EXPECT_EQ(kind_of({{"command", "spectrum"}, {"lattice", {{"l1", 1}}}}), ErrorKind::Sizing);
    EXPECT_EQ(kind_of({{"command", "splitting"}}), ErrorKind::Config);
    EXPECT_EQ(kind_of({{"command", "cluster-energy"}, {"expansion", {{"max_volume", 2}, {"ledger_volume", 3}}}}),
              ErrorKind::Config);
    EXPECT_EQ(kind_of({{"command", "count-clusters"}, {"expansion", {{"max_volume", 30}}}}), ErrorKind::Capacity);
}
