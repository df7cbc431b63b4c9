#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "vinegof/io.hpp"
#include "vinegof/rvine_eval.hpp"

using namespace vinegof;
using Catch::Approx;

namespace {

std::string model_path(const std::string& name) { return std::string(VINEGOF_MODEL_DIR) + "/" + name; }

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

struct Edge {
    std::set<int> conditioned;
    std::set<int> conditioning;
    auto operator<=>(const Edge&) const = default;
};

std::map<Edge, const PairCopulaSpec*> edge_map(const RVineSpec& spec) {
    std::map<Edge, const PairCopulaSpec*> out;
    const int d = spec.dim();
    for (int i = 0; i < d - 1; ++i)
        for (int k = i + 1; k < d; ++k) {
            Edge e;
            e.conditioned = {spec.matrix.diag(i), spec.matrix(k, i)};
            for (int r = k + 1; r < d; ++r) e.conditioning.insert(spec.matrix(r, i));
            out[e] = &spec.pair(k, i);
        }
    return out;
}

struct EdgeSpec {
    std::set<int> conditioned;
    std::set<int> conditioning;
    Family family;
    double tau;
};

void check_encodes(const RVineSpec& spec, const std::vector<EdgeSpec>& expected) {
    auto edges = edge_map(spec);
    REQUIRE(edges.size() == expected.size());
    for (const auto& e : expected) {
        const auto it = edges.find({e.conditioned, e.conditioning});
        REQUIRE(it != edges.end());
        CHECK(it->second->family == e.family);
        CHECK(param_to_tau(*it->second) == Approx(e.tau).margin(2e-7));
    }
}

} // namespace

TEST_CASE("bundled models validate", "[io]") {
    for (const char* name : {"rvine5.json", "rvine8.json", "cvine5.json", "dvine5.json", "gauss5.json"}) {
        INFO(name);
        const auto spec = load_model(model_path(name));
        CHECK(validate(spec).empty());
    }
}

TEST_CASE("five-dimensional bundled model encodes the documented tree sequence", "[io]") {
    const auto spec = load_model(model_path("rvine5.json"));
    check_encodes(spec, {
        {{1, 2}, {}, Family::gauss, 0.71},
        {{1, 3}, {}, Family::gauss, 0.33},
        {{1, 4}, {}, Family::clayton, 0.71},
        {{4, 5}, {}, Family::gumbel, 0.74},
        {{2, 4}, {1}, Family::gumbel, 0.38},
        {{3, 4}, {1}, Family::gumbel, 0.47},
        {{1, 5}, {4}, Family::gumbel, 0.33},
        {{2, 3}, {1, 4}, Family::clayton, 0.35},
        {{3, 5}, {1, 4}, Family::clayton, 0.31},
        {{2, 5}, {1, 3, 4}, Family::gauss, 0.13},
    });
}

TEST_CASE("eight-dimensional bundled model encodes the documented tree sequence", "[io]") {
    const auto spec = load_model(model_path("rvine8.json"));
    check_encodes(spec, {
        {{1, 2}, {}, Family::joe, 0.41},
        {{1, 4}, {}, Family::gauss, 0.59},
        {{1, 5}, {}, Family::gauss, 0.59},
        {{1, 6}, {}, Family::frank, 0.23},
        {{3, 6}, {}, Family::frank, 0.19},
        {{4, 7}, {}, Family::clayton, 0.44},
        {{7, 8}, {}, Family::gumbel, 0.64},
        {{2, 6}, {1}, Family::clayton, 0.58},
        {{1, 3}, {6}, Family::gumbel, 0.44},
        {{4, 6}, {1}, Family::frank, 0.11},
        {{4, 5}, {1}, Family::clayton, 0.53},
        {{1, 7}, {4}, Family::clayton, 0.29},
        {{4, 8}, {7}, Family::gauss, 0.53},
        {{5, 6}, {1, 4}, Family::gauss, 0.19},
        {{6, 7}, {1, 4}, Family::frank, 0.03},
        {{1, 8}, {4, 7}, Family::gumbel, 0.22},
        {{3, 4}, {1, 6}, Family::gauss, 0.41},
        {{2, 3}, {1, 6}, Family::gumbel, 0.68},
        {{6, 8}, {1, 4, 7}, Family::clayton, 0.17},
        {{5, 7}, {1, 4, 6}, Family::gauss, 0.09},
        {{3, 5}, {1, 4, 6}, Family::frank, 0.21},
        {{2, 4}, {1, 3, 6}, Family::gumbel, 0.57},
        {{2, 5}, {1, 3, 4, 6}, Family::joe, 0.25},
        {{3, 7}, {1, 4, 5, 6}, Family::gumbel, 0.17},
        {{5, 8}, {1, 4, 6, 7}, Family::frank, 0.02},
        {{2, 7}, {1, 3, 4, 5, 6}, Family::gumbel, 0.31},
        {{3, 8}, {1, 4, 5, 6, 7}, Family::clayton, 0.20},
        {{2, 8}, {1, 3, 4, 5, 6, 7}, Family::frank, 0.03},
    });
}

TEST_CASE("model JSON roundtrip", "[io]") {
    const auto spec = load_model(model_path("rvine8.json"));
    const auto back = model_from_json(model_to_json(spec));
    REQUIRE(back.matrix == spec.matrix);
    for (int i = 0; i < spec.dim() - 1; ++i)
        for (int k = i + 1; k < spec.dim(); ++k) {
            CHECK(back.pair(k, i).family == spec.pair(k, i).family);
            CHECK(back.pair(k, i).rotation == spec.pair(k, i).rotation);
            CHECK(back.pair(k, i).params == spec.pair(k, i).params);
        }
}

TEST_CASE("model JSON error paths", "[io]") {
    auto j = model_to_json(load_model(model_path("rvine5.json")));
    SECTION("missing parameter") {
        j["params"][4][0] = nullptr;
        CHECK_THROWS_AS(model_from_json(j), FormatError);
    }
    SECTION("bad family code") {
        j["families"][4][0] = 47;
        CHECK_THROWS_AS(model_from_json(j), FormatError);
    }
    SECTION("parameter outside its domain") {
        j["families"][4][0] = 4;  // gumbel
        j["params"][4][0] = 0.5;
        CHECK_THROWS_AS(model_from_json(j), FormatError);
    }
    SECTION("missing fields") {
        CHECK_THROWS_AS(model_from_json(json{{"d", 3}}), FormatError);
    }
}

TEST_CASE("CSV roundtrip preserves every byte of the values", "[io]") {
    const auto spec = load_model(model_path("rvine5.json"));
    const auto sample = simulate(spec, 50, 77u);
    const auto path = temp_file("vinegof_io_roundtrip.csv");
    write_csv(path, sample.u);
    const auto back = read_csv(path);
    REQUIRE(back.n() == 50);
    REQUIRE(back.d() == 5);
    REQUIRE((back.u.array() == sample.u.array()).all());
    std::remove(path.c_str());
}

TEST_CASE("CSV header handling and errors", "[io]") {
    const auto path = temp_file("vinegof_io_header.csv");
    {
        std::ofstream out(path, std::ios::binary);
        out << "a,b\n0.25,0.5\n0.75,0.125\n";
    }
    const auto data = read_csv(path);
    CHECK(data.n() == 2);
    CHECK(data.u(1, 1) == 0.125);
    {
        std::ofstream out(path, std::ios::binary);
        out << "0.25,0.5\nnot,numeric\n";
    }
    CHECK_THROWS_AS(read_csv(path), FormatError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "0.25,0.5\n0.75\n";
    }
    CHECK_THROWS_AS(read_csv(path), FormatError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "0.25,1.5\n";
    }
    CHECK_THROWS_AS(read_csv(path), FormatError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "0.25,1\n";
    }
    CHECK_THROWS_AS(read_csv(path), FormatError);
    std::remove(path.c_str());
}

TEST_CASE("simulation from the bundled 8-dim model has the documented dependence", "[io]") {
    const auto spec = load_model(model_path("rvine8.json"));
    const auto sample = simulate(spec, 2000, 808u);
    // tree-1 edge (7,8) is a Gumbel pair with tau 0.64
    std::vector<double> a(2000), b(2000);
    for (int t = 0; t < 2000; ++t) {
        a[static_cast<std::size_t>(t)] = sample.u(t, 6);
        b[static_cast<std::size_t>(t)] = sample.u(t, 7);
    }
    CHECK(math::kendall_tau(a, b) == Approx(0.64).margin(0.04));
}
