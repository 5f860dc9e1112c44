#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cgf/cli.hpp"
#include "cgf/csv_io.hpp"
#include "cgf/oracle.hpp"

using namespace cgf;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path fixtures_dir = CGF_FIXTURES;

std::string fixture(const std::string& name) { return (fixtures_dir / name).string(); }

struct TempDir {
    fs::path path;
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("cgf_test_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), {}};
}

Json load_json(const fs::path& p) { return Json::parse(slurp(p)); }

std::vector<std::vector<std::string>> load_csv(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(in, line);) {
        rows.push_back(io::split_csv_line(line));
    }
    return rows;
}

// Every regular file under `root`, relative path -> bytes.
std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            files[fs::relative(e.path(), root).string()] = slurp(e.path());
        }
    }
    return files;
}

std::vector<double> f_column(const fs::path& phi_csv) {
    auto rows = load_csv(phi_csv);
    REQUIRE(rows.at(0).at(4) == "f_value");
    std::vector<double> f;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        f.push_back(std::stod(rows[i][4]));
    }
    return f;
}

void write_population(const fs::path& p, const std::vector<double>& values) {
    std::ofstream out(p);
    out << "value\n";
    for (double v : values) {
        out << io::format_double(v) << "\n";
    }
}

} // namespace

TEST_CASE("analyze on the two-cascade fixture") {
    TempDir tmp;
    auto r = invoke({"analyze", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out", tmp.path.string()});
    REQUIRE(r.code == 0);
    const auto j = load_json(tmp.path / "stories" / "fig1.metrics.json");
    CHECK(j["diameter"] == 2);
    CHECK(j["num_cascades"] == 2);
    REQUIRE(j["cascades"].size() == 2);
    CHECK(j["cascades"][0]["spread"] == 4);
    CHECK(j["cascades"][1]["spread"] == 2);
    CHECK(j["cascades"][0]["seed_node_id"] == 501);

    const auto size = load_csv(tmp.path / "populations" / "size.csv");
    REQUIRE(size.size() == 3);
    CHECK(size[1] == std::vector<std::string>{"fig1", "1", "501", "5"});
    CHECK(size[2] == std::vector<std::string>{"fig1", "2", "207", "3"});
}

TEST_CASE("exact mode reports the same totals as integers") {
    TempDir tmp;
    REQUIRE(invoke({"analyze", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out",
                 tmp.path.string(), "--mode", "exact"}).code == 0);
    const auto j = load_json(tmp.path / "stories" / "fig1.metrics.json");
    CHECK(j["mode"] == "exact");
    CHECK(j["total_paths"].is_number_integer());
    CHECK(j["total_paths"] == 7);
    CHECK(j["total_path_length"] == 8);
}

TEST_CASE("malformed input names file and line") {
    TempDir tmp;
    auto r = invoke({"analyze", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("malformed_votes.csv"), "--out", tmp.path.string()});
    CHECK(r.code == cli::InputFailure);
    CHECK(r.err.find("malformed_votes.csv:3") != std::string::npos);

    r = invoke({"analyze", "--graph", fixture("bad_header_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out", tmp.path.string()});
    CHECK(r.code == cli::InputFailure);
    CHECK(r.err.find("bad_header_graph.csv:1") != std::string::npos);

    r = invoke({"analyze", "--graph", fixture("no_such_file.csv"), "--votes", fixture("fig1_votes.csv"), "--out", tmp.path.string()});
    CHECK(r.code == cli::InputFailure);
}

TEST_CASE("empty activation file gives empty outputs and a warning") {
    for (const char* name : {"empty_votes.csv", "header_only_votes.csv"}) {
        TempDir tmp;
        auto r = invoke({"analyze", "--graph", fixture("fig1_graph.csv"), "--votes", fixture(name), "--out", tmp.path.string()});
        CHECK(r.code == 0);
        CHECK(r.err.find("warning") != std::string::npos);
        const auto size = load_csv(tmp.path / "populations" / "size.csv");
        REQUIRE(size.size() == 1);
        CHECK(size[0][0] == "story_id");
        CHECK(load_csv(tmp.path / "populations" / "num_cascades.csv").size() == 1);
    }
}

TEST_CASE("usage errors") {
    CHECK(invoke({}).code == cli::InputFailure);
    CHECK(invoke({"analyze", "--bogus"}).code == cli::InputFailure);
    CHECK(invoke({"analyze"}).code == cli::InputFailure);
    auto h = invoke({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("analyze") != std::string::npos);
    TempDir tmp;
    auto r = invoke({"phi", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out",
                  tmp.path.string(), "--story", "missing"});
    CHECK(r.code == cli::InputFailure);
    CHECK(invoke({"phi", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out",
               tmp.path.string(), "--alpha", "1.5"}).code == cli::InputFailure);
    CHECK(invoke({"analyze", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out",
               tmp.path.string(), "--mode", "fuzzy"}).code == cli::InputFailure);
}

TEST_CASE("unknown voters: warning by default, failure under --strict") {
    TempDir tmp;
    {
        std::ofstream v(tmp / "votes.csv");
        v << "story_id,node_id,timestamp\nfig1,501,1\nfig1,333,2\nfig1,9999,3\n";
    }
    auto r = invoke({"analyze", "--graph", fixture("fig1_graph.csv"), "--votes", tmp / "votes.csv", "--out", tmp / "a"});
    CHECK(r.code == 0);
    CHECK(r.err.find("outside the follower graph") != std::string::npos);
    CHECK(load_json(tmp.path / "a" / "stories" / "fig1.metrics.json")["num_seeds"] == 2);

    r = invoke({"analyze", "--graph", fixture("fig1_graph.csv"), "--votes", tmp / "votes.csv", "--out", tmp / "b", "--strict"});
    CHECK(r.code == cli::InputFailure);
}

TEST_CASE("synthetic corpus: one population row per active seed") {
    TempDir tmp;
    oracle::SyntheticSpec spec;
    spec.nodes = 400;
    spec.degree = 5;
    spec.seeds = 3;
    spec.transmission = 0.35;
    spec.stories = 100;
    spec.random_seed = 11;
    REQUIRE(invoke({"generate", "--out", tmp.path.string(), "--nodes", "400", "--degree", "5", "--seeds", "3",
                 "--transmission", "0.35", "--stories", "100", "--seed", "11"}).code == 0);
    const auto truth = oracle::generate(spec);

    std::size_t active = 0;
    for (const auto& cg : truth.truth) {
        for (Label s : cg.seeds()) {
            active += cg.out_degree(s) > 0 ? 1 : 0;
        }
    }
    REQUIRE(active > 0);

    // Isolated nodes drop out of graph.csv, so their votes come back as
    // outside-the-graph seeds; that does not change the active count.
    auto r = invoke({"analyze", "--graph", tmp / "graph.csv", "--votes", tmp / "votes.csv", "--out", tmp / "out", "--workers", "4"});
    REQUIRE(r.code == 0);
    for (const auto& metric : {"size", "spread", "diameter", "total_paths", "total_path_length", "avg_path_length"}) {
        CHECK(load_csv(tmp.path / "out" / "populations" / (std::string(metric) + ".csv")).size() == active + 1);
    }
    CHECK(load_csv(tmp.path / "out" / "populations" / "num_cascades.csv").size() == 101);
}

TEST_CASE("reruns are byte-identical and independent of the worker count") {
    TempDir tmp;
    REQUIRE(invoke({"generate", "--out", tmp.path.string(), "--nodes", "300", "--stories", "20", "--seed", "3"}).code == 0);
    const std::vector<std::string> base = {"--graph", tmp / "graph.csv", "--votes", tmp / "votes.csv"};
    std::map<std::string, std::string> first;
    for (const auto& [dir, workers] : {std::pair{"w1", "1"}, std::pair{"w1b", "1"}, std::pair{"w4", "4"}}) {
        auto args = std::vector<std::string>{"analyze"};
        args.insert(args.end(), base.begin(), base.end());
        args.insert(args.end(), {"--out", tmp / dir, "--workers", workers});
        REQUIRE(invoke(args).code == 0);
        args[0] = "phi";
        args[args.size() - 3] = tmp / (std::string(dir) + "_phi");
        REQUIRE(invoke(args).code == 0);
        auto snap = snapshot(tmp / dir);
        for (auto& [k, v] : snapshot(tmp / (std::string(dir) + "_phi"))) {
            snap["phi/" + k] = v;
        }
        if (first.empty()) {
            first = snap;
            CHECK(first.size() > 20);
        } else {
            CHECK(snap == first);
        }
    }

    REQUIRE(invoke({"generate", "--out", tmp / "again", "--nodes", "300", "--stories", "20", "--seed", "3"}).code == 0);
    CHECK(slurp(tmp / "again/graph.csv") == slurp(tmp / "graph.csv"));
    CHECK(slurp(tmp / "again/votes.csv") == slurp(tmp / "votes.csv"));
}

TEST_CASE("corpus run equals the union of per-story runs") {
    TempDir tmp;
    REQUIRE(invoke({"generate", "--out", tmp.path.string(), "--nodes", "300", "--stories", "6", "--seed", "5",
                 "--transmission", "0.4"}).code == 0);
    REQUIRE(invoke({"analyze", "--graph", tmp / "graph.csv", "--votes", tmp / "votes.csv", "--out", tmp / "all"}).code == 0);
    const auto all = snapshot(tmp / "all");

    std::map<std::string, std::vector<std::string>> union_rows;  // population -> data rows
    for (int s = 1; s <= 6; ++s) {
        const std::string id = "story" + std::to_string(s);
        const std::string dir = tmp / ("one_" + id);
        REQUIRE(invoke({"analyze", "--graph", tmp / "graph.csv", "--votes", tmp / "votes.csv", "--out", dir, "--story", id}).code == 0);
        const auto one = snapshot(dir);
        CHECK(one.at("stories/" + id + ".metrics.json") == all.at("stories/" + id + ".metrics.json"));
        for (const auto& [name, text] : one) {
            if (name.rfind("populations/", 0) == 0) {
                std::istringstream in(text);
                std::string line;
                std::getline(in, line);
                while (std::getline(in, line)) {
                    union_rows[name].push_back(line);
                }
            }
        }
    }
    for (const auto& [name, rows] : union_rows) {
        std::istringstream in(all.at(name));
        std::string line;
        std::getline(in, line);
        std::vector<std::string> corpus_rows;
        while (std::getline(in, line)) {
            corpus_rows.push_back(line);
        }
        CHECK_MESSAGE(corpus_rows == rows, name);
    }
}

TEST_CASE("phi signatures of chain, star and clique") {
    TempDir tmp;
    REQUIRE(invoke({"phi", "--graph", fixture("shapes_graph.csv"), "--votes", fixture("shapes_votes.csv"), "--out", tmp.path.string()}).code == 0);

    const auto chain = f_column(tmp.path / "chain.phi.csv");
    REQUIRE(chain.size() == 6);
    for (std::size_t i = 2; i < chain.size(); ++i) {
        CHECK(chain[i] < chain[i - 1]);
    }
    const auto star = f_column(tmp.path / "star.phi.csv");
    REQUIRE(star.size() == 6);
    for (std::size_t i = 1; i < star.size(); ++i) {
        CHECK(star[i] == doctest::Approx(0.5).epsilon(1e-15));
    }
    const auto clique = f_column(tmp.path / "clique.phi.csv");
    REQUIRE(clique.size() == 6);
    for (std::size_t i = 2; i < clique.size(); ++i) {
        CHECK(clique[i] > clique[i - 1]);
    }

    const auto ranking = load_csv(tmp.path / "chain.ranking.csv");
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0][0] == "rank");
}

TEST_CASE("phi ranking orders cascades by their largest value") {
    TempDir tmp;
    REQUIRE(invoke({"phi", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out", tmp.path.string(),
                 "--alpha", "0.8"}).code == 0);
    const auto rows = load_csv(tmp.path / "fig1.ranking.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "1");
    CHECK(std::stod(rows[1].back()) >= std::stod(rows[2].back()));
}

TEST_CASE("fit ranks the generating family first") {
    TempDir tmp;
    std::mt19937_64 rng(20);
    write_population(tmp.path / "ln.csv", oracle::draw_lognormal(3000, 3.57, 0.96, rng));
    auto r = invoke({"fit", "--population", tmp / "ln.csv", "--out", tmp / "rivals", "--families",
                     "lognormal,weibull,weibull-mixture(2),powerlaw"});
    REQUIRE(r.code == 0);
    auto j = load_json(tmp.path / "rivals" / "ln.fit.json");
    CHECK(j["n"] == 3000);
    REQUIRE(j["results"].size() == 4);
    CHECK(j["results"][0]["family"] == "lognormal");
    CHECK(j["results"][0]["params"]["mu"].get<double>() == doctest::Approx(3.57).epsilon(0.05));

    // The double Pareto-lognormal contains the lognormal as a limit, so on
    // lognormal data it may edge ahead by sampling noise alone.
    r = invoke({"fit", "--population", tmp / "ln.csv", "--out", tmp.path.string()});
    REQUIRE(r.code == 0);
    j = load_json(tmp.path / "ln.fit.json");
    REQUIRE(j["results"].size() == 5);
    std::map<std::string, Json> by_family;
    for (const auto& e : j["results"]) {
        by_family[e["family"].get<std::string>()] = e;
    }
    const auto first = j["results"][0]["family"].get<std::string>();
    CHECK((first == "lognormal" || first == "dpln"));
    if (first == "dpln") {
        CHECK(by_family["lognormal"]["ks"].get<double>() - by_family["dpln"]["ks"].get<double>() < 0.01);
        CHECK(by_family["dpln"]["loglik"].get<double>() - by_family["lognormal"]["loglik"].get<double>() < 3.0);
    }
    CHECK(fs::exists(tmp.path / "ln.lognormal.cdf.csv"));
    CHECK(fs::exists(tmp.path / "ln.weibull-mixture-2.cdf.csv"));
}

TEST_CASE("fit on identical values reports a per-family error") {
    TempDir tmp;
    write_population(tmp.path / "flat.csv", std::vector<double>(50, 4.0));
    auto r = invoke({"fit", "--population", tmp / "flat.csv", "--out", tmp.path.string(), "--families", "lognormal,weibull"});
    CHECK(r.code == cli::ComputationFailure);
    const auto j = load_json(tmp.path / "flat.fit.json");
    REQUIRE(j["results"].size() == 2);
    for (const auto& e : j["results"]) {
        CHECK(e.contains("error"));
        CHECK(!e.contains("ks"));
    }
}

TEST_CASE("fit on a mixed population reports the power-law tail fraction") {
    TempDir tmp;
    std::mt19937_64 rng(8);
    auto values = oracle::draw_lognormal(1500, 1.0, 0.5, rng);
    const auto tail = oracle::draw_powerlaw(500, 2.5, 10.0, rng);
    values.insert(values.end(), tail.begin(), tail.end());
    values.push_back(0.0);  // dropped with a warning
    write_population(tmp.path / "mixed.csv", values);
    auto r = invoke({"fit", "--population", tmp / "mixed.csv", "--out", tmp.path.string(), "--families", "powerlaw,lognormal"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("dropped 1") != std::string::npos);
    const auto j = load_json(tmp.path / "mixed.fit.json");
    CHECK(j["n"] == 2000);
    bool found = false;
    for (const auto& e : j["results"]) {
        if (e["family"] == "powerlaw") {
            found = true;
            REQUIRE(e.contains("tail_fraction"));
            CHECK(e["tail_fraction"].get<double>() > 0.1);
            CHECK(e["tail_fraction"].get<double>() < 0.5);
        }
    }
    CHECK(found);

    CHECK(invoke({"fit", "--population", tmp / "mixed.csv", "--families", "gamma"}).code == cli::InputFailure);
    write_population(tmp.path / "zeros.csv", {0.0, 0.0});
    CHECK(invoke({"fit", "--population", tmp / "zeros.csv", "--out", tmp.path.string()}).code == cli::InputFailure);
}

TEST_CASE("reconstruct the two-cascade fixture exactly") {
    TempDir tmp;
    auto r = invoke({"reconstruct", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out", tmp.path.string()});
    REQUIRE(r.code == 0);
    const auto j = load_json(tmp.path / "fig1.reconstruction.json");
    CHECK(j["node_level_exact"] == true);
    CHECK(j["exact_edges"] == 7);
    std::set<std::pair<int, int>> edges;
    for (const auto& e : j["edges"]) {
        CHECK(e["confidence"] == "exact");
        edges.insert({e["from_node"].get<int>(), e["to_node"].get<int>()});
    }
    const std::set<std::pair<int, int>> expect = {{501, 333}, {501, 120}, {207, 120}, {207, 918},
                                                  {501, 444}, {333, 444}, {501, 105}};
    CHECK(edges == expect);

    r = invoke({"reconstruct", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out", tmp / "h",
             "--hints", fixture("fig1_degrees.csv")});
    CHECK(r.code == 0);
    CHECK(load_json(tmp.path / "h" / "fig1.reconstruction.json")["exact_edges"] == 7);
}

TEST_CASE("reconstruct flags edges into a tie group") {
    TempDir tmp;
    REQUIRE(invoke({"reconstruct", "--graph", fixture("shapes_graph.csv"), "--votes", fixture("shapes_votes.csv"), "--out",
                 tmp.path.string(), "--story", "ties"}).code == 0);
    const auto j = load_json(tmp.path / "ties.reconstruction.json");
    CHECK(j["node_level_exact"] == false);
    bool flagged = false;
    for (const auto& e : j["edges"]) {
        if (e["to_node"] == 34) {
            flagged = flagged || e["confidence"] == "tier-ambiguous";
        }
    }
    CHECK(flagged);
    bool tie_tier = false;
    for (const auto& t : j["tiers"]) {
        tie_tier = tie_tier || t == Json::array({2, 3});
    }
    CHECK(tie_tier);

    REQUIRE(invoke({"reconstruct", "--graph", fixture("shapes_graph.csv"), "--votes", fixture("shapes_votes.csv"), "--out",
                 tmp.path.string(), "--story", "chain"}).code == 0);
    CHECK(load_json(tmp.path / "chain.reconstruction.json")["node_level_exact"] == true);
}

TEST_CASE("reconstruct refuses numeric mode and disabled big integers") {
    TempDir tmp;
    auto r = invoke({"reconstruct", "--graph", fixture("fig1_graph.csv"), "--votes", fixture("fig1_votes.csv"), "--out",
                  tmp.path.string(), "--mode", "numeric"});
    CHECK(r.code == cli::ComputationFailure);
    CHECK(!fs::exists(tmp.path / "fig1.reconstruction.json"));

    // A 70-node clique has path counts far beyond 64 bits.
    {
        std::ofstream g(tmp / "g.csv"), v(tmp / "v.csv");
        g << "fan_id,friend_id\n";
        v << "story_id,node_id,timestamp\n";
        for (int i = 1; i <= 70; ++i) {
            for (int j = 1; j < i; ++j) {
                g << i << "," << j << "\n";
            }
            v << "big," << i << "," << i << "\n";
        }
    }
    r = invoke({"reconstruct", "--graph", tmp / "g.csv", "--votes", tmp / "v.csv", "--out", tmp.path.string(), "--no-bigint"});
    CHECK(r.code == cli::ComputationFailure);
    CHECK(r.err.find("exact mode unavailable") != std::string::npos);
}

TEST_CASE("reconstruct random DAGs through files: exact edges are true edges") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        TempDir tmp;
        oracle::DagSpec spec;
        spec.nodes = 15;
        spec.max_in_degree = 3;
        spec.seeds = 1 + seed % 3;
        spec.random_seed = seed;
        const auto cg = oracle::random_dag(spec);
        const auto [graph, log] = oracle::to_inputs(cg, "dag");
        io::write_follower_graph(tmp.path / "g.csv", graph.edges());
        io::write_activations(tmp.path / "v.csv", {log});
        REQUIRE(invoke({"reconstruct", "--graph", tmp / "g.csv", "--votes", tmp / "v.csv", "--out", tmp.path.string()}).code == 0);
        const auto j = load_json(tmp.path / "dag.reconstruction.json");
        CHECK(j["nodes"] == 15);
        for (const auto& e : j["edges"]) {
            const Label from = e["from"].get<Label>() - 1, to = e["to"].get<Label>() - 1;
            if (e["confidence"] == "exact") {
                const auto in = cg.in_edges(to);
                CHECK(std::binary_search(in.begin(), in.end(), from));
            }
        }
    }
}
