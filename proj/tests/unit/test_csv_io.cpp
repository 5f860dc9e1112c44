#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cgf/csv_io.hpp"
#include "cgf/errors.hpp"

using namespace cgf;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
    const auto p = fs::temp_directory_path() / ("cgf_io_" + name);
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("split quoted fields") {
    using V = std::vector<std::string>;
    CHECK(io::split_csv_line("a,b,c") == V{"a", "b", "c"});
    CHECK(io::split_csv_line(" a , b ") == V{"a", "b"});
    CHECK(io::split_csv_line("\"x,y\",\"he said \"\"hi\"\"\",") == V{"x,y", "he said \"hi\"", ""});
}

TEST_CASE("doubles round-trip through text") {
    for (double v : {0.1, 1.0 / 3.0, 5.163010255205557, 1e-300, 12345678.9}) {
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("file stems are filesystem safe and stable") {
    CHECK(io::file_stem("story1") == "story1");
    const auto s = io::file_stem("a/b c");
    CHECK(s.find('/') == std::string::npos);
    CHECK(s.find(' ') == std::string::npos);
    CHECK(io::file_stem("a/b c") == s);
}

TEST_CASE("follower graph accepts either column order") {
    const auto a = io::read_follower_graph(write_temp("g1.csv", "fan_id,friend_id\n2,1\n3,1\n"));
    const auto b = io::read_follower_graph(write_temp("g2.csv", "friend_id,fan_id\n1,2\n1,3\n"));
    CHECK(a.edges() == b.edges());
    CHECK(a.edge_count() == 2);
    CHECK_THROWS_AS(io::read_follower_graph(write_temp("g3.csv", "fan_id,friend_id\n2,x\n")), InputError);
    CHECK_THROWS_AS(io::read_follower_graph(write_temp("g4.csv", "fan_id,friend_id\n2,1,9\n")), InputError);
}

TEST_CASE("activations group by story and reject bad timestamps") {
    const auto logs = io::read_activations(write_temp("v1.csv", "story_id,node_id,timestamp\nb,1,0\na,2,1.5\nb,3,2\n"));
    REQUIRE(logs.size() == 2);
    CHECK(logs[0].story_id == "a");
    CHECK(logs[1].records.size() == 2);
    CHECK(logs[1].records[1].node == 3);
    CHECK_THROWS_AS(io::read_activations(write_temp("v2.csv", "story_id,node_id,timestamp\na,1,-1\n")), InputError);
    CHECK_THROWS_AS(io::read_activations(write_temp("v3.csv", "story_id,node_id,timestamp\na,1,nan\n")), InputError);
    CHECK(io::read_activations(write_temp("v4.csv", "")).empty());
}

TEST_CASE("writers and readers agree") {
    std::vector<ActivationLog> logs = {{"s", {{5, 0.25}, {7, 1.0 / 3.0}}}};
    const auto p = fs::temp_directory_path() / "cgf_io_rt" / "votes.csv";
    io::write_activations(p, logs);
    const auto back = io::read_activations(p);
    REQUIRE(back.size() == 1);
    CHECK(back[0].records[1].time == 1.0 / 3.0);
    CHECK(!fs::exists(p.string() + ".tmp"));
    fs::remove_all(p.parent_path());
}

TEST_CASE("population and seed weight files") {
    CHECK(io::read_population(write_temp("p.csv", "story_id,value\ns,1.5\ns,2\n")) == std::vector<double>{1.5, 2});
    CHECK_THROWS_AS(io::read_population(write_temp("p2.csv", "size\n1\n")), InputError);
    const auto w = io::read_seed_weights(write_temp("w.csv", "node_id,weight\n4,2.5\n"));
    CHECK(w.at(4) == 2.5);
}
