#include "cgf/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cgf/errors.hpp"

namespace cgf::io {

namespace {

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path), in_(path) {
        if (!in_) {
            throw InputError("cannot open " + path.string());
        }
    }

    // Next non-blank record; false at end of file.
    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.find_first_not_of(" \t") == std::string::npos) {
                continue;
            }
            fields = split_csv_line(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw InputError(path_.string() + ":" + std::to_string(std::max<std::size_t>(line_, 1)) + ": " + what);
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

    // Maps required header names to column positions.
    std::vector<std::size_t> header(const std::vector<std::string>& names) {
        std::vector<std::string> h;
        if (!next(h)) {
            fail("missing header (expected " + join(names) + ")");
        }
        std::vector<std::size_t> pos;
        for (const auto& n : names) {
            auto it = std::find(h.begin(), h.end(), n);
            if (it == h.end()) {
                fail("header lacks column '" + n + "' (expected " + join(names) + ")");
            }
            pos.push_back(static_cast<std::size_t>(it - h.begin()));
        }
        width_ = h.size();
        return pos;
    }

    void check_width(const std::vector<std::string>& f) const {
        if (f.size() != width_) {
            fail("expected " + std::to_string(width_) + " fields, found " + std::to_string(f.size()));
        }
    }

    NodeId node(const std::string& s) const {
        NodeId v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
            fail("invalid node id '" + s + "'");
        }
        return v;
    }

    double number(const std::string& s, const char* what) const {
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
            fail(std::string("invalid ") + what + " '" + s + "'");
        }
        return v;
    }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) {
            s += (s.empty() ? "" : ",") + x;
        }
        return s;
    }

    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_ = 0;
    std::size_t width_ = 0;
};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return q + "\"";
}

} // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false, was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = was_quoted = true;
        } else if (c == ',') {
            out.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur += c;
        }
    }
    out.push_back(was_quoted ? cur : trim(cur));
    return out;
}

FollowerGraph read_follower_graph(const std::filesystem::path& path) {
    Reader r(path);
    std::vector<std::string> h;
    if (!r.next(h)) {
        r.fail("missing header (expected fan_id,friend_id)");
    }
    const auto fan = std::find(h.begin(), h.end(), "fan_id");
    const auto fr = std::find(h.begin(), h.end(), "friend_id");
    if (fan == h.end() || fr == h.end() || h.size() != 2) {
        r.fail("header must be fan_id,friend_id");
    }
    const bool fan_first = fan < fr;
    FollowerGraph g;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != 2) {
            r.fail("expected 2 fields, found " + std::to_string(f.size()));
        }
        const NodeId a = r.node(f[0]), b = r.node(f[1]);
        if (a == b) {
            r.fail("self-loop on node " + f[0]);
        }
        g.add_edge(fan_first ? a : b, fan_first ? b : a, EdgeConvention::FanToFriend);
    }
    return g;
}

std::vector<ActivationLog> read_activations(const std::filesystem::path& path) {
    Reader r(path);
    if (r.at_end()) {
        return {};  // a zero-byte log is an empty corpus
    }
    const auto pos = r.header({"story_id", "node_id", "timestamp"});
    std::map<std::string, ActivationLog> stories;
    std::vector<std::string> f;
    while (r.next(f)) {
        r.check_width(f);
        const std::string& story = f[pos[0]];
        if (story.empty()) {
            r.fail("empty story_id");
        }
        const NodeId node = r.node(f[pos[1]]);
        const double t = r.number(f[pos[2]], "timestamp");
        if (t < 0) {
            r.fail("negative timestamp " + f[pos[2]]);
        }
        auto& log = stories[story];
        log.story_id = story;
        log.records.push_back({node, t});
    }
    std::vector<ActivationLog> out;
    for (auto& [id, log] : stories) {
        out.push_back(std::move(log));
    }
    return out;
}

std::map<NodeId, double> read_seed_weights(const std::filesystem::path& path) {
    Reader r(path);
    const auto pos = r.header({"node_id", "weight"});
    std::map<NodeId, double> out;
    std::vector<std::string> f;
    while (r.next(f)) {
        r.check_width(f);
        const double w = r.number(f[pos[1]], "weight");
        if (!(w > 0)) {
            r.fail("weights must be positive");
        }
        if (!out.emplace(r.node(f[pos[0]]), w).second) {
            r.fail("duplicate weight for node " + f[pos[0]]);
        }
    }
    return out;
}

DegreeHints read_degree_hints(const std::filesystem::path& path, const CascadeGraph& cg) {
    Reader r(path);
    const auto pos = r.header({"node_id", "in_degree", "out_degree"});
    std::unordered_map<NodeId, Label> label;
    for (Label l = 0; l < cg.size(); ++l) {
        label.emplace(cg.node_id(l), l);
    }
    DegreeHints h;
    h.in_degree.assign(cg.size(), 0);
    h.out_degree.assign(cg.size(), 0);
    std::vector<bool> seen(cg.size(), false);
    std::vector<std::string> f;
    while (r.next(f)) {
        r.check_width(f);
        const NodeId id = r.node(f[pos[0]]);
        auto it = label.find(id);
        if (it == label.end()) {
            continue;  // hints may cover the whole network
        }
        const double in = r.number(f[pos[1]], "in_degree"), out = r.number(f[pos[2]], "out_degree");
        if (in < 0 || out < 0 || in != std::floor(in) || out != std::floor(out)) {
            r.fail("degrees must be nonnegative integers");
        }
        h.in_degree[it->second] = static_cast<std::uint32_t>(in);
        h.out_degree[it->second] = static_cast<std::uint32_t>(out);
        seen[it->second] = true;
    }
    for (Label l = 0; l < cg.size(); ++l) {
        if (!seen[l]) {
            throw InputError(path.string() + ": no degree hint for node " + std::to_string(cg.node_id(l)));
        }
    }
    return h;
}

std::vector<double> read_population(const std::filesystem::path& path) {
    Reader r(path);
    const auto pos = r.header({"value"});
    std::vector<double> out;
    std::vector<std::string> f;
    while (r.next(f)) {
        r.check_width(f);
        out.push_back(r.number(f[pos[0]], "value"));
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw InputError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void write_follower_graph(const std::filesystem::path& path, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    std::ostringstream s;
    s << "fan_id,friend_id\n";
    for (auto [a, b] : edges) {
        s << a << ',' << b << '\n';
    }
    write_atomic(path, s.str());
}

void write_activations(const std::filesystem::path& path, const std::vector<ActivationLog>& logs) {
    std::ostringstream s;
    s << "story_id,node_id,timestamp\n";
    for (const auto& log : logs) {
        for (const auto& a : log.records) {
            s << quote(log.story_id) << ',' << a.node << ',' << format_double(a.time) << '\n';
        }
    }
    write_atomic(path, s.str());
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string file_stem(const std::string& story_id) {
    std::string s;
    for (char c : story_id) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        s += ok ? c : '_';
    }
    if (s.empty() || s == "." || s == "..") {
        s = "_" + s;
    }
    return s;
}

} // namespace cgf::io
