#include "cgf/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "cgf/csv_io.hpp"
#include "cgf/errors.hpp"
#include "cgf/oracle.hpp"
#include "cgf/reports.hpp"

namespace cgf::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string graph, votes, out = ".";
    std::vector<std::string> stories;
    double alpha = 0.5;
    std::string mode = "numeric";
    bool no_bigint = false;
    bool strict = false;
    std::size_t workers = 1;
    std::string seed_weights = "uniform";
};

struct ReconstructFlags {
    std::string hints;
    std::size_t max_solutions = ReconstructOptions{}.max_solutions;
    std::size_t node_budget = ReconstructOptions{}.node_budget;
};

struct FitFlags {
    std::vector<std::string> populations;
    std::vector<std::string> families{"lognormal", "weibull", "weibull-mixture(2)", "powerlaw", "dpln"};
    std::string out = ".";
    std::size_t max_iterations = distfit::FitConfig{}.max_iterations;
    double tolerance = distfit::FitConfig{}.tolerance;
    std::size_t workers = 1;
};

struct GenerateFlags {
    std::string out = ".";
    oracle::SyntheticSpec spec;
    std::string degree_model = "uniform";
};

int code_of(const std::exception& e) {
    if (dynamic_cast<const ComputationError*>(&e)) {
        return ComputationFailure;
    }
    return InputFailure;
}

Mode parse_mode(const std::string& m) {
    if (m == "numeric") {
        return Mode::Numeric;
    }
    if (m == "exact") {
        return Mode::Exact;
    }
    throw InputError("--mode must be numeric or exact");
}

// Runs f(i) for i in [0, n) on up to `workers` threads.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            f(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                f(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

struct Corpus {
    FollowerGraph graph;
    std::vector<ActivationLog> logs;  // selected stories, sorted by id
};

Corpus load(const Common& c) {
    if (c.graph.empty() || c.votes.empty()) {
        throw InputError("--graph and --votes are required");
    }
    Corpus corpus{io::read_follower_graph(c.graph), io::read_activations(c.votes)};
    if (!c.stories.empty()) {
        std::set<std::string> want(c.stories.begin(), c.stories.end());
        std::vector<ActivationLog> kept;
        for (auto& log : corpus.logs) {
            if (want.erase(log.story_id)) {
                kept.push_back(std::move(log));
            }
        }
        if (!want.empty()) {
            throw InputError("unknown story id '" + *want.begin() + "'");
        }
        corpus.logs = std::move(kept);
    }
    return corpus;
}

std::set<std::string> check_stems(const std::vector<ActivationLog>& logs) {
    std::set<std::string> stems;
    for (const auto& log : logs) {
        if (!stems.insert(io::file_stem(log.story_id)).second) {
            throw InputError("story ids collide after file-name sanitising: '" + log.story_id + "'");
        }
    }
    return stems;
}

SeedWeights weights_for(const std::optional<std::map<NodeId, double>>& table, const CascadeGraph& cg) {
    if (!table) {
        return {};
    }
    std::vector<double> w;
    for (Label s : cg.seeds()) {
        auto it = table->find(cg.node_id(s));
        w.push_back(it == table->end() ? 1.0 : it->second);
    }
    return SeedWeights(std::move(w));
}

// Shared per-story driver: builds each story on the pool, hands it to `work`,
// and collects failures in story order.
struct StoryOutcome {
    int code = Success;
    std::string error;
    std::vector<std::string> warnings;
};

template <class Work>
int for_each_story(const Common& c, const Corpus& corpus, std::ostream& err, Work&& work) {
    std::vector<StoryOutcome> outcomes(corpus.logs.size());
    std::atomic<bool> abort{false};
    parallel_for(corpus.logs.size(), c.workers, [&](std::size_t i) {
        if (abort) {
            return;
        }
        const auto& log = corpus.logs[i];
        auto& o = outcomes[i];
        try {
            std::size_t unknown = 0;
            for (const auto& a : log.records) {
                unknown += corpus.graph.contains(a.node) ? 0 : 1;
            }
            const auto cg = build_cascade_graph(corpus.graph, log, {.strict = c.strict});
            if (unknown > 0) {
                o.warnings.push_back(std::to_string(unknown) + " voter(s) outside the follower graph became isolated seeds");
            }
            work(i, log, cg);
        } catch (const std::exception& e) {
            o.code = code_of(e);
            o.error = e.what();
            if (c.strict) {
                abort = true;
            }
        }
    });
    int code = Success;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& id = corpus.logs[i].story_id;
        for (const auto& w : outcomes[i].warnings) {
            err << "warning: story " << id << ": " << w << "\n";
        }
        if (outcomes[i].code != Success) {
            err << "error: story " << id << ": " << outcomes[i].error << "\n";
            if (code == Success) {
                code = outcomes[i].code;
            }
        }
    }
    return code;
}

std::string dump(const reports::Json& j) { return j.dump(2) + "\n"; }

int cmd_analyze(const Common& c, std::ostream& err) {
    const Mode mode = parse_mode(c.mode);
    const auto corpus = load(c);
    check_stems(corpus.logs);
    const fs::path out(c.out);
    if (corpus.logs.empty()) {
        err << "warning: no activations in " << c.votes << "; writing empty populations\n";
    }
    std::vector<std::optional<std::pair<CascadeGraph, ProcessMetrics>>> results(corpus.logs.size());
    const int code = for_each_story(c, corpus, err, [&](std::size_t i, const ActivationLog& log, const CascadeGraph& cg) {
        auto m = compute_metrics(cg, mode, {.allow_arbitrary_precision = !c.no_bigint});
        io::write_atomic(out / "stories" / (io::file_stem(log.story_id) + ".metrics.json"),
                         dump(reports::metrics_json(log.story_id, cg, m, mode)));
        results[i].emplace(cg, std::move(m));
    });
    if (code != Success && c.strict) {
        return code;
    }
    reports::Populations pop;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i]) {
            pop.add(corpus.logs[i].story_id, results[i]->first, results[i]->second);
        }
    }
    for (const auto& [name, text] : pop.render()) {
        io::write_atomic(out / "populations" / (name + ".csv"), text);
    }
    return code;
}

Attenuation attenuation(double alpha) {
    try {
        return Attenuation(alpha);
    } catch (const DomainError& e) {
        throw InputError(std::string("--alpha: ") + e.what());
    }
}

int cmd_phi(const Common& c, std::ostream& err) {
    const Attenuation a = attenuation(c.alpha);
    const auto corpus = load(c);
    check_stems(corpus.logs);
    std::optional<std::map<NodeId, double>> table;
    if (c.seed_weights != "uniform") {
        table = io::read_seed_weights(c.seed_weights);
    }
    const fs::path out(c.out);
    return for_each_story(c, corpus, err, [&](std::size_t, const ActivationLog& log, const CascadeGraph& cg) {
        const auto series = phi_series(cg, a, weights_for(table, cg));
        const auto stem = io::file_stem(log.story_id);
        io::write_atomic(out / (stem + ".phi.csv"), reports::phi_csv(cg, series));
        io::write_atomic(out / (stem + ".ranking.csv"), reports::ranking_csv(cg, series.f, cascade_peaks(cg, a)));
    });
}

int cmd_reconstruct(const Common& c, const ReconstructFlags& r, std::ostream& err) {
    if (parse_mode(c.mode) != Mode::Exact) {
        throw CapabilityError("reconstruction needs exact path profiles (--mode exact)");
    }
    const auto corpus = load(c);
    check_stems(corpus.logs);
    const fs::path out(c.out);
    ReconstructOptions opt;
    opt.max_solutions = r.max_solutions;
    opt.node_budget = r.node_budget;
    return for_each_story(c, corpus, err, [&](std::size_t, const ActivationLog& log, const CascadeGraph& cg) {
        PathProfile profile;
        try {
            profile = compute_path_profiles(cg, {.allow_arbitrary_precision = !c.no_bigint});
        } catch (const OverflowError& e) {
            throw CapabilityError(std::string("exact mode unavailable: ") + e.what());
        }
        DegreeHints hints;
        if (!r.hints.empty()) {
            hints = io::read_degree_hints(r.hints, cg);
        }
        const auto rec = reconstruct(profile, cg.timestamps(), hints, opt);
        io::write_atomic(out / (io::file_stem(log.story_id) + ".reconstruction.json"),
                         dump(reports::reconstruction_json(log.story_id, cg, rec)));
    });
}

int cmd_fit(const FitFlags& f, std::ostream& err) {
    if (f.populations.empty()) {
        throw InputError("--population is required");
    }
    std::vector<distfit::FamilySpec> families;
    for (const auto& name : f.families) {
        families.push_back(distfit::parse_family(name));
    }
    distfit::FitConfig cfg;
    cfg.max_iterations = f.max_iterations;
    cfg.tolerance = f.tolerance;

    struct Loaded {
        std::string stem;
        std::optional<distfit::Sample> sample;
        std::size_t dropped = 0;
    };
    std::vector<Loaded> loaded;
    std::set<std::string> stems;
    for (const auto& p : f.populations) {
        auto values = io::read_population(p);
        const auto before = values.size();
        std::erase_if(values, [](double v) { return !(v > 0); });
        if (values.empty()) {
            throw InputError(p + ": population has no positive values");
        }
        const bool discrete = std::all_of(values.begin(), values.end(), [](double v) { return v == std::floor(v); });
        const std::string stem = fs::path(p).stem().string();
        if (!stems.insert(stem).second) {
            throw InputError("two populations share the file name " + stem);
        }
        const std::size_t dropped = before - values.size();
        loaded.push_back({stem, distfit::Sample(std::move(values), discrete), dropped});
    }

    const fs::path out(f.out);
    std::vector<int> codes(loaded.size(), Success);
    std::vector<std::string> notes(loaded.size());
    parallel_for(loaded.size(), f.workers, [&](std::size_t i) {
        const auto& l = loaded[i];
        const auto ranked = distfit::compare(*l.sample, families, cfg);
        std::size_t ok = 0;
        for (const auto& r : ranked) {
            if (!r.result) {
                notes[i] += "warning: " + l.stem + ": " + distfit::to_string(r.family) + ": " + r.error + "\n";
                continue;
            }
            ++ok;
            std::string name = distfit::to_string(r.family);
            std::replace(name.begin(), name.end(), '(', '-');
            std::erase(name, ')');
            io::write_atomic(out / (l.stem + "." + name + ".cdf.csv"), reports::cdf_csv(*l.sample, *r.result));
        }
        reports::Json j;
        j["population"] = l.stem;
        j["n"] = l.sample->size();
        j["discrete"] = l.sample->discrete();
        j["dropped_nonpositive"] = l.dropped;
        j["results"] = reports::fit_json(ranked);
        io::write_atomic(out / (l.stem + ".fit.json"), dump(j));
        if (ok == 0) {
            codes[i] = ComputationFailure;
        }
    });
    int code = Success;
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        err << notes[i];
        if (loaded[i].dropped > 0) {
            err << "warning: " << loaded[i].stem << ": dropped " << loaded[i].dropped << " nonpositive value(s)\n";
        }
        if (codes[i] != Success) {
            err << "error: " << loaded[i].stem << ": no family could be fitted\n";
            code = codes[i];
        }
    }
    return code;
}

int cmd_generate(GenerateFlags g) {
    if (g.degree_model == "fixed") {
        g.spec.degree_model = oracle::DegreeModel::Fixed;
    } else if (g.degree_model == "uniform") {
        g.spec.degree_model = oracle::DegreeModel::UniformUpTo;
    } else {
        throw InputError("--degree-model must be fixed or uniform");
    }
    if (g.spec.transmission < 0 || g.spec.transmission > 1) {
        throw InputError("--transmission must lie in [0, 1]");
    }
    if (g.spec.nodes == 0 || g.spec.degree == 0 || g.spec.seeds == 0 || g.spec.stories == 0) {
        throw InputError("--nodes, --degree, --seeds and --stories must be positive");
    }
    const auto corpus = oracle::generate(g.spec);
    const fs::path out(g.out);
    io::write_follower_graph(out / "graph.csv", corpus.graph.edges());
    io::write_activations(out / "votes.csv", corpus.logs);
    return Success;
}

void add_common(CLI::App* app, Common& c, bool with_alpha) {
    app->add_option("--graph", c.graph, "follower graph CSV (fan_id,friend_id)");
    app->add_option("--votes", c.votes, "activation log CSV (story_id,node_id,timestamp)");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--story", c.stories, "restrict to these story ids (repeatable)");
    if (with_alpha) {
        app->add_option("--alpha", c.alpha, "attenuation in (0, 1]");
        app->add_option("--seed-weights", c.seed_weights, "'uniform' or a node_id,weight CSV");
    }
    app->add_flag("--no-bigint", c.no_bigint, "fail instead of switching to arbitrary-precision path counts");
    app->add_flag("--strict", c.strict, "reject voters outside the follower graph; stop at the first failing story");
    app->add_option("--workers", c.workers, "stories processed in parallel")->check(CLI::PositiveNumber);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cascade generating function analysis", "cgf"};
    app.require_subcommand(1);

    Common analyze_c, phi_c, rec_c;
    ReconstructFlags rec_f;
    FitFlags fit_f;
    GenerateFlags gen_f;
    std::uint64_t gen_seed = gen_f.spec.random_seed;

    auto* analyze = app.add_subcommand("analyze", "cascade metrics per story and metric populations");
    add_common(analyze, analyze_c, false);
    analyze->add_option("--mode", analyze_c.mode, "numeric or exact");

    auto* phi = app.add_subcommand("phi", "cascade function series and cascade ranking");
    add_common(phi, phi_c, true);

    auto* rec = app.add_subcommand("reconstruct", "tier-level reconstruction from path profiles");
    add_common(rec, rec_c, false);
    rec_c.mode = "exact";
    rec->add_option("--mode", rec_c.mode, "must be exact");
    rec->add_option("--hints", rec_f.hints, "node_id,in_degree,out_degree CSV");
    rec->add_option("--max-solutions", rec_f.max_solutions, "decompositions kept per node");
    rec->add_option("--node-budget", rec_f.node_budget, "search states per node");

    auto* fit = app.add_subcommand("fit", "fit distribution families to metric populations");
    fit->add_option("--population", fit_f.populations, "population CSV with a value column (repeatable)");
    fit->add_option("--families", fit_f.families, "comma-separated families")->delimiter(',');
    fit->add_option("--out", fit_f.out, "output directory");
    fit->add_option("--max-iterations", fit_f.max_iterations, "EM / quasi-Newton budget");
    fit->add_option("--tolerance", fit_f.tolerance, "EM relative log-likelihood tolerance");
    fit->add_option("--workers", fit_f.workers, "populations fitted in parallel")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("generate", "synthetic follower graph and independent-cascade votes");
    gen->add_option("--out", gen_f.out, "output directory");
    gen->add_option("--nodes", gen_f.spec.nodes, "network size");
    gen->add_option("--degree", gen_f.spec.degree, "friends per node (or the upper bound)");
    gen->add_option("--degree-model", gen_f.degree_model, "fixed or uniform");
    gen->add_option("--seeds", gen_f.spec.seeds, "spontaneous voters per story");
    gen->add_option("--transmission", gen_f.spec.transmission, "per-edge activation probability");
    gen->add_option("--stories", gen_f.spec.stories, "number of stories");
    gen->add_option("--seed", gen_seed, "random seed");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return InputFailure;
    }

    try {
        if (*analyze) {
            return cmd_analyze(analyze_c, err);
        }
        if (*phi) {
            return cmd_phi(phi_c, err);
        }
        if (*rec) {
            return cmd_reconstruct(rec_c, rec_f, err);
        }
        if (*fit) {
            return cmd_fit(fit_f, err);
        }
        gen_f.spec.random_seed = gen_seed;
        return cmd_generate(gen_f);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return InputFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return code_of(e);
    }
}

} // namespace cgf::cli
