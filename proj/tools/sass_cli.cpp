#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sass/oracles.hpp"
#include "sass/rne.hpp"
#include "sass/runner.hpp"
#include "sass/version.hpp"

namespace {

using nlohmann::json;

std::string scenario_stem(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return name.empty() ? "scenario" : name;
}

std::string default_trace_path(const std::string& scenario_path, uint64_t seed) {
    const char* dir = std::getenv("SASS_TRACE_DIR");
    if (!dir || !*dir) return {};
    return std::string(dir) + "/" + scenario_stem(scenario_path) + "_" + sass::format_int(static_cast<long long>(seed)) +
           ".trace";
}

json metrics_json(const sass::Metrics& m) {
    json j;
    if (m.mode == sass::Scenario::Mode::Usar) {
        j["mode"] = "usar";
        j["victims_rescued"] = m.victims_rescued;
        if (m.completion_tick)
            j["completion_tick"] = *m.completion_tick;
        else
            j["completion_tick"] = nullptr;
        j["total_energy"] = m.total_energy;
    } else {
        j["mode"] = "explore";
        j["success_rate"] = m.success_rate;
        j["mean_cost"] = m.mean_cost;
    }
    return j;
}

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content << "\n";
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw sass::ValidationError("cannot write '" + path + "'");
    f << content;
}

std::vector<uint64_t> parse_seeds(const std::string& spec) {
    std::vector<uint64_t> seeds;
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        long long a = sass::parse_int(spec.substr(0, dots));
        long long b = sass::parse_int(spec.substr(dots + 2));
        if (a > b) throw sass::ValidationError("seed range '" + spec + "' is empty");
        for (long long s = a; s <= b; ++s) seeds.push_back(static_cast<uint64_t>(s));
        return seeds;
    }
    std::string token;
    std::istringstream ss(spec);
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) seeds.push_back(static_cast<uint64_t>(sass::parse_int(token)));
    }
    if (seeds.empty()) throw sass::ValidationError("no seeds in '" + spec + "'");
    return seeds;
}

// --- oracle suites -----------------------------------------------------------

int suite_assignment() {
    sass::Rng rng(2024);
    int checks = 0;
    for (int iter = 0; iter < 100; ++iter) {
        int n = rng.uniform_int(1, 8);
        std::vector<sass::Cell> agents, slots;
        for (int i = 0; i < n; ++i) {
            agents.push_back({rng.uniform_int(0, 15), rng.uniform_int(0, 15)});
            slots.push_back({rng.uniform_int(0, 15), rng.uniform_int(0, 15)});
        }
        auto perm = sass::assign_slots(agents, slots);
        long total = 0;
        for (int i = 0; i < n; ++i) total += sass::manhattan(agents[i], slots[perm[i]]);
        long best = sass::oracle::min_assignment_cost(agents, slots);
        if (total != best) {
            std::cerr << "assignment: mismatch " << total << " vs optimum " << best << "\n";
            return 1;
        }
        ++checks;
    }
    std::cout << "assignment: PASS (" << checks << " instances match the exhaustive optimum)\n";
    return 0;
}

int suite_routing() {
    sass::Rng rng(7);
    int checks = 0;
    for (int iter = 0; iter < 100; ++iter) {
        sass::Grid g(16, 16);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                if (rng.uniform01() < 0.2) g.set_obstacle({x, y});
        sass::Cell start{rng.uniform_int(0, 15), rng.uniform_int(0, 15)};
        sass::Cell goal{rng.uniform_int(0, 15), rng.uniform_int(0, 15)};
        if (!g.is_free(start) || !g.is_free(goal)) continue;
        auto expect = sass::oracle::bfs_shortest_path(g, start, goal);
        auto path = sass::route(g, start, goal);
        if (expect.has_value() != path.has_value()) {
            std::cerr << "routing: reachability mismatch\n";
            return 1;
        }
        if (path && static_cast<int>(path->size()) - 1 != *expect) {
            std::cerr << "routing: length " << path->size() - 1 << " vs bfs " << *expect << "\n";
            return 1;
        }
        ++checks;
    }
    std::cout << "routing: PASS (" << checks << " grids match the BFS oracle)\n";
    return 0;
}

int suite_games() {
    sass::Rng rng(99);
    int checks = 0;
    for (int iter = 0; iter < 200; ++iter) {
        int r = rng.uniform_int(1, 4), c = rng.uniform_int(1, 4);
        sass::Matrix m(r, c);
        for (auto& v : m.a) v = rng.uniform_int(-5, 5);
        auto sol = sass::solve_matrix_game(m);
        if (sass::exploitability(m, sol.row, sol.col) > 1e-6) {
            std::cerr << "games: exploitability above tolerance\n";
            return 1;
        }
        ++checks;
    }
    std::cout << "games: PASS (" << checks << " equilibria with exploitability <= 1e-6)\n";
    return 0;
}

int suite_divergence() {
    sass::Rng rng(5);
    int checks = 0;
    for (int iter = 0; iter < 500; ++iter) {
        sass::NeedsDistribution p, q;
        double sp = 0, sq = 0;
        for (int i = 0; i < 5; ++i) {
            p.p[i] = rng.uniform01() + 1e-6;
            q.p[i] = rng.uniform01() + 1e-6;
            sp += p.p[i];
            sq += q.p[i];
        }
        for (int i = 0; i < 5; ++i) {
            p.p[i] /= sp;
            q.p[i] /= sq;
        }
        double kl = sass::kl_divergence(p, q);
        double js = sass::js_divergence(p, q);
        std::vector<double> pv(p.p.begin(), p.p.end()), qv(q.p.begin(), q.p.end());
        if (std::abs(kl - sass::oracle::kl_direct(pv, qv)) > 1e-6 ||
            std::abs(js - sass::oracle::js_direct(pv, qv)) > 1e-9 || kl < 0.0 || js < 0.0 ||
            js > std::log(2.0) + 1e-12) {
            std::cerr << "divergence: mismatch against closed forms\n";
            return 1;
        }
        ++checks;
    }
    std::cout << "divergence: PASS (" << checks << " pairs match the closed-form sums)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sass: needs-driven swarm cooperation simulator"};
    app.set_version_flag("--version", sass::kVersion);
    app.require_subcommand(1);

    std::string scenario_path, trace_out, metrics_out, seeds_spec, curve_out, suite, csv_out;
    uint64_t seed = 0;
    int episodes = 50;
    bool baseline = false;

    auto* cmd_run = app.add_subcommand("run", "run one seeded scenario");
    cmd_run->add_option("--scenario", scenario_path, "scenario file")->required();
    cmd_run->add_option("--seed", seed, "rng seed")->required();
    cmd_run->add_option("--trace", trace_out, "trace output path (default: $SASS_TRACE_DIR)");
    cmd_run->add_option("--metrics", metrics_out, "metrics JSON output path (default: stdout)");
    cmd_run->add_flag("--baseline", baseline, "uniform-random assignment instead of negotiation");

    auto* cmd_sweep = app.add_subcommand("sweep", "run a seed range and aggregate");
    cmd_sweep->add_option("--scenario", scenario_path, "scenario file")->required();
    cmd_sweep->add_option("--seeds", seeds_spec, "seed range A..B or comma list")->required();
    cmd_sweep->add_option("--csv", csv_out, "per-seed CSV output path (default: stdout)");
    cmd_sweep->add_option("--metrics", metrics_out, "aggregate metrics JSON output path");
    cmd_sweep->add_flag("--baseline", baseline, "uniform-random assignment instead of negotiation");

    auto* cmd_replay = app.add_subcommand("replay", "render a trace as ASCII frames");
    cmd_replay->add_option("--trace", trace_out, "trace file")->required();

    auto* cmd_learn = app.add_subcommand("learn", "run the episodic adaptation loop");
    cmd_learn->add_option("--scenario", scenario_path, "explore scenario file")->required();
    cmd_learn->add_option("--episodes", episodes, "number of episodes")->required();
    cmd_learn->add_option("--seed", seed, "rng seed")->required();
    cmd_learn->add_option("--curve", curve_out, "learning curve CSV output (default: stdout)");

    auto* cmd_oracle = app.add_subcommand("oracle", "run brute-force verifier suites");
    cmd_oracle->add_option("--suite", suite, "assignment|routing|games|divergence|all")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_run) {
            sass::Scenario sc = sass::load_scenario(scenario_path);
            sass::RunOptions opts;
            opts.policy = baseline ? sass::Policy::RandomBaseline : sass::Policy::Sass;
            sass::RunResult r = sass::run(sc, seed, opts);
            std::string tpath = trace_out.empty() ? default_trace_path(scenario_path, seed) : trace_out;
            if (!tpath.empty()) r.trace.save(tpath);
            write_or_print(metrics_out, metrics_json(r.metrics).dump(2));
            return 0;
        }
        if (*cmd_sweep) {
            sass::Scenario sc = sass::load_scenario(scenario_path);
            sass::RunOptions opts;
            opts.policy = baseline ? sass::Policy::RandomBaseline : sass::Policy::Sass;
            sass::SweepResult r = sass::sweep(sc, parse_seeds(seeds_spec), opts);
            std::ostringstream csv;
            r.write_csv(csv);
            write_or_print(csv_out, csv.str());
            json agg;
            if (sc.mode == sass::Scenario::Mode::Usar) {
                agg["mode"] = "usar";
                agg["mean_victims"] = r.usar_mean_victims;
                agg["median_victims"] = r.usar_median_victims;
            } else {
                agg["mode"] = "explore";
                agg["success_rate"] = r.explore_success_rate;
                agg["mean_cost"] = r.explore_mean_cost;
            }
            if (!metrics_out.empty())
                write_or_print(metrics_out, agg.dump(2));
            else
                std::cout << agg.dump(2) << "\n";
            return 0;
        }
        if (*cmd_replay) {
            return sass::replay(trace_out, std::cout, std::cerr);
        }
        if (*cmd_learn) {
            sass::Scenario sc = sass::load_scenario(scenario_path);
            sass::LearningCurve curve = sass::adapt_loop(sc, episodes, seed);
            std::ostringstream csv;
            curve.write_csv(csv);
            write_or_print(curve_out, csv.str());
            return 0;
        }
        if (*cmd_oracle) {
            int rc = 0;
            if (suite == "assignment" || suite == "all") rc |= suite_assignment();
            if (suite == "routing" || suite == "all") rc |= suite_routing();
            if (suite == "games" || suite == "all") rc |= suite_games();
            if (suite == "divergence" || suite == "all") rc |= suite_divergence();
            if (suite != "assignment" && suite != "routing" && suite != "games" && suite != "divergence" &&
                suite != "all")
                throw sass::ValidationError("unknown oracle suite '" + suite + "'");
            return rc;
        }
    } catch (const sass::IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 4;
    } catch (const sass::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
