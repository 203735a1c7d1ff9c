// Batch front end: model simulation, flash-strategy experiments, cost sweeps,
// tree equivalence checks, and martingale-measure solves.  Every sampling
// subcommand requires --seed; identical config + seed gives byte-identical
// output files (no timestamps anywhere).  Exit codes: 0 ok, 2 config error,
// 3 semantic error (a valid config asking for something the model cannot do).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jumplab/costs.hpp"
#include "jumplab/detector.hpp"
#include "jumplab/generator.hpp"
#include "jumplab/model.hpp"
#include "jumplab/scenario_tree.hpp"
#include "jumplab/strategies.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jumplab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSemantic = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open file: " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

// command-line flags win; unset flags fall back to the config file
template <typename T>
void fill_opt(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
    if (opt != nullptr && opt->count() > 0) return;
    if (cfg.contains(key)) {
        try {
            value = cfg.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config key '") + key + "': " + e.what());
        }
    }
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ModelSpec preset_model(const std::string& name) {
    ModelSpec m;
    if (name == "flat-jump") {
        // flat price 1, size +1/2 announced at t=0, jump at t=1
        m.initial_price = 1.0;
        JumpSpec j;
        j.time.at = 1.0;
        j.size.kind = SizeKind::PointMass;
        j.size.value = 0.5;
        j.predictability = Predictability::Full;
        m.jumps.push_back(j);
    } else if (name == "gauss-jump") {
        // noisy background, jump of random magnitude with its sign announced
        m.initial_price = 10.0;
        m.base.kind = BaseKind::GaussianWalk;
        m.base.sigma_vol = 0.2;
        JumpSpec j;
        j.time.at = 1.0;
        j.size.kind = SizeKind::SignedUniform;
        j.size.lo = 0.1;
        j.size.hi = 0.3;
        j.size.p_first = 0.5;
        j.predictability = Predictability::DirectionOnly;
        m.jumps.push_back(j);
    } else if (name == "right-jump") {
        // flat price with an announced jump just after t=1
        m.initial_price = 1.0;
        LadlagSpec l;
        l.at = 1.0;
        l.size.kind = SizeKind::PointMass;
        l.size.value = 1.0;
        m.ladlag = l;
    } else if (name == "dividend") {
        // escrowed dividend: the ex-date drop is 40% of the dividend, so the
        // gains process (price plus collected dividends) steps up by the rest
        m.initial_price = 10.0;
        DividendSpec d;
        d.amount = 1.0;
        d.fraction = 0.4;
        d.at = 1.0;
        m.dividend = d;
    } else {
        throw ConfigError("unknown preset '" + name + "' (flat-jump, gauss-jump, right-jump, dividend)");
    }
    return m;
}

struct ModelArgs {
    std::string model_file;
    std::string preset = "flat-jump";
    int steps = 64;
    double horizon = 2.0;

    CLI::Option* model_opt = nullptr;
    CLI::Option* preset_opt = nullptr;
    CLI::Option* steps_opt = nullptr;
    CLI::Option* horizon_opt = nullptr;

    void add_to(CLI::App* app) {
        model_opt = app->add_option("--model", model_file, "model spec JSON file");
        preset_opt = app->add_option("--preset", preset, "built-in model preset");
        steps_opt = app->add_option("--steps", steps, "grid steps");
        horizon_opt = app->add_option("--horizon", horizon, "time horizon");
    }

    void fill(const json& cfg) {
        fill_opt(model_opt, cfg, "model_file", model_file);
        fill_opt(preset_opt, cfg, "preset", preset);
        fill_opt(steps_opt, cfg, "steps", steps);
        fill_opt(horizon_opt, cfg, "horizon", horizon);
    }

    ModelSpec resolve_model(const json& cfg) const {
        if (cfg.contains("model")) return model_from_json(cfg.at("model").dump());
        if (!model_file.empty()) return model_from_json(load_json_file(model_file).dump());
        return preset_model(preset);
    }

    TimeGrid resolve_grid() const {
        if (steps < 1) throw ConfigError("--steps must be at least 1");
        if (!(horizon > 0.0)) throw ConfigError("--horizon must be positive");
        return TimeGrid{static_cast<std::size_t>(steps), horizon};
    }
};

json resolved_model_block(const ModelSpec& m, const TimeGrid& g) {
    json j;
    j["model"] = json::parse(model_to_json(m));
    j["model_hash"] = model_hash(m);
    j["steps"] = g.n_steps;
    j["horizon"] = g.horizon;
    return j;
}

std::string config_hash(const json& resolved) { return fnv1a_hex(resolved.dump()); }

std::string csv_header(const std::string& hash) {
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << ",config_hash=" << hash << "\n";
    return os.str();
}

// ---- simulate ----

int cmd_simulate(const std::string& config_file, ModelArgs& margs, std::uint64_t seed,
                 CLI::Option* seed_opt, int n_paths, CLI::Option* paths_opt,
                 std::string out_dir, CLI::Option* out_opt, bool serial) {
    ModelSpec model;
    TimeGrid grid{1, 1.0};
    json resolved;
    std::string hash;
    try {
        json cfg = config_file.empty() ? json::object() : load_json_file(config_file);
        margs.fill(cfg);
        fill_opt(seed_opt, cfg, "seed", seed);
        fill_opt(paths_opt, cfg, "paths", n_paths);
        fill_opt(out_opt, cfg, "out", out_dir);
        if (seed_opt->count() == 0 && !cfg.contains("seed"))
            throw ConfigError("--seed is required for sampling subcommands");
        if (n_paths < 1) throw ConfigError("--paths must be at least 1");
        grid = margs.resolve_grid();
        model = margs.resolve_model(cfg);
        model.validate(grid);
        resolved = resolved_model_block(model, grid);
        resolved["command"] = "simulate";
        resolved["seed"] = seed;
        resolved["paths"] = n_paths;
        hash = config_hash(resolved);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        PathGenerator gen(model, grid);
        auto paths = sample_paths(gen, static_cast<std::size_t>(n_paths), seed,
                                  serial ? Exec::Serial : Exec::Parallel);
        fs::create_directories(out_dir);
        std::ostringstream jumps_csv;
        jumps_csv << csv_header(hash) << "path_id,index,t,dX,dXplus\n";
        char buf[128];
        for (const auto& p : paths) {
            std::ostringstream os;
            os << csv_header(hash);
            p.write_csv(os);
            write_text_file(fs::path(out_dir) / ("path_" + std::to_string(p.path_id) + ".csv"),
                            os.str());
            for (const auto& je : p.jumps) {
                std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g,%.17g,%.17g\n",
                              static_cast<unsigned long long>(p.path_id), je.index,
                              grid.time(je.index), je.dx, je.dxplus);
                jumps_csv << buf;
            }
        }
        write_text_file(fs::path(out_dir) / "jumps.csv", jumps_csv.str());
        resolved["config_hash"] = hash;
        write_text_file(fs::path(out_dir) / "run.json", resolved.dump(2) + "\n");
        std::cout << "wrote " << n_paths << " path(s) to " << out_dir << " (config " << hash
                  << ")\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
}

// ---- run-strategy ----

std::string summary_text(const FlashStrategy& strat, const GainsReport& rep) {
    std::ostringstream os;
    os << "strategy: " << strat.name << "\n";
    os << "qualifying: " << (strat.qualifying ? "yes" : "no") << "\n";
    for (const auto& w : strat.warnings) os << "warning: " << w << "\n";
    os << "model hash: " << rep.model_hash << "\n";
    os << "paths: " << rep.n_paths << ", stages up to n = " << rep.n_max << "\n";
    os << "\n  n     mean_gap      max_gap     min_gain   mean_final\n";
    for (const auto& s : rep.by_n) {
        char line[160];
        std::snprintf(line, sizeof line, "%3d %12.6g %12.6g %12.6g %12.6g\n", s.n, s.mean_gap,
                      s.max_gap, s.min_gain, s.mean_final);
        os << line;
    }
    os << "\nlimit gains over trading paths (" << rep.trade_paths << "/" << rep.n_paths
       << "): mean " << fmt("%.6g", rep.zeta_mean) << ", min " << fmt("%.6g", rep.zeta_min)
       << ", max " << fmt("%.6g", rep.zeta_max) << "\n";
    if (!std::isnan(rep.slope_log2_gap))
        os << "log2 gap slope per stage: " << fmt("%.4g", rep.slope_log2_gap) << "\n";
    os << "gap nonincreasing: " << (rep.gap_nonincreasing ? "yes" : "no") << "\n";
    return os.str();
}

int cmd_run_strategy(const std::string& config_file, ModelArgs& margs, std::uint64_t seed,
                     CLI::Option* seed_opt, int n_paths, CLI::Option* paths_opt, int n_max,
                     CLI::Option* nmax_opt, std::string strategy, CLI::Option* strat_opt,
                     double k, CLI::Option* k_opt, double N, CLI::Option* N_opt, double C,
                     CLI::Option* C_opt, int jump_id, CLI::Option* jid_opt, bool long_only,
                     double eps, CLI::Option* eps_opt, bool trajectories, std::string out_dir,
                     CLI::Option* out_opt, bool serial) {
    ModelSpec model;
    TimeGrid grid{1, 1.0};
    json resolved;
    std::string hash;
    bool n_set = false;
    try {
        json cfg = config_file.empty() ? json::object() : load_json_file(config_file);
        margs.fill(cfg);
        fill_opt(seed_opt, cfg, "seed", seed);
        fill_opt(paths_opt, cfg, "paths", n_paths);
        fill_opt(nmax_opt, cfg, "n_max", n_max);
        fill_opt(strat_opt, cfg, "strategy", strategy);
        fill_opt(k_opt, cfg, "k", k);
        fill_opt(N_opt, cfg, "N", N);
        fill_opt(C_opt, cfg, "C", C);
        fill_opt(jid_opt, cfg, "jump_id", jump_id);
        fill_opt(eps_opt, cfg, "eps", eps);
        fill_opt(out_opt, cfg, "out", out_dir);
        if (!long_only && cfg.contains("long_only")) long_only = cfg.at("long_only").get<bool>();
        if (seed_opt->count() == 0 && !cfg.contains("seed"))
            throw ConfigError("--seed is required for sampling subcommands");
        if (n_paths < 1) throw ConfigError("--paths must be at least 1");
        if (n_max < 2) throw ConfigError("--n-max must be at least 2");
        if (jump_id < 0) throw ConfigError("--jump-id must be nonnegative");
        n_set = N_opt->count() > 0 || cfg.contains("N");
        grid = margs.resolve_grid();
        model = margs.resolve_model(cfg);
        model.validate(grid);
        resolved = resolved_model_block(model, grid);
        resolved["command"] = "run-strategy";
        resolved["seed"] = seed;
        resolved["paths"] = n_paths;
        resolved["n_max"] = n_max;
        resolved["strategy"] = strategy;
        resolved["k"] = k;
        resolved["N"] = n_set ? json(N) : json();
        resolved["C"] = C;
        resolved["jump_id"] = jump_id;
        resolved["long_only"] = long_only;
        if (eps_opt->count() > 0 || cfg.contains("eps")) resolved["eps"] = eps;
        hash = config_hash(resolved);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        PathGenerator gen(model, grid);
        FlashStrategy strat;
        const auto jid = static_cast<std::size_t>(jump_id);
        if (strategy == "sure") {
            strat = make_sure_profit_strategy(gen, jid);
        } else if (strategy == "constant") {
            strat = make_constant_profit_strategy(gen, k, jid);
        } else if (strategy == "bounded-loss") {
            strat = make_bounded_loss_strategy(gen, n_set ? N : grid.horizon, C, jid);
        } else if (strategy == "right-jump") {
            strat = make_right_jump_strategy(gen, k);
        } else {
            std::cerr << "config error: unknown strategy '" << strategy
                      << "' (sure, constant, bounded-loss, right-jump)\n";
            return kExitConfig;
        }
        if (long_only)
            strat = make_long_only_variant(strat, n_set ? std::optional<double>(N) : std::nullopt,
                                           std::optional<double>(C));

        auto paths = sample_paths(gen, static_cast<std::size_t>(n_paths), seed,
                                  serial ? Exec::Serial : Exec::Parallel);
        EvalOptions opts;
        opts.n_max = n_max;
        opts.seed = seed;
        opts.keep_trajectories = trajectories;
        opts.exec = serial ? Exec::Serial : Exec::Parallel;
        if (eps > 0.0) opts.eps = eps;
        GainsReport rep = evaluate_flash(strat, paths, opts);

        fs::create_directories(out_dir);
        if (trajectories) {
            std::ostringstream os;
            os << csv_header(hash);
            write_gains_csv(rep, os);
            write_text_file(fs::path(out_dir) / "gains.csv", os.str());
        }
        json summary = json::parse(gains_summary_json(rep));
        summary["config_hash"] = hash;
        summary["strategy"] = strat.name;
        summary["qualifying"] = strat.qualifying;
        summary["warnings"] = strat.warnings;
        write_text_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
        write_text_file(fs::path(out_dir) / "summary.txt", summary_text(strat, rep));
        resolved["config_hash"] = hash;
        write_text_file(fs::path(out_dir) / "run.json", resolved.dump(2) + "\n");
        std::cout << summary_text(strat, rep);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
}

// ---- sweep-costs ----

int cmd_sweep_costs(const std::string& config_file, ModelArgs& margs, double c,
                    CLI::Option* c_opt, double k, CLI::Option* k_opt, double N,
                    CLI::Option* N_opt, std::string eps_list, CLI::Option* eps_opt, int paths,
                    CLI::Option* paths_opt, int n_max, CLI::Option* nmax_opt,
                    std::uint64_t seed, CLI::Option* seed_opt, std::string out_dir,
                    CLI::Option* out_opt, bool serial) {
    std::vector<double> eps_values;
    ModelSpec spec;
    TimeGrid grid{1, 1.0};
    json resolved;
    std::string hash;
    try {
        json cfg = config_file.empty() ? json::object() : load_json_file(config_file);
        fill_opt(c_opt, cfg, "c", c);
        fill_opt(k_opt, cfg, "k", k);
        fill_opt(N_opt, cfg, "N", N);
        fill_opt(eps_opt, cfg, "eps_list", eps_list);
        fill_opt(paths_opt, cfg, "paths", paths);
        fill_opt(nmax_opt, cfg, "n_max", n_max);
        fill_opt(out_opt, cfg, "out", out_dir);
        std::stringstream ss(eps_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            eps_values.push_back(std::stod(tok));
        }
        if (eps_values.empty()) throw ConfigError("--eps-list holds no values");
        for (double e : eps_values)
            if (!(e > 0.0)) throw ConfigError("cost levels must be positive");
        if (!(c > 0.0)) throw ConfigError("--c must be positive");
        if (!(k >= 1.0)) throw ConfigError("--k must be at least 1");
        if (!(N > 0.0)) throw ConfigError("--N must be positive");
        if (paths < 0) throw ConfigError("--paths must be nonnegative");
        resolved["command"] = "sweep-costs";
        resolved["c"] = c;
        resolved["k"] = k;
        resolved["N"] = N;
        resolved["eps_list"] = eps_values;
        resolved["paths"] = paths;
        if (paths > 0) {
            // realized sweep: run the unit-profit construction on sampled paths
            if (n_max < 2) throw ConfigError("--n-max must be at least 2");
            if (c != 1.0)
                throw ConfigError(
                    "the realized sweep evaluates the unit-profit construction; use --c 1 or "
                    "drop --paths for the analytic floor alone");
            if (seed_opt->count() == 0 && !cfg.contains("seed"))
                throw ConfigError("--seed is required for sampling subcommands");
            fill_opt(seed_opt, cfg, "seed", seed);
            margs.fill(cfg);
            spec = margs.resolve_model(cfg);
            grid = margs.resolve_grid();
            resolved["model"] = json::parse(model_to_json(spec));
            resolved["steps"] = grid.n_steps;
            resolved["horizon"] = grid.horizon;
            resolved["n_max"] = n_max;
            resolved["seed"] = seed;
        }
        hash = config_hash(resolved);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        RobustBound rb = robust_bound(c, eps_values.front(), k, N);
        std::vector<double> levels = eps_values;
        levels.push_back(rb.eps_star);

        // one strategy, re-marked at each cost level
        std::vector<PathSample> sampled;
        FlashStrategy strat;
        if (paths > 0) {
            PathGenerator gen(spec, grid);
            sampled = sample_paths(gen, static_cast<std::size_t>(paths), seed,
                                   serial ? Exec::Serial : Exec::Parallel);
            strat = make_constant_profit_strategy(gen, k);
        }

        std::ostringstream csv;
        csv << csv_header(hash) << "epsilon,c_bar,realized_min_gain,pass\n";
        char buf[160];
        bool all_above = true;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            const double e = levels[i];
            const double floor = robust_profit_floor(c, e, k, N);
            double realized = std::numeric_limits<double>::quiet_NaN();
            int pass = floor > 0.0 ? 1 : 0;
            if (paths > 0) {
                EvalOptions opts;
                opts.n_max = n_max;
                opts.eps = e;
                opts.exec = serial ? Exec::Serial : Exec::Parallel;
                opts.seed = seed;
                GainsReport rep = evaluate_flash(strat, sampled, opts);
                bool any = false;
                for (std::size_t p = 0; p < rep.n_paths; ++p) {
                    if (rep.limit_idx[p] == npos) continue;
                    realized = any ? std::min(realized, rep.zeta_costs[p]) : rep.zeta_costs[p];
                    any = true;
                }
                pass = any && realized >= floor - 1e-12 ? 1 : 0;
                if (i < eps_values.size() && pass == 0) all_above = false;
            }
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", e, floor, realized, pass);
            csv << buf;
        }
        fs::create_directories(out_dir);
        write_text_file(fs::path(out_dir) / "sweep.csv", csv.str());
        std::cout << "profit floor stays positive below eps* = " << fmt("%.6g", rb.eps_star)
                  << " (c=" << fmt("%.4g", c) << ", k=" << fmt("%.4g", k)
                  << ", N=" << fmt("%.4g", N) << ")\n";
        if (paths > 0)
            std::cout << (all_above
                              ? "realized cost-adjusted limit gains clear the floor at every "
                                "swept level\n"
                              : "warning: realized gains fell below the floor at some level\n");
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
}

// ---- verify-equivalence ----

int cmd_verify_equivalence(const std::string& config_file, int depth, CLI::Option* depth_opt,
                           int branching, CLI::Option* branch_opt, bool enumerate_all,
                           int n_random, CLI::Option* rand_opt, std::uint64_t seed,
                           CLI::Option* seed_opt, std::string alphabet_str,
                           CLI::Option* alpha_opt, std::string out_dir, CLI::Option* out_opt,
                           bool serial) {
    std::vector<long long> alphabet;
    json resolved;
    std::string hash;
    try {
        json cfg = config_file.empty() ? json::object() : load_json_file(config_file);
        fill_opt(depth_opt, cfg, "depth", depth);
        fill_opt(branch_opt, cfg, "branching", branching);
        fill_opt(rand_opt, cfg, "random", n_random);
        fill_opt(seed_opt, cfg, "seed", seed);
        fill_opt(alpha_opt, cfg, "alphabet", alphabet_str);
        fill_opt(out_opt, cfg, "out", out_dir);
        if (!enumerate_all && cfg.contains("enumerate"))
            enumerate_all = cfg.at("enumerate").get<bool>();
        if (!enumerate_all && n_random <= 0)
            throw ConfigError("choose --enumerate or --random <count>");
        if (!enumerate_all && seed_opt->count() == 0 && !cfg.contains("seed"))
            throw ConfigError("--seed is required for random tree families");
        std::stringstream ss(alphabet_str);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            alphabet.push_back(std::stoll(tok));
        }
        if (alphabet.empty()) throw ConfigError("--alphabet holds no values");
        resolved["command"] = "verify-equivalence";
        resolved["depth"] = depth;
        resolved["branching"] = branching;
        resolved["enumerate"] = enumerate_all;
        resolved["random"] = enumerate_all ? 0 : n_random;
        resolved["seed"] = enumerate_all ? 0 : seed;
        resolved["alphabet"] = alphabet;
        hash = config_hash(resolved);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        std::vector<ScenarioTree> family;
        if (enumerate_all) {
            family = enumerate_increment_trees(depth, branching, alphabet);
        } else {
            std::vector<double> alpha_d(alphabet.begin(), alphabet.end());
            for (int i = 0; i < n_random; ++i)
                family.push_back(build_tree(depth, branching, increment_price_rule(alpha_d),
                                            random_prob_rule(), seed + static_cast<std::uint64_t>(i)));
        }
        EquivalenceReport rep =
            verify_equivalence(family, serial ? Exec::Serial : Exec::Parallel);
        json out = json::parse(equivalence_report_json(rep));
        out["config_hash"] = hash;
        fs::create_directories(out_dir);
        write_text_file(fs::path(out_dir) / "verdicts.json", out.dump(2) + "\n");
        std::cout << "checked " << rep.trees_checked << " trees: " << rep.trees_with_findings
                  << " with predictable jumps, " << rep.mismatches << " mismatches\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
}

// ---- find-emm ----

int cmd_find_emm(const std::string& config_file, std::string tree_file, CLI::Option* tree_opt,
                 std::string u, CLI::Option* u_opt, std::string d, CLI::Option* d_opt,
                 std::string root, std::string p_up, std::string out_dir, CLI::Option* out_opt) {
    ScenarioTree tree;
    json resolved;
    std::string hash;
    try {
        json cfg = config_file.empty() ? json::object() : load_json_file(config_file);
        fill_opt(tree_opt, cfg, "tree_file", tree_file);
        fill_opt(u_opt, cfg, "u", u);
        fill_opt(d_opt, cfg, "d", d);
        fill_opt(out_opt, cfg, "out", out_dir);
        if (!tree_file.empty()) {
            tree = ScenarioTree::from_json(load_json_file(tree_file).dump());
        } else if (!u.empty() && !d.empty()) {
            tree = binomial_tree(Rational::parse(root), Rational::parse(u), Rational::parse(d),
                                 Rational::parse(p_up));
        } else {
            throw ConfigError("give --tree <file> or a binomial via --u and --d");
        }
        tree.validate();
        resolved["command"] = "find-emm";
        resolved["tree"] = json::parse(tree.to_json());
        hash = config_hash(resolved);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        MartingaleMeasure mm = find_martingale_measure(tree);
        json out = json::parse(measure_json(mm));
        out["config_hash"] = hash;
        fs::create_directories(out_dir);
        write_text_file(fs::path(out_dir) / "measure.json", out.dump(2) + "\n");
        if (mm.feasible) {
            std::cout << "feasible: strictly positive martingale branch probabilities found\n";
        } else {
            std::cout << "infeasible at node " << mm.blocking_node << ": " << mm.reason << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
}

// ---- report ----

int cmd_report(const std::string& summary_file, std::string out_file) {
    json s;
    try {
        s = load_json_file(summary_file);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        std::ostringstream os;
        os << "strategy:   " << s.value("strategy", std::string("?")) << "\n";
        os << "model hash: " << s.value("model_hash", std::string("?")) << "\n";
        os << "config:     " << s.value("config_hash", std::string("?")) << "\n";
        os << "paths:      " << s.value("n_paths", 0) << "\n";
        if (s.contains("zeta")) {
            const auto& z = s.at("zeta");
            os << "limit gains: mean " << fmt("%.6g", z.value("mean", 0.0)) << ", min "
               << fmt("%.6g", z.value("min", 0.0)) << ", max " << fmt("%.6g", z.value("max", 0.0))
               << " over " << z.value("trade_paths", 0) << " trading paths\n";
        }
        if (s.contains("by_n")) {
            os << "\n  n     mean_gap     min_gain\n";
            for (const auto& e : s.at("by_n")) {
                char line[128];
                std::snprintf(line, sizeof line, "%3d %12.6g %12.6g\n", e.value("n", 0),
                              e.value("mean_gap", 0.0), e.value("min_gain", 0.0));
                os << line;
            }
        }
        if (out_file.empty())
            std::cout << os.str();
        else
            write_text_file(out_file, os.str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"price-jump arbitrage laboratory"};
    app.require_subcommand(1);

    std::string config_file;
    app.add_option("--config", config_file, "JSON config file (flags override it)")
        ->configurable(false);

    // simulate
    auto* sim = app.add_subcommand("simulate", "sample model paths to CSV");
    ModelArgs sim_model;
    sim_model.add_to(sim);
    std::uint64_t sim_seed = 0;
    int sim_paths = 1;
    std::string sim_out = "out";
    bool sim_serial = false;
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "RNG seed (required)");
    auto* sim_paths_opt = sim->add_option("--paths", sim_paths, "number of paths");
    auto* sim_out_opt = sim->add_option("--out", sim_out, "output directory");
    sim->add_flag("--serial", sim_serial, "disable parallel sampling");

    // run-strategy
    auto* run = app.add_subcommand("run-strategy", "evaluate a flash strategy stage by stage");
    ModelArgs run_model;
    run_model.add_to(run);
    std::uint64_t run_seed = 0;
    int run_paths = 100, run_nmax = 8, run_jid = 0;
    double run_k = 2.0, run_N = 0.0, run_C = 1.0, run_eps = 0.0;
    bool run_long = false, run_traj = false, run_serial = false;
    std::string run_strat = "sure", run_out = "out";
    auto* run_seed_opt = run->add_option("--seed", run_seed, "RNG seed (required)");
    auto* run_paths_opt = run->add_option("--paths", run_paths, "number of paths");
    auto* run_nmax_opt = run->add_option("--n-max", run_nmax, "deepest stage index");
    auto* run_strat_opt =
        run->add_option("--strategy", run_strat, "sure|constant|bounded-loss|right-jump");
    auto* run_k_opt = run->add_option("--k", run_k, "position cap for inverse sizing");
    auto* run_N_opt = run->add_option("--N", run_N, "time bound for the trade event");
    auto* run_C_opt = run->add_option("--C", run_C, "price band for the trade event");
    auto* run_jid_opt = run->add_option("--jump-id", run_jid, "which model jump to target");
    run->add_flag("--long-only", run_long, "rebuild as the nonnegative-position variant");
    auto* run_eps_opt = run->add_option("--eps", run_eps, "adversarial half-spread");
    run->add_flag("--trajectories", run_traj, "write per-time gains CSV");
    auto* run_out_opt = run->add_option("--out", run_out, "output directory");
    run->add_flag("--serial", run_serial, "disable parallel evaluation");

    // sweep-costs
    auto* sweep = app.add_subcommand("sweep-costs", "profit floor across cost levels");
    ModelArgs sw_model;
    sw_model.add_to(sweep);
    double sw_c = 1.0, sw_k = 2.0, sw_N = 10.0;
    int sw_paths = 0, sw_nmax = 8;
    std::uint64_t sw_seed = 0;
    bool sw_serial = false;
    std::string sw_eps = "0.001,0.005,0.01", sw_out = "out";
    auto* sw_c_opt = sweep->add_option("--c", sw_c, "frictionless profit");
    auto* sw_k_opt = sweep->add_option("--k", sw_k, "position bound");
    auto* sw_N_opt = sweep->add_option("--N", sw_N, "price bound");
    auto* sw_eps_opt = sweep->add_option("--eps-list", sw_eps, "comma-separated cost levels");
    auto* sw_paths_opt =
        sweep->add_option("--paths", sw_paths, "paths for the realized sweep (0: analytic only)");
    auto* sw_nmax_opt = sweep->add_option("--n-max", sw_nmax, "deepest stage index");
    auto* sw_seed_opt = sweep->add_option("--seed", sw_seed, "RNG seed (required with --paths)");
    auto* sw_out_opt = sweep->add_option("--out", sw_out, "output directory");
    sweep->add_flag("--serial", sw_serial, "disable parallel evaluation");

    // verify-equivalence
    auto* ver = app.add_subcommand("verify-equivalence",
                                   "detector vs strategy search over a tree family");
    int ver_depth = 2, ver_branch = 2, ver_random = 0;
    bool ver_enum = false, ver_serial = false;
    std::uint64_t ver_seed = 0;
    std::string ver_alpha = "-1,0,1", ver_out = "out";
    auto* ver_depth_opt = ver->add_option("--depth", ver_depth, "tree depth");
    auto* ver_branch_opt = ver->add_option("--branching", ver_branch, "children per node");
    ver->add_flag("--enumerate", ver_enum, "enumerate every increment tree");
    auto* ver_rand_opt = ver->add_option("--random", ver_random, "random family size");
    auto* ver_seed_opt = ver->add_option("--seed", ver_seed, "RNG seed for random families");
    auto* ver_alpha_opt = ver->add_option("--alphabet", ver_alpha, "integer increments");
    auto* ver_out_opt = ver->add_option("--out", ver_out, "output directory");
    ver->add_flag("--serial", ver_serial, "disable parallel checking");

    // find-emm
    auto* emm = app.add_subcommand("find-emm", "martingale branch probabilities for a tree");
    std::string emm_tree, emm_u, emm_d, emm_root = "1", emm_pup = "1/2", emm_out = "out";
    auto* emm_tree_opt = emm->add_option("--tree", emm_tree, "scenario tree JSON file");
    auto* emm_u_opt = emm->add_option("--u", emm_u, "binomial up factor (rational, e.g. 2)");
    auto* emm_d_opt = emm->add_option("--d", emm_d, "binomial down factor (e.g. 1/2)");
    emm->add_option("--root", emm_root, "binomial root price");
    emm->add_option("--p-up", emm_pup, "binomial physical up probability");
    auto* emm_out_opt = emm->add_option("--out", emm_out, "output directory");

    // report
    auto* rpt = app.add_subcommand("report", "render a summary JSON as plain text");
    std::string rpt_summary, rpt_out;
    rpt->add_option("--summary", rpt_summary, "summary.json from run-strategy")->required();
    rpt->add_option("--out", rpt_out, "output text file (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    if (sim->parsed())
        return cmd_simulate(config_file, sim_model, sim_seed, sim_seed_opt, sim_paths,
                            sim_paths_opt, sim_out, sim_out_opt, sim_serial);
    if (run->parsed())
        return cmd_run_strategy(config_file, run_model, run_seed, run_seed_opt, run_paths,
                                run_paths_opt, run_nmax, run_nmax_opt, run_strat, run_strat_opt,
                                run_k, run_k_opt, run_N, run_N_opt, run_C, run_C_opt, run_jid,
                                run_jid_opt, run_long, run_eps, run_eps_opt, run_traj, run_out,
                                run_out_opt, run_serial);
    if (sweep->parsed())
        return cmd_sweep_costs(config_file, sw_model, sw_c, sw_c_opt, sw_k, sw_k_opt, sw_N,
                               sw_N_opt, sw_eps, sw_eps_opt, sw_paths, sw_paths_opt, sw_nmax,
                               sw_nmax_opt, sw_seed, sw_seed_opt, sw_out, sw_out_opt, sw_serial);
    if (ver->parsed())
        return cmd_verify_equivalence(config_file, ver_depth, ver_depth_opt, ver_branch,
                                      ver_branch_opt, ver_enum, ver_random, ver_rand_opt,
                                      ver_seed, ver_seed_opt, ver_alpha, ver_alpha_opt, ver_out,
                                      ver_out_opt, ver_serial);
    if (emm->parsed())
        return cmd_find_emm(config_file, emm_tree, emm_tree_opt, emm_u, emm_u_opt, emm_d,
                            emm_d_opt, emm_root, emm_pup, emm_out, emm_out_opt);
    if (rpt->parsed()) return cmd_report(rpt_summary, rpt_out);
    return kExitConfig;
}
