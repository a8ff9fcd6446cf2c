// Command-line front end: design targets, meta-train policies, tune configs,
// generate datasets, run benchmarks, and render reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rnadesign/bench.hpp"
#include "rnadesign/config_io.hpp"
#include "rnadesign/folding.hpp"
#include "rnadesign/trainer.hpp"
#include "rnadesign/tuner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rnadesign;

namespace {

// Accepts "90", "90s", "10m", "1.5h", "500ms".
double parse_duration(const std::string& text) {
    if (text.empty()) throw CLI::ValidationError("duration", "empty duration");
    std::size_t pos = 0;
    const double value = std::stod(text, &pos);
    const std::string unit = text.substr(pos);
    if (unit.empty() || unit == "s") return value;
    if (unit == "ms") return value / 1000.0;
    if (unit == "m") return value * 60.0;
    if (unit == "h") return value * 3600.0;
    throw CLI::ValidationError("duration", "unknown unit: " + unit);
}

json result_to_json(const DesignResult& r) {
    json j;
    j["target"] = r.target;
    j["solved"] = r.solved;
    j["best_distance"] =
        r.episodes == 0 ? r.target.size() : r.best_distance;
    j["best_sequence"] = r.best_sequence;
    j["best_reward"] = r.best_reward;
    j["time_to_best_s"] = r.time_to_best_s;
    j["time_to_solve_s"] = r.time_to_solve_s;
    j["episodes"] = r.episodes;
    j["env_steps"] = r.env_steps;
    j["updates"] = r.updates;
    j["lis_candidates"] = r.lis_candidates;
    j["restarts"] = r.restarts.size();
    j["elapsed_s"] = r.elapsed_s;
    return j;
}

StatsSink make_stats_sink(std::ofstream& stream) {
    return [&stream](const TrainStats& st) {
        json j;
        j["time_s"] = st.time_s;
        j["episodes"] = st.episodes;
        j["mean_reward"] = st.mean_reward;
        j["best_distance"] = st.best_distance;
        j["restarts"] = st.restarts;
        stream << j.dump() << "\n";
        stream.flush();
    };
}

struct CommonArgs {
    std::string folder = "nussinov";
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;

    FileConfig load() const {
        if (config_path.empty()) return FileConfig{};
        return load_config_file(config_path);
    }
    fs::path out(const std::string& name) const {
        fs::create_directories(out_dir);
        return fs::path(out_dir) / name;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--folder", args.folder, "Folding oracle: nussinov|stacked")
        ->check(CLI::IsMember({"nussinov", "stacked"}));
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--seed", args.seed, "Master random seed");
    cmd->add_option("--out", args.out_dir, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RNA inverse folding via reinforcement learning"};
    app.require_subcommand(1);

    // ---- design ----------------------------------------------------------
    CommonArgs design_args;
    std::string design_target, design_targets_file, design_strategy = "learna";
    std::string design_timeout = "60s", design_restart, design_checkpoint;
    std::uint64_t design_max_episodes = 0;
    bool design_no_lis = false;
    std::size_t design_lis_xi = 5;
    auto* design = app.add_subcommand("design", "Design sequences for target structures");
    add_common(design, design_args);
    design->add_option("--target", design_target, "Target structure in dot-bracket notation");
    design->add_option("--targets", design_targets_file, "File with one structure per line");
    design->add_option("--strategy", design_strategy,
                       "learna|meta|meta-adapt|random|hillclimb")
        ->check(CLI::IsMember({"learna", "meta", "meta-adapt", "random", "hillclimb"}));
    design->add_option("--timeout", design_timeout, "Per-target time budget (e.g. 60s, 10m)");
    design->add_option("--restart-period", design_restart,
                       "Reinitialize if unsolved for this long (off by default)");
    design->add_option("--checkpoint", design_checkpoint,
                       "Policy checkpoint (meta strategies)");
    design->add_option("--max-episodes", design_max_episodes,
                       "Stop after this many episodes (0 = no cap)");
    design->add_flag("--no-lis", design_no_lis, "Disable the local improvement step");
    design->add_option("--lis-xi", design_lis_xi, "LIS distance threshold");

    // ---- meta-train ------------------------------------------------------
    CommonArgs mt_args;
    std::string mt_targets_file, mt_timeout = "10m", mt_checkpoint = "policy.ckpt";
    int mt_workers = 1;
    auto* mt = app.add_subcommand("meta-train", "Train one policy across many targets");
    add_common(mt, mt_args);
    mt->add_option("--targets", mt_targets_file, "Training structures, one per line")
        ->required();
    mt->add_option("--timeout", mt_timeout, "Total training budget");
    mt->add_option("--workers", mt_workers, "Rollout worker threads");
    mt->add_option("--checkpoint", mt_checkpoint, "Where to write the trained policy");

    // ---- tune ------------------------------------------------------------
    CommonArgs tune_args;
    std::string tune_val_file, tune_train_file, tune_strategy = "learna";
    std::string tune_objective = "sum_min_distance", tune_base_budget = "20s";
    int tune_rungs = 3;
    std::size_t tune_brackets = 1, tune_configs = 9, tune_max_evals = 0;
    auto* tune = app.add_subcommand("tune", "Joint architecture/hyperparameter search");
    add_common(tune, tune_args);
    tune->add_option("--targets", tune_val_file, "Validation structures")->required();
    tune->add_option("--train-targets", tune_train_file,
                     "Training structures (meta strategies)");
    tune->add_option("--strategy", tune_strategy, "learna|meta|meta-adapt")
        ->check(CLI::IsMember({"learna", "meta", "meta-adapt"}));
    tune->add_option("--objective", tune_objective,
                     "unsolved_count|sum_mean_distance|sum_min_distance");
    tune->add_option("--base-budget", tune_base_budget, "Budget at the smallest rung");
    tune->add_option("--rungs", tune_rungs, "Ladder height (factor 3 between rungs)");
    tune->add_option("--brackets", tune_brackets, "Successive-halving brackets");
    tune->add_option("--configs", tune_configs, "Configs sampled per bracket");
    tune->add_option("--max-evals", tune_max_evals, "Stop after this many evaluations");

    // ---- make-dataset ----------------------------------------------------
    CommonArgs ds_args;
    DatasetConfig ds_cfg;
    std::string ds_filter_budget;
    auto* ds = app.add_subcommand("make-dataset", "Generate train/val/test target sets");
    add_common(ds, ds_args);
    ds->add_option("--train", ds_cfg.count_train, "Training set size");
    ds->add_option("--val", ds_cfg.count_val, "Validation set size");
    ds->add_option("--test", ds_cfg.count_test, "Test set size");
    ds->add_option("--min-length", ds_cfg.min_length, "Minimum target length");
    ds->add_option("--max-length", ds_cfg.max_length, "Maximum target length");
    ds->add_option("--filter-budget", ds_filter_budget,
                   "Hill-climb filter budget per structure (0 disables)");

    // ---- benchmark -------------------------------------------------------
    CommonArgs bm_args;
    std::string bm_targets_file, bm_solver = "learna", bm_timeout = "60s";
    std::string bm_name = "benchmark", bm_checkpoint, bm_restart;
    int bm_runs = 1;
    bool bm_no_lis = false;
    std::uint64_t bm_max_episodes = 0;
    auto* bm = app.add_subcommand("benchmark", "Evaluate a solver on a target set");
    add_common(bm, bm_args);
    bm->add_option("--targets", bm_targets_file, "Benchmark structures")->required();
    bm->add_option("--strategy", bm_solver, "learna|meta|meta-adapt|random|hillclimb")
        ->check(CLI::IsMember({"learna", "meta", "meta-adapt", "random", "hillclimb"}));
    bm->add_option("--timeout", bm_timeout, "Per-target timeout");
    bm->add_option("--runs", bm_runs, "Evaluation runs per target");
    bm->add_option("--name", bm_name, "Benchmark name for the report");
    bm->add_option("--checkpoint", bm_checkpoint, "Policy checkpoint (meta strategies)");
    bm->add_option("--restart-period", bm_restart, "Restart period inside the solver");
    bm->add_flag("--no-lis", bm_no_lis, "Disable the local improvement step");
    bm->add_option("--max-episodes", bm_max_episodes, "Episode cap per cell (0 = none)");

    // ---- report ----------------------------------------------------------
    CommonArgs rp_args;
    std::string rp_records;
    auto* rp = app.add_subcommand("report", "Render tables from benchmark records");
    add_common(rp, rp_args);
    rp->add_option("--records", rp_records, "records.ldjson from a benchmark run")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*design) {
            const FileConfig file_cfg = design_args.load();
            const auto oracle = make_oracle(design_args.folder);
            std::vector<DotBracket> targets;
            if (!design_target.empty()) targets.push_back(DotBracket::parse(design_target));
            if (!design_targets_file.empty()) {
                auto more = load_targets(design_targets_file);
                targets.insert(targets.end(), more.begin(), more.end());
            }
            if (targets.empty())
                throw std::runtime_error("design needs --target or --targets");

            TrainLoopConfig loop = file_cfg.loop;
            loop.time_budget_s = parse_duration(design_timeout);
            if (!design_restart.empty()) loop.restart_period_s = parse_duration(design_restart);
            loop.max_episodes = design_max_episodes;
            loop.lis_enabled = !design_no_lis;
            loop.lis_xi = design_lis_xi;

            std::optional<PolicyParams> checkpoint;
            if (design_strategy == "meta" || design_strategy == "meta-adapt") {
                if (design_checkpoint.empty())
                    throw std::runtime_error("meta strategies need --checkpoint");
                checkpoint = PolicyParams::load(design_checkpoint, file_cfg.policy);
            }

            std::ofstream stats_stream, results_stream;
            StatsSink sink;
            if (!design_args.out_dir.empty()) {
                stats_stream.open(design_args.out("stats.ldjson"), std::ios::trunc);
                results_stream.open(design_args.out("results.ldjson"), std::ios::trunc);
                sink = make_stats_sink(stats_stream);
            }

            int unsolved = 0;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                loop.seed = derive_seed(design_args.seed, i);
                DesignResult r;
                if (design_strategy == "learna") {
                    r = run_learna(targets[i], file_cfg.policy, loop, *oracle, sink);
                } else if (design_strategy == "meta") {
                    r = run_meta_apply(*checkpoint, targets[i], loop, *oracle, false, sink);
                } else if (design_strategy == "meta-adapt") {
                    r = run_meta_apply(*checkpoint, targets[i], loop, *oracle, true, sink);
                } else if (design_strategy == "random") {
                    r = baseline_random(targets[i], *oracle, loop.time_budget_s, loop.seed,
                                        loop.max_episodes);
                } else {
                    r = baseline_hillclimb(targets[i], *oracle, loop.time_budget_s, loop.seed,
                                           loop.max_episodes);
                }
                const json j = result_to_json(r);
                std::cout << j.dump() << "\n";
                if (results_stream.is_open()) results_stream << j.dump() << "\n";
                if (!r.solved) ++unsolved;
            }
            return unsolved == 0 ? 0 : 2;
        }

        if (*mt) {
            const FileConfig file_cfg = mt_args.load();
            const auto oracle = make_oracle(mt_args.folder);
            const auto targets = load_targets(mt_targets_file);

            TrainLoopConfig loop = file_cfg.loop;
            loop.strategy = Strategy::meta_learna;
            loop.time_budget_s = parse_duration(mt_timeout);
            loop.worker_count = mt_workers;
            loop.seed = mt_args.seed;

            std::ofstream stats_stream;
            StatsSink sink;
            if (!mt_args.out_dir.empty()) {
                stats_stream.open(mt_args.out("stats.ldjson"), std::ios::trunc);
                sink = make_stats_sink(stats_stream);
            }

            const auto result =
                run_meta_train(targets, file_cfg.policy, loop, *oracle, sink);
            result.params.save(mt_checkpoint);
            json j;
            j["checkpoint"] = mt_checkpoint;
            j["episodes"] = result.episodes;
            j["updates"] = result.updates;
            j["episodes_produced"] = result.episodes_produced;
            j["episodes_consumed"] = result.episodes_consumed;
            j["elapsed_s"] = result.elapsed_s;
            std::cout << j.dump() << "\n";
            return 0;
        }

        if (*tune) {
            const FileConfig file_cfg = tune_args.load();
            const auto oracle = make_oracle(tune_args.folder);
            const auto validation = load_targets(tune_val_file);
            std::vector<DotBracket> train_targets;
            if (!tune_train_file.empty()) train_targets = load_targets(tune_train_file);

            EvaluateOptions eopts;
            eopts.strategy = strategy_from_string(tune_strategy);
            eopts.objective = objective_from_string(tune_objective);
            eopts.train_targets = train_targets;
            const auto ladder =
                BudgetLadder::geometric(parse_duration(tune_base_budget), tune_rungs);
            eopts.restart_period_s = ladder.rung_budgets_s.front();

            HyperbandOptions hopts;
            hopts.initial_configs = tune_configs;
            hopts.brackets = tune_brackets;
            hopts.max_evaluations = tune_max_evals;
            hopts.seed = tune_args.seed;

            std::ofstream history_stream;
            if (!tune_args.out_dir.empty())
                history_stream.open(tune_args.out("history.ldjson"), std::ios::trunc);

            const auto& space = file_cfg.space;
            auto eval_fn = [&](const Assignment& a, double budget,
                               std::uint64_t eval_seed) -> EvalOutcome {
                const PolicyConfig cfg = to_policy_config(a);
                return evaluate_config(cfg, validation, budget, *oracle, eval_seed, eopts);
            };
            const auto result = run_hyperband(space, ladder, hopts, eval_fn);

            if (history_stream.is_open()) {
                for (const auto& h : result.history) {
                    json j;
                    j["config_id"] = h.config_id;
                    j["rung"] = h.rung;
                    j["budget_s"] = h.budget_s;
                    j["loss"] = h.loss;
                    j["solved_count"] = h.solved_count;
                    j["unsolved_count"] = h.unsolved_count;
                    j["sum_min_distance"] = h.sum_min_distance;
                    j["sum_mean_distance"] = h.sum_mean_distance;
                    history_stream << j.dump() << "\n";
                }
            }
            const auto& best = select_final(result.ranked);
            const json best_json = policy_config_to_json(to_policy_config(best.assignment));
            std::cout << best_json.dump(2) << "\n";
            if (!tune_args.out_dir.empty()) {
                std::ofstream best_stream(tune_args.out("best_config.json"), std::ios::trunc);
                best_stream << json{{"policy", best_json}}.dump(2) << "\n";
            }
            return 0;
        }

        if (*ds) {
            const FileConfig file_cfg = ds_args.load();
            DatasetConfig cfg = ds_args.config_path.empty() ? ds_cfg : file_cfg.dataset;
            if (ds_args.config_path.empty()) cfg = ds_cfg;
            if (!ds_filter_budget.empty())
                cfg.filter_budget_s = parse_duration(ds_filter_budget);
            cfg.seed = ds_args.seed;
            const auto oracle = make_oracle(ds_args.folder);
            const Dataset data = make_dataset(cfg, *oracle);
            if (ds_args.out_dir.empty())
                throw std::runtime_error("make-dataset needs --out");
            save_targets(ds_args.out("train.txt"), data.train);
            save_targets(ds_args.out("val.txt"), data.val);
            save_targets(ds_args.out("test.txt"), data.test);
            json j;
            j["train"] = data.train.size();
            j["val"] = data.val.size();
            j["test"] = data.test.size();
            std::cout << j.dump() << "\n";
            return 0;
        }

        if (*bm) {
            const FileConfig file_cfg = bm_args.load();
            const auto oracle = make_oracle(bm_args.folder);

            BenchmarkSpec spec;
            spec.name = bm_name;
            spec.timeout_s = parse_duration(bm_timeout);
            spec.evaluation_runs = bm_runs;
            spec.targets = load_targets(bm_targets_file);

            SolverSpec solver;
            solver.name = bm_solver;
            solver.policy = file_cfg.policy;
            solver.loop = file_cfg.loop;
            if (!bm_restart.empty()) solver.loop.restart_period_s = parse_duration(bm_restart);
            solver.loop.lis_enabled = !bm_no_lis;
            solver.loop.max_episodes = bm_max_episodes;

            std::optional<PolicyParams> checkpoint;
            if (bm_solver == "meta" || bm_solver == "meta-adapt") {
                if (bm_checkpoint.empty())
                    throw std::runtime_error("meta strategies need --checkpoint");
                checkpoint = PolicyParams::load(bm_checkpoint, file_cfg.policy);
                solver.checkpoint = &*checkpoint;
            }

            const EvalReport report = run_benchmark(spec, solver, *oracle, bm_args.seed);
            const std::string tables = report_tables(report);
            std::cout << tables;
            if (!bm_args.out_dir.empty()) {
                std::ofstream records_stream(bm_args.out("records.ldjson"), std::ios::trunc);
                write_records(records_stream, report);
                std::ofstream tables_stream(bm_args.out("tables.txt"), std::ios::trunc);
                tables_stream << tables;
            }
            return 0;
        }

        if (*rp) {
            std::ifstream in(rp_records);
            if (!in) throw std::runtime_error("cannot open records: " + rp_records);
            const EvalReport report = read_records(in);
            const std::string tables = report_tables(report);
            std::cout << tables;
            if (!rp_args.out_dir.empty()) {
                std::ofstream tables_stream(rp_args.out("tables.txt"), std::ios::trunc);
                tables_stream << tables;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
