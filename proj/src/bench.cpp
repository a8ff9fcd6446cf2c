#include "rnadesign/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rnadesign {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::uint64_t kStreamGenerate = bench_stream::kGenerate;
constexpr std::uint64_t kStreamFilter = bench_stream::kFilter;

// Watson-Crick pair choices used when sampling paired sites.
constexpr std::array<std::pair<Nucleotide, Nucleotide>, 4> kPairChoices{{
    {Nucleotide::G, Nucleotide::C},
    {Nucleotide::C, Nucleotide::G},
    {Nucleotide::A, Nucleotide::U},
    {Nucleotide::U, Nucleotide::A},
}};

std::vector<Nucleotide> random_compatible(const DotBracket& target, Rng& rng) {
    std::vector<Nucleotide> nts(target.length(), Nucleotide::A);
    for (std::size_t i = 0; i < target.length(); ++i) {
        const int partner = target.partner(i);
        if (partner < 0) {
            nts[i] = nucleotide_from_index(static_cast<int>(rng.next_below(4)));
        } else if (static_cast<std::size_t>(partner) > i) {
            const auto& [a, b] = kPairChoices[rng.next_below(4)];
            nts[i] = a;
            nts[static_cast<std::size_t>(partner)] = b;
        }
    }
    return nts;
}

}  // namespace

// ---------------------------------------------------------------------------
// Specs and presets
// ---------------------------------------------------------------------------

void BenchmarkSpec::validate() const {
    if (!(timeout_s > 0.0)) throw InvalidConfig("benchmark timeout must be > 0");
    if (evaluation_runs < 1) throw InvalidConfig("evaluation_runs must be >= 1");
    if (targets.empty()) throw InvalidConfig("benchmark needs targets");
}

BenchmarkSpec benchmark_preset(std::string_view name) {
    BenchmarkSpec s;
    s.name = std::string(name);
    if (name == "eterna100") {
        s.timeout_s = 24.0 * 3600.0;
        s.evaluation_runs = 5;
    } else if (name == "rfam-taneda") {
        s.timeout_s = 600.0;
        s.evaluation_runs = 50;
    } else if (name == "rfam-learn-test") {
        s.timeout_s = 3600.0;
        s.evaluation_runs = 5;
    } else if (name == "desk") {
        s.timeout_s = 60.0;
        s.evaluation_runs = 3;
    } else if (name == "desk-small") {
        s.timeout_s = 10.0;
        s.evaluation_runs = 2;
    } else {
        throw UnknownSolver("unknown benchmark preset: " + std::string(name));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Aggregates and rendering
// ---------------------------------------------------------------------------

std::vector<std::size_t> solved_in_at_least(const EvalReport& report) {
    std::map<std::size_t, std::size_t> solved_runs;
    for (const auto& r : report.records)
        if (r.solved) ++solved_runs[r.target_index];
    std::vector<std::size_t> counts(static_cast<std::size_t>(
                                        std::max(report.evaluation_runs, 1)),
                                    0);
    for (const auto& [_, n] : solved_runs)
        for (std::size_t k = 1; k <= counts.size(); ++k)
            if (n >= k) ++counts[k - 1];
    return counts;
}

std::vector<std::size_t> solved_by_time(const EvalReport& report,
                                        std::span<const double> times) {
    std::vector<std::size_t> counts(times.size(), 0);
    for (std::size_t i = 0; i < times.size(); ++i)
        for (const auto& r : report.records)
            if (r.solved && r.solve_time_s >= 0.0 && r.solve_time_s <= times[i]) ++counts[i];
    return counts;
}

std::string report_tables(const EvalReport& report) {
    std::ostringstream out;
    out << "benchmark " << report.benchmark << " | solver " << report.solver << " | "
        << report.target_count << " targets x " << report.evaluation_runs
        << " runs | timeout " << report.timeout_s << " s\n\n";

    struct Row {
        std::size_t len = 0;
        int runs = 0, solved = 0;
        std::size_t best = std::numeric_limits<std::size_t>::max();
        double min_time = -1.0;
    };
    std::map<std::size_t, Row> rows;
    for (const auto& r : report.records) {
        Row& row = rows[r.target_index];
        row.len = r.target.size();
        ++row.runs;
        if (r.solved) {
            ++row.solved;
            if (row.min_time < 0.0 || r.solve_time_s < row.min_time)
                row.min_time = r.solve_time_s;
        }
        row.best = std::min(row.best, r.best_distance);
    }
    out << "per-target results\n";
    out << std::left << std::setw(8) << "target" << std::setw(7) << "len" << std::setw(10)
        << "solved" << std::setw(11) << "best_dist" << "min_time_s\n";
    for (const auto& [idx, row] : rows) {
        out << std::left << std::setw(8) << idx << std::setw(7) << row.len;
        std::ostringstream frac;
        frac << row.solved << "/" << row.runs;
        out << std::setw(10) << frac.str() << std::setw(11) << row.best;
        if (row.min_time >= 0.0)
            out << std::fixed << std::setprecision(2) << row.min_time
                << std::defaultfloat << std::setprecision(6);
        else
            out << "-";
        out << "\n";
    }

    const auto at_least = solved_in_at_least(report);
    out << "\ntargets solved in at least k runs\n";
    out << std::left << std::setw(4) << "k" << std::setw(8) << "count" << "fraction\n";
    for (std::size_t k = 1; k <= at_least.size(); ++k) {
        out << std::left << std::setw(4) << k << std::setw(8) << at_least[k - 1] << std::fixed
            << std::setprecision(3)
            << (report.target_count
                    ? static_cast<double>(at_least[k - 1]) /
                          static_cast<double>(report.target_count)
                    : 0.0)
            << std::defaultfloat << std::setprecision(6) << "\n";
    }

    std::vector<double> grid;
    for (double f : {0.01, 0.03, 0.1, 0.3, 1.0}) grid.push_back(f * report.timeout_s);
    const auto by_time = solved_by_time(report, grid);
    out << "\nsolved (target, run) cells by time\n";
    out << std::left << std::setw(12) << "time_s" << "solved_cells\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << std::left << std::setw(12) << std::fixed << std::setprecision(2) << grid[i]
            << std::defaultfloat << std::setprecision(6) << by_time[i] << "\n";
    }
    return out.str();
}

void write_records(std::ostream& out, const EvalReport& report) {
    json meta;
    meta["kind"] = "meta";
    meta["benchmark"] = report.benchmark;
    meta["solver"] = report.solver;
    meta["timeout_s"] = report.timeout_s;
    meta["evaluation_runs"] = report.evaluation_runs;
    meta["target_count"] = report.target_count;
    out << meta.dump() << "\n";
    for (const auto& r : report.records) {
        json j;
        j["kind"] = "cell";
        j["benchmark"] = r.benchmark;
        j["solver"] = r.solver;
        j["target_index"] = r.target_index;
        j["target"] = r.target;
        j["run"] = r.run;
        j["seed"] = r.seed;
        j["solved"] = r.solved;
        j["solve_time_s"] = r.solve_time_s;
        j["best_distance"] = r.best_distance;
        j["best_sequence"] = r.best_sequence;
        j["episodes"] = r.episodes;
        j["restarts"] = r.restarts;
        j["elapsed_s"] = r.elapsed_s;
        out << j.dump() << "\n";
    }
}

EvalReport read_records(std::istream& in) {
    EvalReport report;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        const std::string kind = j.value("kind", "cell");
        if (kind == "meta") {
            report.benchmark = j.value("benchmark", "");
            report.solver = j.value("solver", "");
            report.timeout_s = j.value("timeout_s", 0.0);
            report.evaluation_runs = j.value("evaluation_runs", 0);
            report.target_count = j.value("target_count", std::size_t{0});
            continue;
        }
        RunRecord r;
        r.benchmark = j.value("benchmark", "");
        r.solver = j.value("solver", "");
        r.target_index = j.value("target_index", std::size_t{0});
        r.target = j.value("target", "");
        r.run = j.value("run", 0);
        r.seed = j.value("seed", std::uint64_t{0});
        r.solved = j.value("solved", false);
        r.solve_time_s = j.value("solve_time_s", -1.0);
        r.best_distance = j.value("best_distance", std::size_t{0});
        r.best_sequence = j.value("best_sequence", "");
        r.episodes = j.value("episodes", std::uint64_t{0});
        r.restarts = j.value("restarts", std::uint64_t{0});
        r.elapsed_s = j.value("elapsed_s", 0.0);
        report.records.push_back(std::move(r));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Dataset generation
// ---------------------------------------------------------------------------

void DatasetConfig::validate() const {
    if (min_length == 0 || min_length > max_length)
        throw InvalidConfig("dataset length range is empty");
}

Dataset make_dataset(const DatasetConfig& cfg, const FoldingOracle& oracle) {
    cfg.validate();
    const std::size_t need = cfg.count_train + cfg.count_val + cfg.count_test;
    Dataset out;
    if (need == 0) return out;

    const std::size_t cap =
        cfg.max_attempts > 0 ? cfg.max_attempts : 1000 + 200 * need;

    Rng gen_rng(derive_seed(cfg.seed, kStreamGenerate));
    std::vector<std::string> order;                  // first-seen structures
    std::map<std::string, std::size_t> seen_count;   // collision tracking
    std::map<std::string, bool> filter_pass;         // hill-climb filter cache
    std::size_t attempts = 0;
    std::uint64_t filter_idx = 0;

    auto survivors = [&] {
        std::vector<DotBracket> v;
        for (const auto& text : order) {
            if (seen_count[text] != 1) continue;  // multiple known solutions
            auto it = filter_pass.find(text);
            if (it == filter_pass.end()) {
                bool pass = true;
                if (cfg.filter_budget_s > 0.0) {
                    const DotBracket target = DotBracket::parse(text);
                    const auto hc =
                        baseline_hillclimb(target, oracle, cfg.filter_budget_s,
                                           derive_seed(cfg.seed, kStreamFilter, filter_idx++));
                    pass = !hc.solved;  // keep only structures hill climbing cannot crack
                }
                it = filter_pass.emplace(text, pass).first;
            }
            if (it->second) v.push_back(DotBracket::parse(text));
            if (v.size() == need) break;
        }
        return v;
    };

    std::vector<DotBracket> keep;
    while (true) {
        keep = survivors();
        if (keep.size() >= need) break;
        if (attempts >= cap)
            throw InsufficientYield("dataset generation exhausted " + std::to_string(cap) +
                                    " attempts with " + std::to_string(keep.size()) + "/" +
                                    std::to_string(need) + " structures");
        const std::size_t wave = std::min<std::size_t>(cap - attempts,
                                                       std::max<std::size_t>(2 * need, 64));
        for (std::size_t w = 0; w < wave; ++w) {
            ++attempts;
            const std::size_t len = static_cast<std::size_t>(
                gen_rng.uniform_int(static_cast<std::int64_t>(cfg.min_length),
                                    static_cast<std::int64_t>(cfg.max_length)));
            std::vector<Nucleotide> nts(len);
            for (auto& n : nts)
                n = nucleotide_from_index(static_cast<int>(gen_rng.next_below(4)));
            const DotBracket folded = oracle.fold(Sequence(std::move(nts)));
            auto [it, fresh] = seen_count.emplace(folded.str(), 0);
            if (fresh) order.push_back(folded.str());
            ++it->second;
        }
    }

    out.train.assign(keep.begin(), keep.begin() + static_cast<std::ptrdiff_t>(cfg.count_train));
    out.val.assign(keep.begin() + static_cast<std::ptrdiff_t>(cfg.count_train),
                   keep.begin() + static_cast<std::ptrdiff_t>(cfg.count_train + cfg.count_val));
    out.test.assign(keep.begin() + static_cast<std::ptrdiff_t>(cfg.count_train + cfg.count_val),
                    keep.begin() + static_cast<std::ptrdiff_t>(need));
    return out;
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

DesignResult baseline_random(const DotBracket& target, const FoldingOracle& oracle,
                             double timeout_s, std::uint64_t seed, std::uint64_t max_samples) {
    Rng rng(seed);
    DesignResult res;
    res.target = target.str();
    const auto t0 = Clock::now();
    while (true) {
        if (max_samples > 0 && res.episodes >= max_samples) break;
        if (seconds_since(t0) >= timeout_s) break;
        Sequence candidate(random_compatible(target, rng));
        const DotBracket folded = oracle.fold(candidate);
        const std::size_t dist = hamming(folded, target);
        ++res.episodes;
        res.distance_sum += dist;
        if (dist < res.best_distance) {
            res.best_distance = dist;
            res.best_sequence = candidate.str();
            res.time_to_best_s = seconds_since(t0);
        }
        if (dist == 0) {
            res.solved = true;
            res.time_to_solve_s = seconds_since(t0);
            break;
        }
    }
    res.elapsed_s = seconds_since(t0);
    return res;
}

DesignResult baseline_hillclimb(const DotBracket& target, const FoldingOracle& oracle,
                                double timeout_s, std::uint64_t seed, std::uint64_t max_steps) {
    Rng rng(seed);
    DesignResult res;
    res.target = target.str();
    const auto t0 = Clock::now();

    // mutable positions: unpaired sites, plus one slot per pair (its opening)
    std::vector<std::size_t> sites;
    for (std::size_t i = 0; i < target.length(); ++i) {
        const int partner = target.partner(i);
        if (partner < 0 || static_cast<std::size_t>(partner) > i) sites.push_back(i);
    }
    const std::uint64_t patience = 50 * static_cast<std::uint64_t>(target.length());

    auto evaluate = [&](const std::vector<Nucleotide>& nts) {
        const Sequence seq(nts);
        const std::size_t dist = hamming(oracle.fold(seq), target);
        ++res.episodes;
        res.distance_sum += dist;
        if (dist < res.best_distance) {
            res.best_distance = dist;
            res.best_sequence = seq.str();
            res.time_to_best_s = seconds_since(t0);
        }
        return dist;
    };

    std::vector<Nucleotide> current = random_compatible(target, rng);
    std::size_t cur_dist = evaluate(current);
    std::uint64_t since_improvement = 0;

    while (cur_dist != 0) {
        if (max_steps > 0 && res.episodes >= max_steps) break;
        if (seconds_since(t0) >= timeout_s) break;

        if (since_improvement >= patience) {
            RestartEvent ev;
            ev.time_s = seconds_since(t0);
            ev.episode = res.episodes;
            ev.seed = 0;
            res.restarts.push_back(ev);
            current = random_compatible(target, rng);
            cur_dist = evaluate(current);
            since_improvement = 0;
            continue;
        }

        std::vector<Nucleotide> next = current;
        const std::size_t site = sites[rng.next_below(sites.size())];
        const int partner = target.partner(site);
        if (partner < 0) {
            // replace with one of the other three nucleotides
            const int cur = index_of(next[site]);
            const int pick = static_cast<int>(rng.next_below(3));
            next[site] = nucleotide_from_index((cur + 1 + pick) % 4);
        } else {
            std::size_t cur_pair = 0;
            for (std::size_t p = 0; p < kPairChoices.size(); ++p)
                if (kPairChoices[p].first == next[site] &&
                    kPairChoices[p].second == next[static_cast<std::size_t>(partner)])
                    cur_pair = p;
            const std::size_t pick = (cur_pair + 1 + rng.next_below(3)) % 4;
            next[site] = kPairChoices[pick].first;
            next[static_cast<std::size_t>(partner)] = kPairChoices[pick].second;
        }
        const std::size_t next_dist = evaluate(next);
        if (next_dist <= cur_dist) {
            if (next_dist < cur_dist) since_improvement = 0;
            else ++since_improvement;
            current = std::move(next);
            cur_dist = next_dist;
        } else {
            ++since_improvement;
        }
    }
    if (cur_dist == 0) {
        res.solved = true;
        res.time_to_solve_s = res.time_to_best_s;
    }
    res.elapsed_s = seconds_since(t0);
    return res;
}

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

EvalReport run_benchmark(const BenchmarkSpec& spec, const SolverSpec& solver,
                         const FoldingOracle& oracle, std::uint64_t seed) {
    spec.validate();
    const bool is_meta = solver.name == "meta" || solver.name == "meta-adapt";
    if (solver.name != "learna" && solver.name != "random" && solver.name != "hillclimb" &&
        !is_meta)
        throw UnknownSolver("unknown solver: " + solver.name);
    if (is_meta && solver.checkpoint == nullptr)
        throw InvalidConfig("meta solvers need a checkpoint");

    EvalReport report;
    report.benchmark = spec.name;
    report.solver = solver.name;
    report.timeout_s = spec.timeout_s;
    report.evaluation_runs = spec.evaluation_runs;
    report.target_count = spec.targets.size();

    for (std::size_t ti = 0; ti < spec.targets.size(); ++ti) {
        const DotBracket& target = spec.targets[ti];
        for (int run = 0; run < spec.evaluation_runs; ++run) {
            const std::uint64_t cell_seed =
                derive_seed(seed, static_cast<std::uint64_t>(ti),
                            static_cast<std::uint64_t>(run));
            TrainLoopConfig loop = solver.loop;
            loop.seed = cell_seed;
            loop.time_budget_s = spec.timeout_s;

            DesignResult dr;
            if (solver.name == "learna") {
                loop.strategy = Strategy::learna;
                dr = run_learna(target, solver.policy, loop, oracle);
            } else if (solver.name == "meta") {
                loop.strategy = Strategy::meta_learna;
                dr = run_meta_apply(*solver.checkpoint, target, loop, oracle, false);
            } else if (solver.name == "meta-adapt") {
                loop.strategy = Strategy::meta_learna_adapt;
                dr = run_meta_apply(*solver.checkpoint, target, loop, oracle, true);
            } else if (solver.name == "random") {
                dr = baseline_random(target, oracle, spec.timeout_s, cell_seed,
                                     solver.loop.max_episodes);
            } else {
                dr = baseline_hillclimb(target, oracle, spec.timeout_s, cell_seed,
                                        solver.loop.max_episodes);
            }

            RunRecord rec;
            rec.benchmark = spec.name;
            rec.solver = solver.name;
            rec.target_index = ti;
            rec.target = target.str();
            rec.run = run;
            rec.seed = cell_seed;
            rec.solved = dr.solved;
            rec.solve_time_s = dr.time_to_solve_s;
            rec.best_distance =
                dr.episodes == 0 ? target.length() : dr.best_distance;
            rec.best_sequence = dr.best_sequence;
            rec.episodes = dr.episodes;
            rec.restarts = dr.restarts.size();
            rec.elapsed_s = dr.elapsed_s;
            report.records.push_back(std::move(rec));
        }
    }
    return report;
}

}  // namespace rnadesign
