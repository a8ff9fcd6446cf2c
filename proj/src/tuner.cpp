#include "rnadesign/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace rnadesign {

namespace {

constexpr std::uint64_t kStreamSampler = tune_stream::kSampler;
constexpr std::uint64_t kStreamEval = tune_stream::kEval;

std::string render_number(double v) {
    // integers render without a decimal point so conditions read naturally
    if (v == std::floor(v) && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    return std::to_string(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// SearchSpace
// ---------------------------------------------------------------------------

void SearchSpace::add(ParamDescriptor d) {
    if (d.name.empty()) throw InvalidConfig("search parameter needs a name");
    for (const auto& p : params_)
        if (p.name == d.name) throw InvalidConfig("duplicate search parameter: " + d.name);
    switch (d.type) {
        case ParamType::integer:
        case ParamType::real:
            if (!(d.lo <= d.hi)) throw InvalidConfig("empty range for " + d.name);
            if (d.type == ParamType::real && d.prior == Prior::log_uniform && !(d.lo > 0.0))
                throw InvalidConfig("log prior needs a positive lower bound: " + d.name);
            break;
        case ParamType::categorical:
            if (d.choices.empty()) throw InvalidConfig("no choices for " + d.name);
            break;
    }
    if (!d.condition_parent.empty()) {
        bool found = false;
        for (const auto& p : params_) found = found || p.name == d.condition_parent;
        if (!found)
            throw InvalidConfig("condition parent must be declared before " + d.name);
        if (d.condition_values.empty())
            throw InvalidConfig("conditional parameter needs activating values: " + d.name);
    }
    params_.push_back(std::move(d));
}

const ParamDescriptor& SearchSpace::descriptor(const std::string& name) const {
    for (const auto& p : params_)
        if (p.name == name) return p;
    throw InvalidConfig("unknown search parameter: " + name);
}

bool SearchSpace::is_active(const ParamDescriptor& d, const Assignment& a) const {
    if (d.condition_parent.empty()) return true;
    std::string value;
    if (auto it = a.cats.find(d.condition_parent); it != a.cats.end()) {
        value = it->second;
    } else if (auto nit = a.nums.find(d.condition_parent); nit != a.nums.end()) {
        value = render_number(nit->second);
    } else {
        return false;  // parent inactive -> child inactive
    }
    return std::find(d.condition_values.begin(), d.condition_values.end(), value) !=
           d.condition_values.end();
}

Assignment SearchSpace::sample_uniform(Rng& rng) const {
    Assignment a;
    for (const auto& d : params_) {
        if (!is_active(d, a)) continue;
        switch (d.type) {
            case ParamType::integer:
                a.nums[d.name] = static_cast<double>(
                    rng.uniform_int(static_cast<std::int64_t>(d.lo),
                                    static_cast<std::int64_t>(d.hi)));
                break;
            case ParamType::real:
                if (d.prior == Prior::log_uniform)
                    a.nums[d.name] = std::exp(rng.uniform(std::log(d.lo), std::log(d.hi)));
                else
                    a.nums[d.name] = rng.uniform(d.lo, d.hi);
                break;
            case ParamType::categorical:
                a.cats[d.name] = d.choices[rng.next_below(d.choices.size())];
                break;
        }
    }
    return a;
}

void SearchSpace::check(const Assignment& a) const {
    std::set<std::string> known;
    for (const auto& d : params_) {
        known.insert(d.name);
        const bool active = is_active(d, a);
        const bool present = a.has(d.name);
        if (active && !present)
            throw InvalidConfig("missing active parameter: " + d.name);
        if (!active && present)
            throw InvalidConfig("inactive parameter assigned: " + d.name);
        if (!active) continue;
        if (d.type == ParamType::categorical) {
            const auto& v = a.cats.at(d.name);
            if (std::find(d.choices.begin(), d.choices.end(), v) == d.choices.end())
                throw InvalidConfig("illegal choice for " + d.name + ": " + v);
        } else {
            const double v = a.nums.at(d.name);
            if (v < d.lo || v > d.hi)
                throw InvalidConfig("out-of-range value for " + d.name);
            if (d.type == ParamType::integer && v != std::floor(v))
                throw InvalidConfig("non-integer value for " + d.name);
        }
    }
    for (const auto& [k, _] : a.nums)
        if (!known.count(k)) throw InvalidConfig("unknown parameter assigned: " + k);
    for (const auto& [k, _] : a.cats)
        if (!known.count(k)) throw InvalidConfig("unknown parameter assigned: " + k);
}

SearchSpace SearchSpace::default_space() {
    auto integer = [](std::string name, double lo, double hi, std::string parent = "",
                      std::vector<std::string> when = {}) {
        ParamDescriptor d;
        d.name = std::move(name);
        d.type = ParamType::integer;
        d.lo = lo;
        d.hi = hi;
        d.condition_parent = std::move(parent);
        d.condition_values = std::move(when);
        return d;
    };
    auto real = [](std::string name, double lo, double hi, Prior prior) {
        ParamDescriptor d;
        d.name = std::move(name);
        d.type = ParamType::real;
        d.lo = lo;
        d.hi = hi;
        d.prior = prior;
        return d;
    };
    auto categorical = [](std::string name, std::vector<std::string> choices,
                          std::string parent = "", std::vector<std::string> when = {}) {
        ParamDescriptor d;
        d.name = std::move(name);
        d.type = ParamType::categorical;
        d.choices = std::move(choices);
        d.condition_parent = std::move(parent);
        d.condition_values = std::move(when);
        return d;
    };

    SearchSpace s;
    s.add(integer("state_radius", 0, 16));
    s.add(categorical("input_mode", {"binary", "embedding"}));
    s.add(integer("embedding_dim", 1, 8, "input_mode", {"embedding"}));
    s.add(integer("conv_count", 0, 2));
    s.add(integer("conv_filters", 1, 32, "conv_count", {"1", "2"}));
    s.add(categorical("conv_kernel", {"3", "5", "7", "9", "11"}, "conv_count", {"1", "2"}));
    s.add(integer("lstm_count", 0, 2));
    s.add(integer("lstm_units", 1, 64, "lstm_count", {"1", "2"}));
    s.add(integer("dense_count", 1, 2));
    s.add(integer("dense_units", 8, 64));
    s.add(real("learning_rate", 1e-5, 1e-2, Prior::log_uniform));
    s.add(integer("batch_size", 32, 256));
    s.add(real("entropy_coeff", 1e-5, 1e-1, Prior::log_uniform));
    // lower bound sits just above 1 so every sampled point validates
    s.add(real("reward_exponent", 1.0001, 12.0, Prior::linear));
    return s;
}

PolicyConfig to_policy_config(const Assignment& a) {
    PolicyConfig cfg;
    cfg.state_radius = static_cast<int>(a.nums.at("state_radius"));
    cfg.input_mode =
        a.cats.at("input_mode") == "embedding" ? InputMode::embedding : InputMode::binary;
    cfg.embedding_dim =
        cfg.input_mode == InputMode::embedding ? static_cast<int>(a.nums.at("embedding_dim")) : 1;
    cfg.conv_layers.clear();
    const int conv_count = static_cast<int>(a.nums.at("conv_count"));
    for (int i = 0; i < conv_count; ++i)
        cfg.conv_layers.push_back({static_cast<int>(a.nums.at("conv_filters")),
                                   std::stoi(a.cats.at("conv_kernel"))});
    cfg.recurrent_layers.clear();
    const int lstm_count = static_cast<int>(a.nums.at("lstm_count"));
    for (int i = 0; i < lstm_count; ++i)
        cfg.recurrent_layers.push_back(static_cast<int>(a.nums.at("lstm_units")));
    cfg.dense_layers.assign(static_cast<std::size_t>(a.nums.at("dense_count")),
                            static_cast<int>(a.nums.at("dense_units")));
    cfg.learning_rate = a.nums.at("learning_rate");
    cfg.batch_size = static_cast<int>(a.nums.at("batch_size"));
    cfg.entropy_coeff = a.nums.at("entropy_coeff");
    cfg.reward_exponent = a.nums.at("reward_exponent");
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Budgets and objectives
// ---------------------------------------------------------------------------

BudgetLadder BudgetLadder::geometric(double base_s, int rungs) {
    BudgetLadder l;
    double b = base_s;
    for (int i = 0; i < rungs; ++i) {
        l.rung_budgets_s.push_back(b);
        b *= 3.0;
    }
    return l;
}

void BudgetLadder::validate() const {
    if (rung_budgets_s.size() < 2)
        throw InvalidLadder("budget ladder needs at least two rungs");
    for (std::size_t i = 0; i < rung_budgets_s.size(); ++i) {
        if (!(rung_budgets_s[i] > 0.0)) throw InvalidLadder("budgets must be positive");
        if (i > 0) {
            const double ratio = rung_budgets_s[i] / rung_budgets_s[i - 1];
            if (std::abs(ratio - 3.0) > 1e-9)
                throw InvalidLadder("budget ladder must be geometric with factor 3");
        }
    }
}

std::string to_string(TuneObjective o) {
    switch (o) {
        case TuneObjective::unsolved_count: return "unsolved_count";
        case TuneObjective::sum_mean_distance: return "sum_mean_distance";
        case TuneObjective::sum_min_distance: return "sum_min_distance";
    }
    return "sum_min_distance";
}

TuneObjective objective_from_string(std::string_view name) {
    if (name == "unsolved_count") return TuneObjective::unsolved_count;
    if (name == "sum_mean_distance") return TuneObjective::sum_mean_distance;
    if (name == "sum_min_distance") return TuneObjective::sum_min_distance;
    throw InvalidConfig("unknown objective: " + std::string(name));
}

EvalOutcome evaluate_config(const PolicyConfig& cfg, std::span<const DotBracket> validation,
                            double budget_s, const FoldingOracle& oracle, std::uint64_t seed,
                            const EvaluateOptions& opts) {
    if (validation.empty()) throw InvalidConfig("validation set must be nonempty");
    cfg.validate();

    std::optional<PolicyParams> meta;
    if (opts.strategy != Strategy::learna) {
        if (opts.train_targets.empty())
            throw InvalidConfig("meta evaluation needs training targets");
        TrainLoopConfig train;
        train.strategy = Strategy::meta_learna;
        train.ppo = PpoConfig{};
        train.worker_count = 1;
        train.time_budget_s = budget_s;
        train.lis_enabled = opts.lis_enabled;
        train.lis_xi = opts.lis_xi;
        train.seed = derive_seed(seed, kStreamEval, 0);
        meta = run_meta_train(opts.train_targets, cfg, train, oracle).params;
    }

    EvalOutcome out;
    for (std::size_t i = 0; i < validation.size(); ++i) {
        const DotBracket& target = validation[i];
        TrainLoopConfig loop;
        loop.strategy = opts.strategy;
        loop.restart_period_s = opts.restart_period_s;
        loop.worker_count = 1;
        loop.time_budget_s = opts.strategy == Strategy::learna ? budget_s : opts.apply_timeout_s;
        loop.lis_enabled = opts.lis_enabled;
        loop.lis_xi = opts.lis_xi;
        loop.seed = derive_seed(seed, kStreamEval, i + 1);

        DesignResult r;
        if (opts.strategy == Strategy::learna) {
            r = run_learna(target, cfg, loop, oracle);
        } else {
            r = run_meta_apply(*meta, target, loop, oracle,
                               opts.strategy == Strategy::meta_learna_adapt);
        }
        const double len = static_cast<double>(target.length());
        const double min_norm =
            r.episodes == 0 ? 1.0 : static_cast<double>(r.best_distance) / len;
        const double mean_norm =
            r.episodes == 0
                ? 1.0
                : static_cast<double>(r.distance_sum) / static_cast<double>(r.episodes) / len;
        out.sum_min_distance += min_norm;
        out.sum_mean_distance += mean_norm;
        if (r.solved) ++out.solved_count;
        else ++out.unsolved_count;
    }
    switch (opts.objective) {
        case TuneObjective::unsolved_count:
            out.loss = static_cast<double>(out.unsolved_count);
            break;
        case TuneObjective::sum_mean_distance: out.loss = out.sum_mean_distance; break;
        case TuneObjective::sum_min_distance: out.loss = out.sum_min_distance; break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// KdeSampler
// ---------------------------------------------------------------------------

KdeSampler::KdeSampler(const SearchSpace& space, std::uint64_t seed, double uniform_fraction)
    : space_(space), rng_(derive_seed(seed, kStreamSampler)),
      uniform_fraction_(uniform_fraction) {}

void KdeSampler::observe(int rung, const Assignment& a, double loss) {
    by_rung_[rung].push_back({a, loss});
}

const std::vector<KdeSampler::Obs>* KdeSampler::model_rung() const {
    const std::size_t need = space_.dimension() + 2;
    for (auto it = by_rung_.rbegin(); it != by_rung_.rend(); ++it)
        if (it->second.size() >= need) return &it->second;
    return nullptr;
}

bool KdeSampler::model_active() const { return model_rung() != nullptr; }

Assignment KdeSampler::propose() {
    const auto* obs = model_rung();
    if (obs == nullptr || rng_.next_double() < uniform_fraction_)
        return space_.sample_uniform(rng_);
    Assignment a = sample_model(*obs);
    space_.check(a);  // the model must never propose an illegal point
    return a;
}

Assignment KdeSampler::sample_model(const std::vector<Obs>& all) {
    // fit on the best third of the observations
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return all[x].loss < all[y].loss; });
    const std::size_t keep = std::max<std::size_t>(1, (all.size() + 2) / 3);
    order.resize(keep);

    Assignment a;
    for (const auto& d : space_.params()) {
        if (!space_.is_active(d, a)) continue;
        if (d.type == ParamType::categorical) {
            // Laplace-smoothed empirical frequencies over the best points
            std::vector<double> weights(d.choices.size(), 1.0);
            for (std::size_t oi : order) {
                auto it = all[oi].a.cats.find(d.name);
                if (it == all[oi].a.cats.end()) continue;
                const auto pos = std::find(d.choices.begin(), d.choices.end(), it->second);
                if (pos != d.choices.end())
                    weights[static_cast<std::size_t>(pos - d.choices.begin())] += 1.0;
            }
            a.cats[d.name] = d.choices[rng_.categorical(weights)];
            continue;
        }

        const bool log_space = d.type == ParamType::real && d.prior == Prior::log_uniform;
        auto fwd = [&](double v) { return log_space ? std::log(v) : v; };
        auto bwd = [&](double v) { return log_space ? std::exp(v) : v; };

        std::vector<double> centers;
        for (std::size_t oi : order) {
            auto it = all[oi].a.nums.find(d.name);
            if (it != all[oi].a.nums.end()) centers.push_back(fwd(it->second));
        }
        const double lo = fwd(d.lo), hi = fwd(d.hi);
        double value;
        if (centers.empty()) {
            value = rng_.uniform(lo, hi);
        } else {
            const double mean =
                std::accumulate(centers.begin(), centers.end(), 0.0) /
                static_cast<double>(centers.size());
            double var = 0.0;
            for (double c : centers) var += (c - mean) * (c - mean);
            var /= static_cast<double>(centers.size());
            // Silverman bandwidth with a floor so the kernel never collapses
            double bw = 1.06 * std::sqrt(var) *
                        std::pow(static_cast<double>(centers.size()), -0.2);
            bw = std::max(bw, 0.05 * (hi - lo));
            const double center = centers[rng_.next_below(centers.size())];
            value = center + bw * rng_.next_normal();
        }
        value = std::clamp(value, lo, hi);
        double final_v = bwd(value);
        if (d.type == ParamType::integer)
            final_v = std::clamp(std::round(final_v), d.lo, d.hi);
        else
            final_v = std::clamp(final_v, d.lo, d.hi);
        a.nums[d.name] = final_v;
    }
    return a;
}

// ---------------------------------------------------------------------------
// run_hyperband / select_final
// ---------------------------------------------------------------------------

HyperbandResult run_hyperband(const SearchSpace& space, const BudgetLadder& ladder,
                              const HyperbandOptions& opts, const TuneEvalFn& eval) {
    ladder.validate();
    if (opts.eta < 2) throw InvalidConfig("eta must be >= 2");
    if (opts.initial_configs < 1) throw InvalidConfig("need at least one config per bracket");

    KdeSampler sampler(space, opts.seed, opts.uniform_fraction);
    HyperbandResult result;
    std::size_t next_id = 0;
    std::size_t evaluations = 0;
    std::map<std::size_t, RankedConfig> by_id;

    bool out_of_budget = false;
    for (std::size_t bracket = 0; bracket < opts.brackets && !out_of_budget; ++bracket) {
        struct Entry {
            std::size_t id;
            Assignment a;
            double loss = 0.0;
            EvalOutcome outcome;
        };
        std::vector<Entry> current;
        for (std::size_t i = 0; i < opts.initial_configs; ++i) {
            Entry e;
            e.id = next_id++;
            e.a = sampler.propose();
            current.push_back(std::move(e));
        }

        const int rungs = static_cast<int>(ladder.rung_budgets_s.size());
        for (int k = 0; k < rungs; ++k) {
            // floor(n / eta^k) survivors evaluated at rung k
            std::size_t quota = opts.initial_configs;
            for (int j = 0; j < k; ++j) quota /= static_cast<std::size_t>(opts.eta);
            if (quota == 0) break;
            if (current.size() > quota) current.resize(quota);

            for (auto& e : current) {
                if (opts.max_evaluations > 0 && evaluations >= opts.max_evaluations) {
                    out_of_budget = true;
                    break;
                }
                const double budget = ladder.rung_budgets_s[static_cast<std::size_t>(k)];
                e.outcome = eval(e.a, budget, derive_seed(opts.seed, kStreamEval, evaluations));
                e.loss = e.outcome.loss;
                ++evaluations;
                sampler.observe(k, e.a, e.loss);

                TuneObservation rec;
                rec.config_id = e.id;
                rec.rung = k;
                rec.budget_s = budget;
                rec.loss = e.loss;
                rec.solved_count = e.outcome.solved_count;
                rec.unsolved_count = e.outcome.unsolved_count;
                rec.sum_min_distance = e.outcome.sum_min_distance;
                rec.sum_mean_distance = e.outcome.sum_mean_distance;
                result.history.push_back(rec);

                auto& rc = by_id[e.id];
                rc.config_id = e.id;
                rc.assignment = e.a;
                rc.deepest_rung = k;
                rc.loss = e.loss;
                rc.outcome = e.outcome;
            }
            if (out_of_budget) break;
            std::stable_sort(current.begin(), current.end(),
                             [](const Entry& x, const Entry& y) { return x.loss < y.loss; });
        }
    }

    for (auto& [_, rc] : by_id) result.ranked.push_back(std::move(rc));
    std::stable_sort(result.ranked.begin(), result.ranked.end(),
                     [](const RankedConfig& x, const RankedConfig& y) {
                         if (x.deepest_rung != y.deepest_rung)
                             return x.deepest_rung > y.deepest_rung;
                         if (x.loss != y.loss) return x.loss < y.loss;
                         return x.config_id < y.config_id;
                     });
    return result;
}

const RankedConfig& select_final(std::span<const RankedConfig> ranked) {
    if (ranked.empty()) throw InvalidConfig("select_final needs at least one config");
    const std::size_t top = std::min<std::size_t>(5, ranked.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < top; ++i) {
        const auto& a = ranked[i].outcome;
        const auto& b = ranked[best].outcome;
        const bool wins = a.unsolved_count != b.unsolved_count
                              ? a.unsolved_count < b.unsolved_count
                              : (a.sum_min_distance != b.sum_min_distance
                                     ? a.sum_min_distance < b.sum_min_distance
                                     : false);  // final tie: keep the better rank
        if (wins) best = i;
    }
    return ranked[best];
}

}  // namespace rnadesign
