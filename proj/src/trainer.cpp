#include "rnadesign/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>

namespace rnadesign {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Seed-derivation streams; every consumer of randomness gets its own stream
// so adding one does not shift another.
constexpr std::uint64_t kStreamParams = seed_stream::kParams;
constexpr std::uint64_t kStreamActions = seed_stream::kActions;
constexpr std::uint64_t kStreamTargets = seed_stream::kTargets;
constexpr std::uint64_t kStreamWorker = seed_stream::kWorker;

constexpr double kMinProb = 1e-300;

int sample_categorical4(const std::array<double, 4>& probs, Rng& rng) {
    const double u = rng.next_double();
    double acc = 0.0;
    for (int a = 0; a < 3; ++a) {
        acc += probs[static_cast<std::size_t>(a)];
        if (u < acc) return a;
    }
    return 3;
}

}  // namespace

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

Adam::Adam(std::size_t dim, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(dim, 0.0),
      v_(dim, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw ShapeMismatch("optimizer dimension does not match the parameter vector");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

void Adam::reset() {
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(v_.begin(), v_.end(), 0.0);
    t_ = 0;
}

// ---------------------------------------------------------------------------
// Config validation
// ---------------------------------------------------------------------------

void PpoConfig::validate() const {
    if (clip_epsilon < 0.0) throw InvalidConfig("clip_epsilon must be >= 0");
    if (epochs_per_batch < 1) throw InvalidConfig("epochs_per_batch must be >= 1");
    if (value_coeff < 0.0) throw InvalidConfig("value_coeff must be >= 0");
}

void TrainLoopConfig::validate() const {
    ppo.validate();
    if (worker_count < 1) throw InvalidConfig("worker_count must be >= 1");
    if (strategy == Strategy::learna && worker_count != 1)
        throw InvalidConfig("strategy learna requires worker_count = 1");
    if (!(time_budget_s > 0.0)) throw InvalidConfig("time_budget must be > 0");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::learna: return "learna";
        case Strategy::meta_learna: return "meta_learna";
        case Strategy::meta_learna_adapt: return "meta_learna_adapt";
    }
    return "learna";
}

Strategy strategy_from_string(std::string_view name) {
    if (name == "learna") return Strategy::learna;
    if (name == "meta_learna" || name == "meta") return Strategy::meta_learna;
    if (name == "meta_learna_adapt" || name == "meta-adapt") return Strategy::meta_learna_adapt;
    throw InvalidConfig("unknown strategy name: " + std::string(name));
}

// ---------------------------------------------------------------------------
// PPO
// ---------------------------------------------------------------------------

PpoBatch make_ppo_batch(const PolicyEvaluator& eval, std::span<const double> params,
                        std::span<const Episode> episodes) {
    PpoBatch b;
    std::size_t n = 0;
    for (const auto& ep : episodes) n += ep.steps.size();
    b.states.reserve(n);
    b.actions.reserve(n);
    b.old_log_probs.reserve(n);
    b.returns.reserve(n);
    b.advantages.reserve(n);
    PolicyEvaluator::Cache cache;
    for (const auto& ep : episodes) {
        for (const auto& st : ep.steps) {
            const auto out = eval.forward(params, st.state, cache);
            b.states.push_back(st.state);
            b.actions.push_back(st.action);
            b.old_log_probs.push_back(st.log_prob);
            b.returns.push_back(ep.terminal_reward);
            b.advantages.push_back(ep.terminal_reward - out.value);
        }
    }
    return b;
}

double ppo_loss(const PolicyEvaluator& eval, std::span<const double> params, const PpoBatch& batch,
                const PpoConfig& cfg, double entropy_coeff) {
    if (batch.size() == 0) throw InvalidConfig("PPO batch must be nonempty");
    double loss = 0.0;
    PolicyEvaluator::Cache cache;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto out = eval.forward(params, batch.states[i], cache);
        const auto probs = softmax(out.logits);
        const int a = batch.actions[i];
        const double logp = std::log(std::max(probs[static_cast<std::size_t>(a)], kMinProb));
        const double r = std::exp(logp - batch.old_log_probs[i]);
        const double adv = batch.advantages[i];
        const double unclipped = r * adv;
        const double clipped =
            std::clamp(r, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * adv;
        const double surrogate = std::min(unclipped, clipped);
        double entropy = 0.0;
        for (double p : probs)
            if (p > 0.0) entropy -= p * std::log(p);
        const double verr = out.value - batch.returns[i];
        loss += -surrogate - entropy_coeff * entropy + cfg.value_coeff * verr * verr;
    }
    return loss / static_cast<double>(batch.size());
}

PpoStats ppo_loss_grad(const PolicyEvaluator& eval, std::span<const double> params,
                       const PpoBatch& batch, const PpoConfig& cfg, double entropy_coeff,
                       std::span<double> grad) {
    if (batch.size() == 0) throw InvalidConfig("PPO batch must be nonempty");
    std::fill(grad.begin(), grad.end(), 0.0);
    PpoStats stats;
    stats.step_count = batch.size();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    PolicyEvaluator::Cache cache;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto out = eval.forward(params, batch.states[i], cache);
        const auto probs = softmax(out.logits);
        const int a = batch.actions[i];
        const double pa = std::max(probs[static_cast<std::size_t>(a)], kMinProb);
        const double logp = std::log(pa);
        const double r = std::exp(logp - batch.old_log_probs[i]);
        const double adv = batch.advantages[i];
        const double unclipped = r * adv;
        const double clipped =
            std::clamp(r, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * adv;
        const double surrogate = std::min(unclipped, clipped);

        double entropy = 0.0;
        for (double p : probs)
            if (p > 0.0) entropy -= p * std::log(p);
        const double verr = out.value - batch.returns[i];

        stats.policy_loss += -surrogate;
        stats.entropy += entropy;
        stats.value_loss += verr * verr;
        stats.mean_ratio += r;

        std::array<double, 4> dlogits{};
        // Surrogate gradient flows only when the unclipped branch is active
        // (ties included, so epsilon = 0 with r = 1 still learns).
        if (unclipped <= clipped) {
            const double scale = adv * r * inv_n;  // d(-surr)/dlogits = -scale*(onehot - p)
            for (int k = 0; k < 4; ++k) {
                const double onehot = k == a ? 1.0 : 0.0;
                dlogits[static_cast<std::size_t>(k)] -=
                    scale * (onehot - probs[static_cast<std::size_t>(k)]);
            }
        }
        if (entropy_coeff != 0.0) {
            for (int k = 0; k < 4; ++k) {
                const double p = probs[static_cast<std::size_t>(k)];
                if (p > 0.0)
                    dlogits[static_cast<std::size_t>(k)] +=
                        entropy_coeff * p * (std::log(p) + entropy) * inv_n;
            }
        }
        const double dvalue = 2.0 * cfg.value_coeff * verr * inv_n;
        eval.backward(params, batch.states[i], cache, dlogits, dvalue, grad);
    }
    stats.policy_loss *= inv_n;
    stats.entropy *= inv_n;
    stats.value_loss *= inv_n;
    stats.mean_ratio *= inv_n;
    stats.total_loss =
        stats.policy_loss - entropy_coeff * stats.entropy + cfg.value_coeff * stats.value_loss;
    return stats;
}

PpoStats ppo_update(const PolicyEvaluator& eval, std::span<double> params,
                    std::span<const Episode> episodes, const PpoConfig& cfg, double entropy_coeff,
                    Adam& opt) {
    cfg.validate();
    if (episodes.empty()) throw InvalidConfig("PPO batch must be nonempty");
    const PpoBatch batch = make_ppo_batch(eval, params, episodes);
    std::vector<double> grad(params.size(), 0.0);
    PpoStats stats;
    for (int e = 0; e < cfg.epochs_per_batch; ++e) {
        stats = ppo_loss_grad(eval, params, batch, cfg, entropy_coeff, grad);
        opt.step(params, grad);
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Episode rollout
// ---------------------------------------------------------------------------

namespace {

struct Rollout {
    Episode episode;
    TerminalOutcome outcome;
};

// Runs one full episode. eval == nullptr means the uniform-random policy.
Rollout roll_episode(DesignEnv& env, const PolicyEvaluator* eval, std::span<const double> params,
                     Rng& rng, PolicyEvaluator::Cache& cache, std::size_t target_id) {
    const auto t0 = Clock::now();
    Rollout r;
    r.episode.target_id = target_id;
    r.episode.steps.reserve(env.horizon());
    StateWindow state = env.reset();
    while (true) {
        int action;
        double log_prob;
        if (eval == nullptr) {
            action = static_cast<int>(rng.next_below(4));
            log_prob = std::log(0.25);
        } else {
            const auto out = eval->forward(params, state, cache);
            const auto probs = softmax(out.logits);
            action = sample_categorical4(probs, rng);
            log_prob = std::log(std::max(probs[static_cast<std::size_t>(action)], kMinProb));
        }
        r.episode.steps.push_back({state, action, log_prob});
        auto sr = env.step(action);
        if (sr.done) {
            r.outcome = std::move(*sr.outcome);
            r.episode.terminal_reward = r.outcome.reward;
            r.episode.distance = r.outcome.distance;
            r.episode.solved = r.outcome.solved;
            r.episode.duration_s = seconds_since(t0);
            return r;
        }
        state = std::move(*sr.state);
    }
}

enum class LoopMode { fresh_learn, frozen, adapt_learn, uniform };

DesignResult design_loop(const DotBracket& target, const PolicyConfig* policy_cfg,
                         const PolicyParams* warm, const TrainLoopConfig& cfg,
                         const FoldingOracle& oracle, LoopMode mode, const StatsSink& sink,
                         double uniform_alpha) {
    cfg.validate();
    const bool learning = mode == LoopMode::fresh_learn || mode == LoopMode::adapt_learn;

    const PolicyConfig* net_cfg = nullptr;
    if (mode == LoopMode::fresh_learn) net_cfg = policy_cfg;
    else if (mode != LoopMode::uniform) net_cfg = &warm->config();

    const double alpha = net_cfg ? net_cfg->reward_exponent : uniform_alpha;
    RewardConfig reward;
    reward.alpha = alpha;
    reward.xi = cfg.lis_xi;
    reward.lis_enabled = cfg.lis_enabled;
    const std::size_t radius = net_cfg ? static_cast<std::size_t>(net_cfg->state_radius) : 0;
    DesignEnv env(target, radius, reward, oracle);

    std::optional<PolicyEvaluator> eval;
    std::vector<double> params;
    std::optional<Adam> opt;
    if (net_cfg) {
        eval.emplace(*net_cfg);
        if (mode == LoopMode::fresh_learn) {
            params.resize(eval->total_params());
            eval->init(params, derive_seed(cfg.seed, kStreamParams, 0));
        } else {
            params.assign(warm->values().begin(), warm->values().end());
        }
        if (learning) opt.emplace(eval->total_params(), net_cfg->learning_rate);
    }

    Rng act_rng(derive_seed(cfg.seed, kStreamActions));
    PolicyEvaluator::Cache cache;

    DesignResult res;
    res.target = target.str();

    const auto t0 = Clock::now();
    auto restart_mark = t0;
    std::vector<Episode> batch;
    const std::size_t batch_size =
        learning && net_cfg ? static_cast<std::size_t>(net_cfg->batch_size) : 0;
    double batch_reward_sum = 0.0;

    while (true) {
        if (cfg.max_episodes > 0 && res.episodes >= cfg.max_episodes) break;
        const double elapsed = seconds_since(t0);
        if (elapsed >= cfg.time_budget_s) break;

        // Time-based restart: no solve within restart_period -> fresh start.
        if (learning && cfg.restart_period_s > 0.0 &&
            seconds_since(restart_mark) >= cfg.restart_period_s) {
            RestartEvent ev;
            ev.time_s = elapsed;
            ev.episode = res.episodes;
            ev.seed = derive_seed(cfg.seed, kStreamParams, res.restarts.size() + 1);
            if (mode == LoopMode::fresh_learn) {
                eval->init(params, ev.seed);
            } else {
                params.assign(warm->values().begin(), warm->values().end());
            }
            opt->reset();
            batch.clear();
            batch_reward_sum = 0.0;
            res.restarts.push_back(ev);
            restart_mark = Clock::now();
        }

        auto roll = roll_episode(env, eval ? &*eval : nullptr, params, act_rng, cache,
                                 /*target_id=*/0);
        ++res.episodes;
        res.env_steps += roll.episode.steps.size();
        res.lis_candidates += roll.outcome.lis_candidates;
        res.distance_sum += roll.outcome.distance;

        if (roll.outcome.distance < res.best_distance) {
            res.best_distance = roll.outcome.distance;
            res.best_sequence = roll.outcome.solution.str();
            res.best_reward = roll.outcome.reward;
            res.time_to_best_s = seconds_since(t0);
        }
        if (roll.outcome.solved && !res.solved) {
            res.solved = true;
            res.time_to_solve_s = seconds_since(t0);
            if (cfg.stop_on_solve) break;
        }

        if (learning) {
            batch_reward_sum += roll.episode.terminal_reward;
            batch.push_back(std::move(roll.episode));
            if (batch.size() >= batch_size) {
                ppo_update(*eval, params, batch, cfg.ppo, net_cfg->entropy_coeff, *opt);
                ++res.updates;
                if (sink) {
                    TrainStats st;
                    st.time_s = seconds_since(t0);
                    st.episodes = res.episodes;
                    st.mean_reward = batch_reward_sum / static_cast<double>(batch.size());
                    st.best_distance = res.best_distance;
                    st.restarts = res.restarts.size();
                    sink(st);
                }
                batch.clear();
                batch_reward_sum = 0.0;
            }
        }
    }
    res.elapsed_s = seconds_since(t0);
    return res;
}

}  // namespace

DesignResult run_learna(const DotBracket& target, const PolicyConfig& policy_cfg,
                        const TrainLoopConfig& cfg, const FoldingOracle& oracle,
                        const StatsSink& sink) {
    policy_cfg.validate();
    return design_loop(target, &policy_cfg, nullptr, cfg, oracle, LoopMode::fresh_learn, sink,
                       policy_cfg.reward_exponent);
}

DesignResult run_meta_apply(const PolicyParams& params, const DotBracket& target,
                            const TrainLoopConfig& cfg, const FoldingOracle& oracle, bool adapt,
                            const StatsSink& sink) {
    return design_loop(target, nullptr, &params, cfg, oracle,
                       adapt ? LoopMode::adapt_learn : LoopMode::frozen, sink,
                       params.config().reward_exponent);
}

DesignResult run_uniform_policy(const DotBracket& target, const TrainLoopConfig& cfg,
                                const FoldingOracle& oracle, double reward_exponent) {
    return design_loop(target, nullptr, nullptr, cfg, oracle, LoopMode::uniform, {},
                       reward_exponent);
}

// ---------------------------------------------------------------------------
// Meta training
// ---------------------------------------------------------------------------

namespace {

struct EpisodeQueue {
    std::mutex mu;
    std::condition_variable cv_push, cv_pop;
    std::deque<Episode> q;
    std::size_t capacity = 0;
    bool stopped = false;
    std::uint64_t produced = 0;

    // Returns false when stopped; the episode is then discarded unproduced.
    bool push(Episode ep) {
        std::unique_lock lock(mu);
        cv_push.wait(lock, [&] { return stopped || q.size() < capacity; });
        if (stopped) return false;
        q.push_back(std::move(ep));
        ++produced;
        cv_pop.notify_one();
        return true;
    }

    std::optional<Episode> pop_for(std::chrono::milliseconds wait) {
        std::unique_lock lock(mu);
        if (!cv_pop.wait_for(lock, wait, [&] { return !q.empty(); })) return std::nullopt;
        Episode ep = std::move(q.front());
        q.pop_front();
        cv_push.notify_one();
        return ep;
    }

    void stop() {
        std::lock_guard lock(mu);
        stopped = true;
        cv_push.notify_all();
    }
};

}  // namespace

MetaTrainResult run_meta_train(std::span<const DotBracket> train_targets,
                               const PolicyConfig& policy_cfg, const TrainLoopConfig& cfg,
                               const FoldingOracle& oracle, const StatsSink& sink) {
    policy_cfg.validate();
    cfg.validate();
    if (train_targets.empty()) throw InvalidConfig("meta training set must be nonempty");

    RewardConfig reward;
    reward.alpha = policy_cfg.reward_exponent;
    reward.xi = cfg.lis_xi;
    reward.lis_enabled = cfg.lis_enabled;

    PolicyEvaluator eval(policy_cfg);
    PolicyParams params = PolicyParams::build(policy_cfg, derive_seed(cfg.seed, kStreamParams, 0));
    Adam opt(eval.total_params(), policy_cfg.learning_rate);
    const std::size_t batch_size = static_cast<std::size_t>(policy_cfg.batch_size);

    MetaTrainResult result{std::move(params)};
    const auto t0 = Clock::now();
    std::size_t best_distance = std::numeric_limits<std::size_t>::max();

    auto emit = [&](std::span<const Episode> batch) {
        if (!sink) return;
        double sum = 0.0;
        for (const auto& ep : batch) {
            sum += ep.terminal_reward;
            best_distance = std::min(best_distance, ep.distance);
        }
        TrainStats st;
        st.time_s = seconds_since(t0);
        st.episodes = result.episodes_consumed;
        st.mean_reward = batch.empty() ? 0.0 : sum / static_cast<double>(batch.size());
        st.best_distance = best_distance;
        st.restarts = 0;
        sink(st);
    };

    if (cfg.worker_count == 1) {
        std::vector<DesignEnv> envs;
        envs.reserve(train_targets.size());
        for (const auto& t : train_targets)
            envs.emplace_back(t, static_cast<std::size_t>(policy_cfg.state_radius), reward,
                              oracle);
        Rng target_rng(derive_seed(cfg.seed, kStreamTargets));
        Rng act_rng(derive_seed(cfg.seed, kStreamActions));
        PolicyEvaluator::Cache cache;
        std::vector<Episode> batch;
        auto apply = [&](std::span<const Episode> b) {
            ppo_update(eval, result.params.values(), b, cfg.ppo, policy_cfg.entropy_coeff, opt);
            ++result.updates;
            result.episodes_consumed += b.size();
            emit(b);
        };
        while (true) {
            if (cfg.max_episodes > 0 && result.episodes_produced >= cfg.max_episodes) break;
            if (seconds_since(t0) >= cfg.time_budget_s) break;
            const std::size_t ti = target_rng.next_below(train_targets.size());
            auto roll = roll_episode(envs[ti], &eval, result.params.values(), act_rng, cache, ti);
            ++result.episodes_produced;
            batch.push_back(std::move(roll.episode));
            if (batch.size() >= batch_size) {
                apply(batch);
                batch.clear();
            }
        }
        if (!batch.empty()) apply(batch);  // consume the tail so the audit balances
    } else {
        EpisodeQueue queue;
        queue.capacity = 2 * std::max<std::size_t>(batch_size, 1);

        std::mutex snap_mu;
        auto snapshot = std::make_shared<const std::vector<double>>(
            result.params.values().begin(), result.params.values().end());
        auto read_snapshot = [&] {
            std::lock_guard lock(snap_mu);
            return snapshot;
        };
        auto publish_snapshot = [&] {
            auto next = std::make_shared<const std::vector<double>>(
                result.params.values().begin(), result.params.values().end());
            std::lock_guard lock(snap_mu);
            snapshot = std::move(next);
        };

        std::atomic<bool> stop{false};
        auto worker_fn = [&](int wi) {
            const std::uint64_t wseed = derive_seed(cfg.seed, kStreamWorker,
                                                    static_cast<std::uint64_t>(wi));
            Rng target_rng(derive_seed(wseed, kStreamTargets));
            Rng act_rng(derive_seed(wseed, kStreamActions));
            PolicyEvaluator::Cache cache;
            std::vector<DesignEnv> envs;
            envs.reserve(train_targets.size());
            for (const auto& t : train_targets)
                envs.emplace_back(t, static_cast<std::size_t>(policy_cfg.state_radius), reward,
                                  oracle);
            while (!stop.load(std::memory_order_relaxed)) {
                auto snap = read_snapshot();
                const std::size_t ti = target_rng.next_below(train_targets.size());
                auto roll = roll_episode(envs[ti], &eval, *snap, act_rng, cache, ti);
                if (!queue.push(std::move(roll.episode))) break;
            }
        };
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(cfg.worker_count));
        for (int i = 0; i < cfg.worker_count; ++i) workers.emplace_back(worker_fn, i);

        std::vector<Episode> batch;
        auto apply = [&](std::span<const Episode> b) {
            ppo_update(eval, result.params.values(), b, cfg.ppo, policy_cfg.entropy_coeff, opt);
            ++result.updates;
            result.episodes_consumed += b.size();
            publish_snapshot();
            emit(b);
        };
        while (seconds_since(t0) < cfg.time_budget_s &&
               (cfg.max_episodes == 0 || result.episodes_consumed + batch.size() <
                                             cfg.max_episodes)) {
            auto ep = queue.pop_for(std::chrono::milliseconds(20));
            if (!ep) continue;
            batch.push_back(std::move(*ep));
            if (batch.size() >= batch_size) {
                apply(batch);
                batch.clear();
            }
        }
        stop.store(true);
        queue.stop();
        for (auto& w : workers) w.join();
        // Drain whatever the workers managed to push; every produced episode
        // must be consumed exactly once.
        while (auto ep = queue.pop_for(std::chrono::milliseconds(0))) {
            batch.push_back(std::move(*ep));
            if (batch.size() >= batch_size) {
                apply(batch);
                batch.clear();
            }
        }
        if (!batch.empty()) apply(batch);
        result.episodes_produced = queue.produced;
    }

    result.episodes = result.episodes_consumed;
    result.elapsed_s = seconds_since(t0);
    return result;
}

}  // namespace rnadesign
