#include "polarlab/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "polarlab/common.hpp"

namespace polarlab {

void ReplayBuffer::push(Transition tr) {
    if (buf_.size() == capacity_)
        buf_.pop_front();
    buf_.push_back(std::move(tr));
}

double MonteCarloFerSource::log_fer(const Construction& c, SnrDb gamma, std::uint64_t seed) {
    FerEstimate est = estimate_fer(c, L_, gamma, rule_, seed, workers_);
    const double p = est.errors == 0
                         ? 1.0 / (2.0 * static_cast<double>(est.frames))
                         : est.fer;
    return std::log(p);
}

CodeSpec TrainConfig::code_spec() const { return make_code_spec(N, K, m, crc_hex); }

void TrainConfig::validate() const {
    code_spec().validate();
    if (K >= N)
        throw std::invalid_argument("TrainConfig: K must be < N");
    if (gamma_min > gamma_max)
        throw std::invalid_argument("TrainConfig: gamma_min must be <= gamma_max");
    if (episodes < 0 || minibatch < 1 || replay_capacity < 1)
        throw std::invalid_argument("TrainConfig: bad training sizes");
    if (reward_max_errors < 1 || reward_max_frames < 1)
        throw std::invalid_argument("TrainConfig: reward budgets must be positive");
    if (target_update_episodes < 1 || L < 1)
        throw std::invalid_argument("TrainConfig: bad schedule fields");
    hyper.validate();
}

ConstructionEnv::ConstructionEnv(CodeSpec spec, FerSource& fer, bool cache_step_fer)
    : spec_(std::move(spec)), fer_(fer), cache_step_fer_(cache_step_fer) {
    spec_.validate();
    if (spec_.K >= spec_.N)
        throw std::invalid_argument("ConstructionEnv: K must be < N");
}

ConstructionEnv::State ConstructionEnv::reset(SnrDb gamma, std::uint64_t episode_seed) {
    State s;
    s.frozen_mask.assign(static_cast<std::size_t>(spec_.N), 0);
    s.t = 0;
    s.gamma_db = gamma.db;
    s.episode_seed = episode_seed;
    have_cached_ = false;
    return s;
}

Construction ConstructionEnv::intermediate_code(const std::vector<std::uint8_t>& mask) const {
    std::vector<int> info;
    for (int i = 0; i < spec_.N; ++i)
        if (!mask[static_cast<std::size_t>(i)])
            info.push_back(i);
    CodeSpec inter = spec_;
    inter.K = static_cast<int>(info.size());
    return make_construction(inter, std::move(info));
}

std::pair<ConstructionEnv::State, double> ConstructionEnv::step(const State& s, int action) {
    if (s.t >= steps_per_episode())
        throw std::logic_error("ConstructionEnv::step: episode already terminated");
    if (action < 0 || action >= spec_.N || s.frozen_mask[static_cast<std::size_t>(action)])
        throw std::logic_error("ConstructionEnv::step: action must be a non-frozen index");

    const std::uint64_t step_seed = derive_stream(s.episode_seed, static_cast<std::uint64_t>(s.t));

    double log_before;
    if (cache_step_fer_ && have_cached_ && cached_mask_ == s.frozen_mask) {
        log_before = cached_log_fer_;
    } else {
        log_before = fer_.log_fer(intermediate_code(s.frozen_mask), SnrDb{s.gamma_db}, step_seed);
    }

    State next = s;
    next.frozen_mask[static_cast<std::size_t>(action)] = 1;
    next.t = s.t + 1;
    const double log_after =
        fer_.log_fer(intermediate_code(next.frozen_mask), SnrDb{s.gamma_db}, step_seed);

    if (cache_step_fer_) {
        have_cached_ = true;
        cached_log_fer_ = log_after;
        cached_mask_ = next.frozen_mask;
    }
    return {std::move(next), log_before - log_after};
}

namespace {

int pick_greedy(const Eigen::VectorXd& z, const std::vector<std::uint8_t>& frozen_mask) {
    int best = -1;
    for (int j = 0; j < z.size(); ++j) {
        if (frozen_mask[static_cast<std::size_t>(j)])
            continue;
        if (best < 0 || z(j) > z(best))
            best = j;
    }
    return best;
}

double max_nonfrozen(const Eigen::VectorXd& z, const std::vector<std::uint8_t>& frozen_mask) {
    const int j = pick_greedy(z, frozen_mask);
    return z(j);
}

} // namespace

TrainResult dqn_train(const TrainConfig& config, FerSource* fer_override,
                      const TrainCallback& callback, const ImpParams* initial_params,
                      std::optional<double> fixed_gamma_db) {
    config.validate();
    const CodeSpec spec = config.code_spec();
    const int N = config.N;
    const int steps_per_episode = config.N - config.K;
    const int workers = std::max(1, config.workers);

    MonteCarloFerSource default_fer(
        config.L, StopRule::training(config.reward_max_errors, config.reward_max_frames), workers);
    FerSource& fer = fer_override ? *fer_override : default_fer;
    ConstructionEnv env(spec, fer, config.cache_step_fer);

    ImpParams params = initial_params ? *initial_params
                                      : imp_init_params(config.hyper, derive_stream(config.seed, 0));
    ImpParams target = params;
    ReplayBuffer replay(config.replay_capacity);
    Rng policy_rng(derive_stream(config.seed, 1));
    const std::uint64_t episode_seed_root = derive_stream(config.seed, 2);

    TrainResult result;
    std::vector<double> recent_returns;
    const auto t_start = std::chrono::steady_clock::now();

    PccmpGraph graph = build_pccmp(N, SnrDb{0.0});
    std::vector<PccmpGraph> worker_graphs(static_cast<std::size_t>(workers), graph);
    const int B = config.minibatch;
    std::vector<ImpParams> sample_grads(static_cast<std::size_t>(B));
    std::vector<const Transition*> batch(static_cast<std::size_t>(B));

    std::uint64_t global_step = 0;
    double epsilon = config.eps_init;

    for (int episode = 0; episode < config.episodes; ++episode) {
        const double beta =
            std::min(config.beta_init + (1.0 - config.beta_init) *
                                            static_cast<double>(episode) /
                                            static_cast<double>(config.beta_ramp_episodes),
                     1.0);
        const double gamma_db =
            fixed_gamma_db ? *fixed_gamma_db : policy_rng.uniform(config.gamma_min, config.gamma_max);
        ConstructionEnv::State state =
            env.reset(SnrDb{gamma_db}, derive_stream(episode_seed_root, static_cast<std::uint64_t>(episode)));

        double episode_return = 0.0;
        double beta_pow = 1.0;

        for (int t = 0; t < steps_per_episode; ++t) {
            epsilon = std::max(config.eps_init * std::pow(config.eps_decay,
                                                          static_cast<double>(global_step)),
                               config.eps_floor());
            graph.set_gamma(SnrDb{gamma_db});
            graph.set_types_from_frozen_mask(state.frozen_mask);
            PriorityVector pv = imp_score(graph, params, env.theta_of(t));

            int action;
            if (policy_rng.uniform() < epsilon) {
                std::vector<int> open;
                open.reserve(static_cast<std::size_t>(N - t));
                for (int j = 0; j < N; ++j)
                    if (!state.frozen_mask[static_cast<std::size_t>(j)])
                        open.push_back(j);
                action = open[policy_rng.uniform_int(open.size())];
            } else {
                action = pick_greedy(pv.z, state.frozen_mask);
            }
            if (action < 0 || state.frozen_mask[static_cast<std::size_t>(action)])
                throw std::logic_error("dqn_train: policy selected a frozen index");

            auto [next_state, reward] = env.step(state, action);
            episode_return += beta_pow * reward;
            beta_pow *= beta;

            Transition tr;
            tr.frozen_mask = state.frozen_mask;
            tr.t = t;
            tr.gamma_db = gamma_db;
            tr.action = action;
            tr.reward = reward;
            tr.terminal = (t + 1 == steps_per_episode);
            replay.push(std::move(tr));
            ++global_step;

            if (replay.size() >= static_cast<std::size_t>(B)) {
                for (int i = 0; i < B; ++i)
                    batch[static_cast<std::size_t>(i)] = &replay.sample(policy_rng);

                std::vector<double> td_errors(static_cast<std::size_t>(B), 0.0);
                auto process_range = [&](int w, int lo, int hi) {
                    PccmpGraph& g = worker_graphs[static_cast<std::size_t>(w)];
                    ForwardCache cache;
                    for (int i = lo; i < hi; ++i) {
                        const Transition& s = *batch[static_cast<std::size_t>(i)];
                        double y = s.reward;
                        if (!s.terminal) {
                            std::vector<std::uint8_t> next_mask = s.frozen_mask;
                            next_mask[static_cast<std::size_t>(s.action)] = 1;
                            g.set_gamma(SnrDb{s.gamma_db});
                            g.set_types_from_frozen_mask(next_mask);
                            PriorityVector zt = imp_score(g, target, env.theta_of(s.t + 1));
                            y += beta * max_nonfrozen(zt.z, next_mask);
                        }
                        g.set_gamma(SnrDb{s.gamma_db});
                        g.set_types_from_frozen_mask(s.frozen_mask);
                        PriorityVector zo = imp_score(g, params, env.theta_of(s.t), &cache);
                        const double q = zo.z(s.action);
                        const double err = q - y;
                        td_errors[static_cast<std::size_t>(i)] = err;
                        Eigen::VectorXd dz = Eigen::VectorXd::Zero(N);
                        dz(s.action) = 2.0 * err / static_cast<double>(B);
                        sample_grads[static_cast<std::size_t>(i)] =
                            imp_backward(g, params, dz, cache);
                    }
                };
                if (workers == 1) {
                    process_range(0, 0, B);
                } else {
                    std::vector<std::thread> pool;
                    const int chunk = (B + workers - 1) / workers;
                    for (int w = 0; w < workers; ++w) {
                        const int lo = w * chunk;
                        const int hi = std::min(B, lo + chunk);
                        if (lo < hi)
                            pool.emplace_back(process_range, w, lo, hi);
                    }
                    for (std::thread& th : pool)
                        th.join();
                }
                double loss = 0.0;
                for (double e : td_errors)
                    loss += e * e;
                loss /= static_cast<double>(B);
                if (!std::isfinite(loss))
                    throw numerical_error("dqn_train: non-finite TD loss at episode " +
                                          std::to_string(episode) + " step " + std::to_string(t));
                // Fixed-order reduction keeps the update identical for any
                // worker count.
                for (int i = 0; i < B; ++i)
                    imp_axpy(params, sample_grads[static_cast<std::size_t>(i)],
                             -config.learning_rate);
            }
            state = std::move(next_state);
        }

        if ((episode + 1) % config.target_update_episodes == 0)
            target = params;

        recent_returns.push_back(episode_return);
        if (recent_returns.size() > 100)
            recent_returns.erase(recent_returns.begin());
        double mean_ret = 0.0;
        for (double r : recent_returns)
            mean_ret += r;
        mean_ret /= static_cast<double>(recent_returns.size());

        if (callback || (episode % std::max(1, config.log_every) == 0) ||
            episode + 1 == config.episodes) {
            EpisodeLog log;
            log.episode = episode;
            log.episode_return = episode_return;
            log.mean_return = mean_ret;
            log.epsilon = epsilon;
            log.beta = beta;
            log.gamma_db = gamma_db;
            log.env_steps = global_step;
            log.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                             .count();
            result.logs.push_back(log);
            if (callback)
                callback(log);
        }
    }

    result.params = std::move(params);
    return result;
}

ImpParams fine_tune(const ImpParams& params, SnrDb gamma_eval, int episodes, TrainConfig config,
                    FerSource* fer_override, const TrainCallback& callback) {
    if (episodes == 0)
        return params;
    config.episodes = episodes;
    TrainResult r = dqn_train(config, fer_override, callback, &params, gamma_eval.db);
    return std::move(r.params);
}

} // namespace polarlab
