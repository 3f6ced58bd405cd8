#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polarlab/fer.hpp"
#include "polarlab/imp_model.hpp"

namespace polarlab {

/// One step of a construction episode, in the compact form kept in the replay
/// buffer. The successor state is implicit: its mask is frozen_mask plus
/// `action`, at step t+1.
struct Transition {
    std::vector<std::uint8_t> frozen_mask; // state s_t (1 = frozen)
    int t = 0;
    double gamma_db = 0.0;
    int action = -1;
    double reward = 0.0;
    bool terminal = false;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}
    void push(Transition tr);
    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return buf_[i]; }
    const Transition& sample(Rng& rng) const { return buf_[rng.uniform_int(buf_.size())]; }

private:
    std::size_t capacity_;
    std::deque<Transition> buf_;
};

/// Source of log-FER values for the reward. The default implementation runs
/// the Monte Carlo harness with the training budget; tests substitute exact
/// oracles.
class FerSource {
public:
    virtual ~FerSource() = default;
    virtual double log_fer(const Construction& c, SnrDb gamma, std::uint64_t seed) = 0;
};

class MonteCarloFerSource : public FerSource {
public:
    MonteCarloFerSource(int list_size, StopRule rule, int workers)
        : L_(list_size), rule_(rule), workers_(workers) {}
    /// log of the estimated FER, floored at 1/(2*frames) when no errors were
    /// observed so the reward stays finite.
    double log_fer(const Construction& c, SnrDb gamma, std::uint64_t seed) override;

private:
    int L_;
    StopRule rule_;
    int workers_;
};

struct TrainConfig {
    int N = 32, K = 16, m = 4, L = 2;
    std::string crc_hex = "0x3";
    double gamma_min = 1.0, gamma_max = 4.0;
    int episodes = 2000;

    double eps_init = 0.5;
    double eps_decay = 0.999; // applied once per environment step
    double beta_init = 0.8;
    int beta_ramp_episodes = 20;

    std::uint64_t reward_max_errors = 100;
    std::uint64_t reward_max_frames = 100'000;
    bool cache_step_fer = false; // reuse the previous step's estimate of P(I_t)

    std::size_t replay_capacity = 10'000;
    int target_update_episodes = 2;
    int minibatch = 32;
    double learning_rate = 1e-3;

    std::uint64_t seed = 1;
    int workers = 1;
    int log_every = 10;
    ImpHyper hyper;

    double eps_floor() const { return 1.0 / (5.0 * N); }
    CodeSpec code_spec() const;
    void validate() const;
};

/// Construction MDP: states are frozen masks of [N], actions freeze one
/// non-frozen index, rewards are log-FER improvements of the intermediate
/// codes P(N, |I|, m) under CA-SCL at the episode SNR.
class ConstructionEnv {
public:
    ConstructionEnv(CodeSpec spec, FerSource& fer, bool cache_step_fer);

    struct State {
        std::vector<std::uint8_t> frozen_mask;
        int t = 0;
        double gamma_db = 0.0;
        std::uint64_t episode_seed = 0;
    };

    State reset(SnrDb gamma, std::uint64_t episode_seed);
    int steps_per_episode() const { return spec_.N - spec_.K; }
    double theta_of(int t) const { return 1.0 - static_cast<double>(t) / steps_per_episode(); }

    /// Applies `action` (must be non-frozen, t < N-K). Both FER estimates of
    /// one step share a substream seed (common random numbers).
    std::pair<State, double> step(const State& s, int action);

    const CodeSpec& spec() const { return spec_; }

private:
    Construction intermediate_code(const std::vector<std::uint8_t>& mask) const;

    CodeSpec spec_;
    FerSource& fer_;
    bool cache_step_fer_;
    bool have_cached_ = false;
    double cached_log_fer_ = 0.0;
    std::vector<std::uint8_t> cached_mask_;
};

struct EpisodeLog {
    int episode = 0;
    double episode_return = 0.0; // beta-discounted return of this episode
    double mean_return = 0.0;    // running mean over the last 100 episodes
    double epsilon = 0.0;        // value after the episode's last step
    double beta = 0.0;
    double gamma_db = 0.0;
    std::uint64_t env_steps = 0;
    double wall_s = 0.0;
};

using TrainCallback = std::function<void(const EpisodeLog&)>;

struct TrainResult {
    ImpParams params;
    std::vector<EpisodeLog> logs;
};

/// Episodic deep Q-learning: the scoring model's z_j are the action values,
/// epsilon-greedy exploration over non-frozen indices, uniform replay
/// sampling, per-step minibatch SGD on the squared TD error against a target
/// network copied every target_update_episodes episodes.
///
/// Results are a function of the config alone (including seed), independent
/// of `workers`. Throws numerical_error if the loss turns non-finite.
TrainResult dqn_train(const TrainConfig& config, FerSource* fer_override = nullptr,
                      const TrainCallback& callback = nullptr,
                      const ImpParams* initial_params = nullptr,
                      std::optional<double> fixed_gamma_db = std::nullopt);

/// Continues training from `params` with the SNR pinned to gamma_eval.
/// episodes = 0 returns the input unchanged.
ImpParams fine_tune(const ImpParams& params, SnrDb gamma_eval, int episodes, TrainConfig config,
                    FerSource* fer_override = nullptr, const TrainCallback& callback = nullptr);

} // namespace polarlab
