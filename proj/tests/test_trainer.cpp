#include "doctest.h"

#include <cmath>

#include "polarlab/decoders.hpp"
#include "polarlab/trainer.hpp"

using namespace polarlab;

namespace {

ImpHyper tiny_hyper() {
    ImpHyper h;
    h.M = 2;
    h.d_emb = 4;
    h.d_init = 2;
    h.d_hidden = {8, 8};
    h.d_pool = 1;
    h.post_hidden = {8};
    return h;
}

/// Exact FER over a quantized channel: code bit i's LLR has magnitude mags[i]
/// and flips sign independently with probability `flip_p`; the all-zero frame
/// is transmitted and every flip pattern is enumerated.
class QuantizedChannelOracle : public FerSource {
public:
    QuantizedChannelOracle(int list_size, std::vector<double> mags, double flip_p)
        : L_(list_size), mags_(std::move(mags)), flip_p_(flip_p) {}

    double fer_of(const Construction& c) {
        const int N = c.spec.N;
        REQUIRE(static_cast<std::size_t>(N) == mags_.size());
        const BitVector zero_info(static_cast<std::size_t>(c.spec.info_bits()), 0);
        ListDecoder dec(c, L_);
        double fer = 0.0;
        LlrVector llrs(static_cast<std::size_t>(N));
        for (int pattern = 0; pattern < (1 << N); ++pattern) {
            double prob = 1.0;
            for (int i = 0; i < N; ++i) {
                const bool flip = (pattern >> i) & 1;
                prob *= flip ? flip_p_ : (1.0 - flip_p_);
                llrs[static_cast<std::size_t>(i)] =
                    flip ? -mags_[static_cast<std::size_t>(i)] : mags_[static_cast<std::size_t>(i)];
            }
            DecodeResult r = cascl_select(dec.decode(llrs), c);
            if (r.info_hat != zero_info)
                fer += prob;
        }
        return std::max(fer, 1e-30);
    }

    double log_fer(const Construction& c, SnrDb, std::uint64_t) override {
        return std::log(fer_of(c));
    }

private:
    int L_;
    std::vector<double> mags_;
    double flip_p_;
};

std::vector<double> graded_mags(int N) {
    std::vector<double> mags(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        mags[static_cast<std::size_t>(i)] = 2.0 + 0.35 * i;
    return mags;
}

TrainConfig tiny_config() {
    TrainConfig cfg;
    cfg.N = 8;
    cfg.K = 4;
    cfg.m = 0;
    cfg.crc_hex = "";
    cfg.L = 1;
    cfg.gamma_min = 1.0;
    cfg.gamma_max = 3.0;
    cfg.episodes = 3;
    cfg.reward_max_errors = 10;
    cfg.reward_max_frames = 200;
    cfg.replay_capacity = 64;
    cfg.minibatch = 8;
    cfg.seed = 5;
    cfg.log_every = 1;
    cfg.hyper = tiny_hyper();
    return cfg;
}

std::vector<double> flat(const ImpParams& p) {
    std::vector<double> out;
    visit_tensors(const_cast<ImpParams&>(p),
                  [&](const std::string&, Eigen::Ref<Eigen::MatrixXd> t) {
                      for (Eigen::Index i = 0; i < t.size(); ++i)
                          out.push_back(t.data()[i]);
                  });
    return out;
}

} // namespace

TEST_CASE("replay buffer is FIFO with bounded capacity") {
    ReplayBuffer buf(3);
    for (int i = 0; i < 5; ++i) {
        Transition tr;
        tr.action = i;
        buf.push(tr);
        CHECK(buf.size() <= 3);
    }
    CHECK(buf.size() == 3);
    CHECK(buf.at(0).action == 2);
    CHECK(buf.at(2).action == 4);
}

TEST_CASE("replay sampling is uniform (chi-square, df=99)") {
    ReplayBuffer buf(100);
    for (int i = 0; i < 100; ++i) {
        Transition tr;
        tr.action = i;
        buf.push(tr);
    }
    Rng rng(2025);
    std::vector<int> counts(100, 0);
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i)
        ++counts[static_cast<std::size_t>(buf.sample(rng).action)];
    double chi2 = 0.0;
    const double expect = draws / 100.0;
    for (int c : counts)
        chi2 += (c - expect) * (c - expect) / expect;
    // 0.99 quantile of chi-square with 99 degrees of freedom
    CHECK(chi2 < 134.642);
}

TEST_CASE("environment transition and masking") {
    QuantizedChannelOracle oracle(2, graded_mags(8), 0.15);
    CodeSpec spec = make_code_spec(8, 4, 0);
    ConstructionEnv env(spec, oracle, /*cache_step_fer=*/false);
    auto s = env.reset(SnrDb{2.0}, 123);
    CHECK(env.steps_per_episode() == 4);
    CHECK(env.theta_of(0) == doctest::Approx(1.0));
    CHECK(env.theta_of(2) == doctest::Approx(0.5));

    auto [s1, r1] = env.step(s, 0);
    CHECK(s1.t == 1);
    CHECK(s1.frozen_mask[0] == 1);
    CHECK_THROWS_AS(env.step(s1, 0), std::logic_error); // already frozen
    auto [s2, r2] = env.step(s1, 5);
    auto [s3, r3] = env.step(s2, 3);
    auto [s4, r4] = env.step(s3, 6);
    CHECK(s4.t == 4);
    CHECK_THROWS_AS(env.step(s4, 1), std::logic_error); // episode over
}

TEST_CASE("episode return telescopes exactly with cached exact FERs") {
    QuantizedChannelOracle oracle(2, graded_mags(8), 0.15);
    CodeSpec spec = make_code_spec(8, 4, 0);
    ConstructionEnv env(spec, oracle, /*cache_step_fer=*/true);
    auto s = env.reset(SnrDb{2.0}, 7);

    std::vector<int> rate1_info = {0, 1, 2, 3, 4, 5, 6, 7};
    Construction rate1 = make_construction(make_code_spec(8, 8, 0), rate1_info);
    const double log_initial = std::log(oracle.fer_of(rate1));

    double total = 0.0;
    for (int action : {0, 1, 2, 4}) {
        auto [next, r] = env.step(s, action);
        total += r;
        s = next;
    }
    Construction final_code =
        construction_from_frozen(make_code_spec(8, 4, 0), {0, 1, 2, 4});
    const double log_final = std::log(oracle.fer_of(final_code));
    CHECK(std::fabs(total - (log_initial - log_final)) < 1e-12);
}

TEST_CASE("freezing a strictly improving bit gives a positive reward") {
    QuantizedChannelOracle oracle(2, graded_mags(8), 0.15);
    CodeSpec spec = make_code_spec(8, 4, 0);
    ConstructionEnv env(spec, oracle, false);

    std::vector<int> all_info = {0, 1, 2, 3, 4, 5, 6, 7};
    Construction rate1 = make_construction(make_code_spec(8, 8, 0), all_info);
    const double fer_before = oracle.fer_of(rate1);
    int improving = -1;
    for (int a = 0; a < 8 && improving < 0; ++a) {
        Construction after = construction_from_frozen(make_code_spec(8, 7, 0), {a});
        if (oracle.fer_of(after) < fer_before)
            improving = a;
    }
    REQUIRE(improving >= 0);

    auto s = env.reset(SnrDb{2.0}, 9);
    auto [s1, reward] = env.step(s, improving);
    CHECK(reward > 0.0);
}

TEST_CASE("schedules follow the configured decay laws") {
    TrainConfig cfg = tiny_config();
    cfg.episodes = 25;
    cfg.beta_ramp_episodes = 20;
    QuantizedChannelOracle oracle(1, graded_mags(8), 0.15);
    TrainResult res = dqn_train(cfg, &oracle);
    REQUIRE(res.logs.size() >= 21);
    const int steps_per_episode = cfg.N - cfg.K;
    for (const EpisodeLog& log : res.logs) {
        const double expected_beta =
            std::min(0.8 + 0.2 * static_cast<double>(log.episode) / 20.0, 1.0);
        CHECK(log.beta == doctest::Approx(expected_beta).epsilon(1e-12));
        const auto last_step =
            static_cast<double>((log.episode + 1) * steps_per_episode - 1);
        const double expected_eps =
            std::max(0.5 * std::pow(0.999, last_step), 1.0 / (5.0 * cfg.N));
        CHECK(log.epsilon == doctest::Approx(expected_eps).epsilon(1e-12));
    }
}

TEST_CASE("training is deterministic and worker-count invariant") {
    TrainConfig cfg = tiny_config();
    QuantizedChannelOracle oracle(1, graded_mags(8), 0.15);
    TrainResult a = dqn_train(cfg, &oracle);
    TrainResult b = dqn_train(cfg, &oracle);
    CHECK(flat(a.params) == flat(b.params));

    cfg.workers = 2;
    TrainResult c = dqn_train(cfg, &oracle);
    CHECK(flat(a.params) == flat(c.params));
}

TEST_CASE("training runs with the Monte Carlo reward source") {
    TrainConfig cfg = tiny_config();
    cfg.episodes = 2;
    TrainResult res = dqn_train(cfg);
    CHECK(flat(res.params).size() == imp_param_count(res.params));
    for (const EpisodeLog& log : res.logs)
        CHECK(std::isfinite(log.episode_return));
}

TEST_CASE("fine-tuning") {
    TrainConfig cfg = tiny_config();
    QuantizedChannelOracle oracle(1, graded_mags(8), 0.15);
    ImpParams base = dqn_train(cfg, &oracle).params;

    SUBCASE("zero episodes returns the parameters unchanged") {
        ImpParams same = fine_tune(base, SnrDb{2.5}, 0, cfg, &oracle);
        CHECK(flat(same) == flat(base));
    }
    SUBCASE("deterministic given the seed") {
        ImpParams a = fine_tune(base, SnrDb{2.5}, 2, cfg, &oracle);
        ImpParams b = fine_tune(base, SnrDb{2.5}, 2, cfg, &oracle);
        CHECK(flat(a) == flat(b));
        CHECK(flat(a) != flat(base));
    }
}

TEST_CASE("zero-error estimates are floored to keep rewards finite") {
    MonteCarloFerSource src(1, StopRule::training(100, 500), 1);
    Construction good = construction_from_frozen(make_code_spec(8, 4, 0), {0, 1, 2, 4});
    const double lf = src.log_fer(good, SnrDb{20.0}, 3); // essentially noiseless
    CHECK(std::isfinite(lf));
    CHECK(lf == doctest::Approx(std::log(1.0 / (2.0 * 500.0))));
}
