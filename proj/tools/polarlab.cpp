// polarlab: polar-code construction laboratory command-line tool.
//
// Subcommands: construct, train, fine-tune, evaluate, compare, baseline,
// verify-claim1, gradcheck. All randomness is controlled by --seed, outputs
// land under --out, and every emitted file carries a provenance header with
// the tool version, the fully resolved configuration, and the seed.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error,
// 3 numerical/divergence error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "polarlab/appendix_sc.hpp"
#include "polarlab/classical.hpp"
#include "polarlab/common.hpp"
#include "polarlab/decoders.hpp"
#include "polarlab/fer.hpp"
#include "polarlab/imp_runner.hpp"
#include "polarlab/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace polarlab;

namespace {

/// Applies a flat JSON config file to a subcommand's options: built-in
/// defaults < config values < command-line flags. Keys are option long names
/// without the leading dashes.
void apply_json_config(CLI::App* cmd) {
    CLI::Option* copt = cmd->get_option_no_throw("--config");
    if (!copt || copt->count() == 0)
        return;
    const std::string path = copt->as<std::string>();
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file " + path);
    nlohmann::json j;
    in >> j;
    if (!j.is_object())
        throw std::invalid_argument("config file must hold a flat JSON object: " + path);
    auto render = [](const nlohmann::json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    for (auto& [key, val] : j.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt)
            throw std::invalid_argument("unknown config key '" + key + "' in " + path);
        if (opt->count() > 0)
            continue; // explicit flags win
        if (val.is_array())
            for (const auto& v : val)
                opt->add_result(render(v));
        else
            opt->add_result(render(val));
        opt->run_callback();
    }
}

std::string version_string() {
    return std::string(kToolName) + " " + std::string(kToolVersion);
}

ordered_json provenance_base(const std::string& command, std::uint64_t seed,
                             ordered_json config) {
    ordered_json p;
    p["tool"] = version_string();
    p["command"] = command;
    p["seed"] = seed;
    p["config"] = std::move(config);
    return p;
}

void write_text(const fs::path& file, const std::string& text) {
    fs::create_directories(file.parent_path().empty() ? fs::path(".") : file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out << text;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::string token;
    for (char ch : csv + ",") {
        if (ch == ',') {
            if (!token.empty())
                out.push_back(std::stod(token));
            token.clear();
        } else {
            token += ch;
        }
    }
    return out;
}

Construction spec_construction(const Construction& partition, int K, int m,
                               const std::string& crc) {
    CodeSpec spec = make_code_spec(partition.spec.N, K, m, crc);
    return construction_from_frozen(spec, partition.frozen_set);
}

// ---------------------------------------------------------------- baseline

struct BaselineOpts {
    std::string method = "ga";
    int N = 64, K = 32, m = 0;
    std::string crc = "0x3";
    double gamma = 2.0;
    double epsilon = -1.0; // <0: derive from gamma
    std::string ga_finit = "linear";
    std::string out = ".";
    std::uint64_t seed = 1;
};

int run_baseline(const BaselineOpts& o) {
    ConstructionOps ops;
    double eps_used = 0.0;
    if (o.method == "ga") {
        ops = ga_ops(SnrDb{o.gamma},
                     o.ga_finit == "db" ? GaInitMode::kDb : GaInitMode::kLinear);
    } else if (o.method == "bhatt") {
        eps_used = o.epsilon >= 0.0 ? o.epsilon : bhattacharyya_param_from_snr(SnrDb{o.gamma});
        ops = bhattacharyya_ops(eps_used);
    } else {
        throw std::invalid_argument("baseline: --method must be ga or bhatt");
    }
    Construction partition = run_abstract_construction(o.N, o.K, ops, SnrDb{o.gamma});
    Construction c = spec_construction(partition, o.K, o.m, o.crc);

    ordered_json cfg{{"method", o.method}, {"N", o.N},         {"K", o.K},
                     {"m", o.m},           {"crc", o.crc},     {"gamma", o.gamma},
                     {"epsilon", eps_used}, {"ga_finit", o.ga_finit}};
    ordered_json prov = provenance_base("baseline", o.seed, cfg);
    fs::path file = fs::path(o.out) / "construction.json";
    fs::create_directories(o.out);
    save_construction(c, file, prov.dump());
    std::cout << "wrote " << file.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- construct

struct ConstructOpts {
    std::string checkpoint;
    int N = 64, K = 32, m = 4;
    std::string crc = "0x3";
    double gamma = 2.0;
    bool ns = false;
    std::string ns_offsets = "0,0.2,-0.2,0.4,-0.4";
    int L = 4;
    std::uint64_t ns_max_errors = 500;
    std::uint64_t ns_max_frames = 200'000;
    int workers = 1;
    std::uint64_t seed = 1;
    std::string out = ".";
};

int run_construct(const ConstructOpts& o) {
    ImpParams params = load_checkpoint(o.checkpoint);
    const std::string ckpt_hash = checkpoint_hash(o.checkpoint);
    CodeSpec spec = make_code_spec(o.N, o.K, o.m, o.crc);

    ordered_json cfg{{"checkpoint", o.checkpoint},
                     {"N", o.N},
                     {"K", o.K},
                     {"m", o.m},
                     {"crc", o.crc},
                     {"gamma", o.gamma},
                     {"ns", o.ns},
                     {"ns_offsets", o.ns_offsets},
                     {"L", o.L},
                     {"ns_max_errors", o.ns_max_errors},
                     {"ns_max_frames", o.ns_max_frames}};
    // workers is an execution resource: results are worker-count invariant,
    // so it stays out of the provenance config
    ordered_json prov = provenance_base("construct", o.seed, cfg);
    prov["checkpoint_hash"] = ckpt_hash;
    prov["gamma_db"] = o.gamma;

    fs::create_directories(o.out);
    fs::path file = fs::path(o.out) / "construction.json";

    if (!o.ns) {
        ConstructTrace trace;
        Construction c = construct_imp(spec, SnrDb{o.gamma}, params, &trace);
        prov["theta_schedule"] = trace.theta_used;
        save_construction(c, file, prov.dump());
        std::cout << "wrote " << file.string() << "\n";
        return 0;
    }

    StopRule rule = StopRule::training(o.ns_max_errors, o.ns_max_frames);
    NsResult res = neighborhood_search(spec, SnrDb{o.gamma}, params, parse_double_list(o.ns_offsets),
                                       o.L, rule, o.seed, o.workers);
    ConstructTrace trace;
    construct_imp(spec, SnrDb{o.gamma + res.best_offset_db}, params, &trace);
    prov["theta_schedule"] = trace.theta_used;
    prov["ns_best_offset_db"] = res.best_offset_db;
    save_construction(res.best, file, prov.dump());

    ordered_json report;
    report["provenance"] = prov;
    report["candidates"] = ordered_json::array();
    for (const NsCandidate& cand : res.candidates) {
        ordered_json cj{{"offset_db", cand.offset_db},
                        {"duplicate", cand.duplicate},
                        {"info_set", cand.construction.info_set}};
        if (cand.has_fer) {
            cj["fer"] = cand.fer.fer;
            cj["frames"] = cand.fer.frames;
            cj["errors"] = cand.fer.errors;
        }
        report["candidates"].push_back(std::move(cj));
    }
    report["best_offset_db"] = res.best_offset_db;
    write_text(fs::path(o.out) / "ns_report.json", report.dump(2) + "\n");
    std::cout << "wrote " << file.string() << " (best offset " << res.best_offset_db << " dB)\n";
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainOpts {
    TrainConfig cfg;
    std::string init_checkpoint; // optional warm start
    std::string out = ".";
};

ordered_json train_config_json(const TrainConfig& c) {
    return ordered_json{{"N", c.N},
                        {"K", c.K},
                        {"m", c.m},
                        {"L", c.L},
                        {"crc", c.crc_hex},
                        {"gamma_min", c.gamma_min},
                        {"gamma_max", c.gamma_max},
                        {"episodes", c.episodes},
                        {"eps_init", c.eps_init},
                        {"eps_decay", c.eps_decay},
                        {"beta_init", c.beta_init},
                        {"beta_ramp_episodes", c.beta_ramp_episodes},
                        {"reward_max_errors", c.reward_max_errors},
                        {"reward_max_frames", c.reward_max_frames},
                        {"cache_step_fer", c.cache_step_fer},
                        {"replay_capacity", c.replay_capacity},
                        {"target_update_episodes", c.target_update_episodes},
                        {"minibatch", c.minibatch},
                        {"learning_rate", c.learning_rate},
                        {"hyper",
                         ordered_json{{"M", c.hyper.M},
                                      {"d_emb", c.hyper.d_emb},
                                      {"d_init", c.hyper.d_init},
                                      {"d_hidden", c.hyper.d_hidden},
                                      {"d_pool", c.hyper.d_pool},
                                      {"post_hidden", c.hyper.post_hidden}}}};
}

ordered_json episode_record(const EpisodeLog& log) {
    return ordered_json{{"episode", log.episode},          {"return", log.episode_return},
                        {"mean_return", log.mean_return},  {"epsilon", log.epsilon},
                        {"beta", log.beta},                {"gamma_db", log.gamma_db},
                        {"env_steps", log.env_steps}};
}

int run_train_common(const char* name, const TrainOpts& o, std::optional<double> fixed_gamma,
                     int episodes_override = -1) {
    TrainConfig cfg = o.cfg;
    if (episodes_override >= 0)
        cfg.episodes = episodes_override;

    ordered_json cfg_json = train_config_json(cfg);
    if (fixed_gamma)
        cfg_json["fixed_gamma"] = *fixed_gamma;
    if (!o.init_checkpoint.empty())
        cfg_json["init_checkpoint_hash"] = checkpoint_hash(o.init_checkpoint);
    ordered_json prov = provenance_base(name, cfg.seed, cfg_json);

    fs::create_directories(o.out);
    std::ofstream log_file(fs::path(o.out) / "train_log.jsonl", std::ios::binary);
    log_file << ordered_json{{"provenance", prov}}.dump() << "\n";
    TrainCallback cb = [&](const EpisodeLog& log) {
        ordered_json rec = episode_record(log);
        log_file << rec.dump() << "\n";
        rec["wall_s"] = log.wall_s; // wall time only on the console stream
        std::cout << rec.dump() << std::endl;
    };

    std::optional<ImpParams> init;
    if (!o.init_checkpoint.empty())
        init = load_checkpoint(o.init_checkpoint);

    TrainResult result =
        dqn_train(cfg, nullptr, cb, init ? &*init : nullptr, fixed_gamma);

    fs::path ckpt = fs::path(o.out) / "checkpoint.impckpt";
    save_checkpoint(result.params, ckpt, prov.dump());

    ordered_json summary;
    summary["provenance"] = prov;
    summary["episodes"] = cfg.episodes;
    summary["checkpoint"] = "checkpoint.impckpt";
    summary["checkpoint_hash"] = checkpoint_hash(ckpt);
    if (!result.logs.empty()) {
        summary["final_mean_return"] = result.logs.back().mean_return;
        summary["final_epsilon"] = result.logs.back().epsilon;
    }
    write_text(fs::path(o.out) / "train_summary.json", summary.dump(2) + "\n");
    std::cout << "wrote " << ckpt.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOpts {
    std::vector<std::string> constructions;
    std::vector<std::string> labels;
    std::string snrs = "2.0";
    int L = 4;
    std::uint64_t min_errors = 500;
    std::uint64_t min_frames = 1'000'000;
    std::uint64_t max_frames = 4'000'000'000ull;
    int workers = 1;
    std::uint64_t seed = 1;
    std::string out = ".";
};

int run_evaluate(const char* name, const EvaluateOpts& o, const std::string& csv_name) {
    if (o.constructions.empty())
        throw std::invalid_argument("at least one --construction is required");
    if (!o.labels.empty() && o.labels.size() != o.constructions.size())
        throw std::invalid_argument("--label count must match --construction count");

    std::vector<std::pair<std::string, Construction>> entries;
    for (std::size_t i = 0; i < o.constructions.size(); ++i) {
        std::string label =
            i < o.labels.size() ? o.labels[i] : fs::path(o.constructions[i]).stem().string();
        entries.emplace_back(std::move(label), load_construction(o.constructions[i]));
    }
    StopRule rule = StopRule::evaluation(o.min_errors, o.min_frames, o.max_frames);
    std::vector<SweepRow> rows =
        sweep(entries, parse_double_list(o.snrs), o.L, rule, o.seed, o.workers);

    ordered_json cfg{{"constructions", o.constructions},
                     {"snrs", o.snrs},
                     {"L", o.L},
                     {"min_errors", o.min_errors},
                     {"min_frames", o.min_frames},
                     {"max_frames", o.max_frames}};
    ordered_json prov = provenance_base(name, o.seed, cfg);
    std::vector<std::string> header_lines = {
        "tool: " + version_string(),
        "command: " + std::string(name),
        "seed: " + std::to_string(o.seed),
        "config: " + cfg.dump(),
    };
    fs::create_directories(o.out);
    fs::path file = fs::path(o.out) / csv_name;
    write_text(file, sweep_to_csv(rows, header_lines));
    std::cout << "wrote " << file.string() << " (" << rows.size() << " rows)\n";
    return 0;
}

// ---------------------------------------------------------------- verify / gradcheck

struct VerifyOpts {
    int N = 8, K = 4;
    std::string ops = "bhatt";
    double gamma = 2.0;
    double epsilon = -1.0;
};

int run_verify_claim1(const VerifyOpts& o) {
    ConstructionOps ops;
    double tol = 0.0;
    if (o.ops == "ga") {
        ops = ga_ops(SnrDb{o.gamma});
        tol = 1e-9;
    } else if (o.ops == "bhatt") {
        const double eps =
            o.epsilon >= 0.0 ? o.epsilon : bhattacharyya_param_from_snr(SnrDb{o.gamma});
        ops = bhattacharyya_ops(eps);
    } else {
        throw std::invalid_argument("verify-claim1: --ops must be ga or bhatt");
    }
    Claim1Report report = verify_claim1(o.N, o.K, ops, SnrDb{o.gamma}, tol);
    std::cout << (report.ok ? "PASS" : "FAIL") << ": N=" << o.N << " K=" << o.K
              << " ops=" << o.ops << " gamma=" << o.gamma << "\n"
              << report.diagnostics << "\n";
    return report.ok ? 0 : 1;
}

struct GradcheckOpts {
    int N = 8;
    int seeds = 5;
    double step = 1e-4;
    double tolerance = 1e-4;
};

int run_gradcheck(const GradcheckOpts& o) {
    ImpHyper hyper; // full-size model
    double worst = 0.0;
    std::string worst_tensor;
    for (int seed = 1; seed <= o.seeds; ++seed) {
        ImpParams params = imp_init_params(hyper, static_cast<std::uint64_t>(seed));
        PccmpGraph graph = build_pccmp(o.N, SnrDb{1.0 + 0.5 * seed});
        for (int j = 0; j < o.N / 4; ++j)
            graph.freeze(j * 3 % o.N);
        Rng rng(static_cast<std::uint64_t>(seed) + 1000);
        Eigen::VectorXd dz(o.N);
        for (int i = 0; i < o.N; ++i)
            dz(i) = rng.gaussian();
        const double theta = 0.3 + 0.1 * seed;

        ForwardCache cache;
        imp_score(graph, params, theta, &cache);
        ImpParams analytic = imp_backward(graph, params, dz, cache);

        std::vector<std::pair<std::string, Eigen::Ref<Eigen::MatrixXd>>> tensors, grads;
        visit_tensors(params, [&](const std::string& n, Eigen::Ref<Eigen::MatrixXd> t) {
            tensors.emplace_back(n, t);
        });
        visit_tensors(analytic, [&](const std::string& n, Eigen::Ref<Eigen::MatrixXd> t) {
            grads.emplace_back(n, t);
        });
        auto fd_at = [&](double* slot, double h) {
            const double orig = *slot;
            *slot = orig + h;
            const double lp = dz.dot(imp_score(graph, params, theta).z);
            *slot = orig - h;
            const double lm = dz.dot(imp_score(graph, params, theta).z);
            *slot = orig;
            return (lp - lm) / (2.0 * h);
        };
        auto rel_err = [](double fd, double an) {
            return std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-5});
        };
        for (std::size_t ti = 0; ti < tensors.size(); ++ti) {
            double tensor_worst = 0.0;
            double* data = tensors[ti].second.data();
            const double* gdata = grads[ti].second.data();
            const Eigen::Index count = tensors[ti].second.size();
            for (Eigen::Index i = 0; i < count; ++i) {
                double rel = rel_err(fd_at(data + i, o.step), gdata[i]);
                // a step that flips a ReLU/normalization branch invalidates the
                // central difference; refine before judging the gradient
                if (rel >= o.tolerance) {
                    rel = rel_err(fd_at(data + i, o.step * 0.1), gdata[i]);
                    if (rel >= o.tolerance)
                        rel = rel_err(fd_at(data + i, o.step * 0.01), gdata[i]);
                }
                if (rel > tensor_worst)
                    tensor_worst = rel;
            }
            std::printf("seed %d %-14s max_rel=%.3e\n", seed, tensors[ti].first.c_str(),
                        tensor_worst);
            if (tensor_worst > worst) {
                worst = tensor_worst;
                worst_tensor = tensors[ti].first;
            }
        }
    }
    std::printf("gradcheck worst relative error %.3e (%s), tolerance %.1e: %s\n", worst,
                worst_tensor.c_str(), o.tolerance, worst < o.tolerance ? "PASS" : "FAIL");
    return worst < o.tolerance ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{version_string() + " - polar-code construction laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (defaults < config < flags)");
    };

    BaselineOpts bo;
    CLI::App* baseline = app.add_subcommand("baseline", "classical construction baselines");
    add_config(baseline);
    baseline->add_option("--method", bo.method, "ga | bhatt")->capture_default_str();
    baseline->add_option("--N", bo.N)->capture_default_str();
    baseline->add_option("--K", bo.K)->capture_default_str();
    baseline->add_option("--m", bo.m)->capture_default_str();
    baseline->add_option("--crc", bo.crc, "CRC polynomial, hexadecimal convention")
        ->capture_default_str();
    baseline->add_option("--gamma", bo.gamma, "design SNR Es/N0 in dB")->capture_default_str();
    baseline->add_option("--epsilon", bo.epsilon, "erasure parameter for bhatt (else from gamma)");
    baseline->add_option("--ga-finit", bo.ga_finit, "linear | db seed for the GA recursion")
        ->capture_default_str();
    baseline->add_option("--seed", bo.seed)->capture_default_str();
    baseline->add_option("--out", bo.out, "output directory")->capture_default_str();

    ConstructOpts co;
    CLI::App* construct = app.add_subcommand("construct", "model-driven construction");
    add_config(construct);
    construct->add_option("--checkpoint", co.checkpoint)->required();
    construct->add_option("--N", co.N)->capture_default_str();
    construct->add_option("--K", co.K)->capture_default_str();
    construct->add_option("--m", co.m)->capture_default_str();
    construct->add_option("--crc", co.crc)->capture_default_str();
    construct->add_option("--gamma", co.gamma, "evaluation SNR in dB")->capture_default_str();
    construct->add_flag("--ns", co.ns, "neighborhood search over input SNR offsets");
    construct->add_option("--ns-offsets", co.ns_offsets)->capture_default_str();
    construct->add_option("--L", co.L, "list size for NS evaluation")->capture_default_str();
    construct->add_option("--ns-max-errors", co.ns_max_errors)->capture_default_str();
    construct->add_option("--ns-max-frames", co.ns_max_frames)->capture_default_str();
    construct->add_option("--workers", co.workers)->capture_default_str();
    construct->add_option("--seed", co.seed)->capture_default_str();
    construct->add_option("--out", co.out)->capture_default_str();

    TrainOpts to;
    CLI::App* train = app.add_subcommand("train", "deep-Q training of the scoring model");
    add_config(train);
    auto add_train_flags = [&](CLI::App* cmd, TrainOpts& t) {
        cmd->add_option("--N", t.cfg.N)->capture_default_str();
        cmd->add_option("--K", t.cfg.K)->capture_default_str();
        cmd->add_option("--m", t.cfg.m)->capture_default_str();
        cmd->add_option("--crc", t.cfg.crc_hex)->capture_default_str();
        cmd->add_option("--L", t.cfg.L)->capture_default_str();
        cmd->add_option("--gamma-min", t.cfg.gamma_min)->capture_default_str();
        cmd->add_option("--gamma-max", t.cfg.gamma_max)->capture_default_str();
        cmd->add_option("--episodes", t.cfg.episodes)->capture_default_str();
        cmd->add_option("--eps-init", t.cfg.eps_init)->capture_default_str();
        cmd->add_option("--eps-decay", t.cfg.eps_decay)->capture_default_str();
        cmd->add_option("--beta-init", t.cfg.beta_init)->capture_default_str();
        cmd->add_option("--beta-ramp-episodes", t.cfg.beta_ramp_episodes)->capture_default_str();
        cmd->add_option("--reward-max-errors", t.cfg.reward_max_errors)->capture_default_str();
        cmd->add_option("--reward-max-frames", t.cfg.reward_max_frames)->capture_default_str();
        cmd->add_flag("--cache-step-fer", t.cfg.cache_step_fer,
                      "reuse the previous step's FER estimate for P(I_t)");
        cmd->add_option("--replay-capacity", t.cfg.replay_capacity)->capture_default_str();
        cmd->add_option("--target-update-episodes", t.cfg.target_update_episodes)
            ->capture_default_str();
        cmd->add_option("--minibatch", t.cfg.minibatch)->capture_default_str();
        cmd->add_option("--learning-rate", t.cfg.learning_rate)->capture_default_str();
        cmd->add_option("--seed", t.cfg.seed)->capture_default_str();
        cmd->add_option("--workers", t.cfg.workers)->capture_default_str();
        cmd->add_option("--log-every", t.cfg.log_every)->capture_default_str();
        cmd->add_option("--M", t.cfg.hyper.M)->capture_default_str();
        cmd->add_option("--d-emb", t.cfg.hyper.d_emb)->capture_default_str();
        cmd->add_option("--d-init", t.cfg.hyper.d_init)->capture_default_str();
        cmd->add_option("--d-hidden", t.cfg.hyper.d_hidden)->capture_default_str();
        cmd->add_option("--d-pool", t.cfg.hyper.d_pool)->capture_default_str();
        cmd->add_option("--post-hidden", t.cfg.hyper.post_hidden)->capture_default_str();
        cmd->add_option("--out", t.out)->capture_default_str();
    };
    add_train_flags(train, to);
    train->add_option("--init-checkpoint", to.init_checkpoint, "warm-start parameters");

    TrainOpts fo;
    double ft_gamma = 2.0;
    int ft_episodes = 100;
    CLI::App* finetune = app.add_subcommand("fine-tune", "continue training at a fixed SNR");
    add_config(finetune);
    add_train_flags(finetune, fo);
    finetune->add_option("--checkpoint", fo.init_checkpoint, "starting parameters")->required();
    finetune->add_option("--gamma", ft_gamma, "fixed design SNR in dB")->required();
    finetune->add_option("--ft-episodes", ft_episodes, "fine-tuning episodes")
        ->capture_default_str();

    EvaluateOpts eo;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Monte Carlo FER of constructions");
    add_config(evaluate);
    auto add_eval_flags = [&](CLI::App* cmd, EvaluateOpts& e) {
        cmd->add_option("--construction", e.constructions, "construction JSON file(s)")
            ->required();
        cmd->add_option("--label", e.labels, "row label(s), default: file stem");
        cmd->add_option("--snrs", e.snrs, "comma-separated SNR list in dB")->capture_default_str();
        cmd->add_option("--L", e.L)->capture_default_str();
        cmd->add_option("--min-errors", e.min_errors)->capture_default_str();
        cmd->add_option("--min-frames", e.min_frames)->capture_default_str();
        cmd->add_option("--max-frames", e.max_frames)->capture_default_str();
        cmd->add_option("--workers", e.workers)->capture_default_str();
        cmd->add_option("--seed", e.seed)->capture_default_str();
        cmd->add_option("--out", e.out)->capture_default_str();
    };
    add_eval_flags(evaluate, eo);

    EvaluateOpts cmpo;
    CLI::App* compare = app.add_subcommand("compare", "FER sweep over several constructions");
    add_config(compare);
    add_eval_flags(compare, cmpo);

    VerifyOpts vo;
    CLI::App* verify = app.add_subcommand("verify-claim1",
                                          "check the max-pooling message-passing equivalence");
    add_config(verify);
    verify->add_option("--N", vo.N)->capture_default_str();
    verify->add_option("--K", vo.K)->capture_default_str();
    verify->add_option("--ops", vo.ops, "ga | bhatt")->capture_default_str();
    verify->add_option("--gamma", vo.gamma)->capture_default_str();
    verify->add_option("--epsilon", vo.epsilon, "erasure parameter for bhatt");

    GradcheckOpts go;
    CLI::App* gradcheck = app.add_subcommand("gradcheck",
                                             "finite-difference check of the model gradients");
    add_config(gradcheck);
    gradcheck->add_option("--N", go.N)->capture_default_str();
    gradcheck->add_option("--seeds", go.seeds)->capture_default_str();
    gradcheck->add_option("--step", go.step)->capture_default_str();
    gradcheck->add_option("--tolerance", go.tolerance)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (CLI::App* cmd : app.get_subcommands())
            apply_json_config(cmd);
        if (*baseline)
            return run_baseline(bo);
        if (*construct)
            return run_construct(co);
        if (*train)
            return run_train_common("train", to, std::nullopt);
        if (*finetune)
            return run_train_common("fine-tune", fo, ft_gamma, ft_episodes);
        if (*evaluate)
            return run_evaluate("evaluate", eo, "results.csv");
        if (*compare)
            return run_evaluate("compare", cmpo, "compare.csv");
        if (*verify)
            return run_verify_claim1(vo);
        if (*gradcheck)
            return run_gradcheck(go);
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
