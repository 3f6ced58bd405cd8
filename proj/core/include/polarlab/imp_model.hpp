#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "polarlab/pccmp.hpp"

namespace polarlab {

/// Message types on the construction graph. Check-to-variable and
/// check-to-check messages are mean-aggregated; variable-to-check messages
/// are sum-aggregated so a check node's update scales with its degree.
enum MessageType : int { kC2V = 0, kV2C = 1, kC2C = 2 };
inline constexpr int kNumMessageTypes = 3;

struct ImpHyper {
    int M = 3;
    int d_emb = 28;
    int d_init = 4;
    std::vector<int> d_hidden = {64, 64, 64}; // one entry per iteration
    int d_pool = 1;
    std::vector<int> post_hidden = {128, 128};

    int d0() const { return d_emb + d_init; }
    int dim_at(int i) const { return i == 0 ? d0() : d_hidden[static_cast<std::size_t>(i - 1)]; }
    int d_final() const { return d_hidden.back(); }
    int post_input_dim() const { return d_final() + 2 * d_pool + 1; }
    void validate() const;
};

/// All trainable tensors of the scoring model. The model size depends only
/// on the hyperparameters, never on the graph size, which is what lets one
/// set of weights score graphs of any blocklength.
struct ImpParams {
    ImpHyper hyper;

    Eigen::MatrixXd emb; // d_emb x 3, columns indexed by NodeType (V, I, F)

    // Initial local-message embeddings; one net per node class (variable,
    // check), frozen and non-frozen checks share the check-class net.
    Eigen::VectorXd init_w_v, init_b_v, init_w_c, init_b_c;

    struct Layer {
        Eigen::MatrixXd W[kNumMessageTypes]; // d_{i+1} x 2*d_i
        Eigen::VectorXd b[kNumMessageTypes];
    };
    std::vector<Layer> layers; // M entries

    Eigen::MatrixXd pool_c, pool_v; // d_pool x d_final

    std::vector<Eigen::MatrixXd> post_W; // hidden layers then 1-unit output
    std::vector<Eigen::VectorXd> post_b;
};

/// Zero-initialized parameter struct with the given shapes (gradient buffer).
ImpParams imp_zeros_like(const ImpHyper& hyper);

/// Random initialization: weights and biases uniform in +-1/sqrt(fan_in) of
/// the owning layer, node-type embeddings N(0, 0.1^2). Draw order is fixed,
/// so a seed fully determines the parameters.
ImpParams imp_init_params(const ImpHyper& hyper, std::uint64_t seed);

/// Applies fn(name, tensor) to every trainable tensor in the fixed registry
/// order used by checkpoints, gradient checks, and SGD updates.
template <typename Params, typename Fn>
void visit_tensors(Params& p, Fn&& fn) {
    fn("emb", p.emb);
    fn("init_w_v", p.init_w_v);
    fn("init_b_v", p.init_b_v);
    fn("init_w_c", p.init_w_c);
    fn("init_b_c", p.init_b_c);
    static const char* mt_names[kNumMessageTypes] = {"c2v", "v2c", "c2c"};
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        for (int mt = 0; mt < kNumMessageTypes; ++mt) {
            fn("up" + std::to_string(i) + "_" + mt_names[mt] + "_w", p.layers[i].W[mt]);
            fn("up" + std::to_string(i) + "_" + mt_names[mt] + "_b", p.layers[i].b[mt]);
        }
    }
    fn("pool_c_w", p.pool_c);
    fn("pool_v_w", p.pool_v);
    for (std::size_t l = 0; l < p.post_W.size(); ++l) {
        fn("post" + std::to_string(l) + "_w", p.post_W[l]);
        fn("post" + std::to_string(l) + "_b", p.post_b[l]);
    }
}

std::size_t imp_param_count(const ImpParams& p);
void imp_axpy(ImpParams& dst, const ImpParams& src, double alpha); // dst += alpha * src

/// Node embeddings after i message-passing iterations; columns are nodes.
struct HiddenState {
    Eigen::MatrixXd Hv, Hc;
    int iteration = 0;
};

/// Per-check-node priority metrics plus the budget scalar they were scored
/// with. Higher z = frozen earlier.
struct PriorityVector {
    Eigen::VectorXd z;
    double theta = 0.0;
};

/// Intermediates of one forward pass, kept for the exact backward pass.
struct ForwardCache {
    struct IterCache {
        Eigen::MatrixXd Acv, Avc, Acc; // aggregated in-neighborhoods
        Eigen::MatrixXd Ucv, Uvc, Ucc; // per-message-type updates
        Eigen::MatrixXd Yv, Yc;        // normalized pre-ReLU sums
        Eigen::VectorXd norm_v, norm_c;
    };
    std::vector<Eigen::MatrixXd> Hv, Hc; // levels 0..M (post local aggregation)
    std::vector<IterCache> iters;
    Eigen::VectorXd hbar_v, hbar_c;     // pooled means of the final level
    Eigen::VectorXd htilde_v, htilde_c; // tanh(W_pool * mean)
    Eigen::MatrixXd post_in;
    std::vector<Eigen::MatrixXd> post_acts; // hidden-layer activations
    double theta = 0.0;
    bool valid = false;
};

/// h_u^(0) = [Emb(type); tanh(w * x_u + b)] with the class-specific init net.
HiddenState imp_init_embeddings(const PccmpGraph& graph, const ImpParams& params);

/// Synchronous heterogeneous message passing: per-type aggregation, a
/// GraphSAGE-style affine update per type, then the normalized-ReLU local
/// aggregation ReLU(s/||s||_2) (zero vector when ||s|| = 0).
HiddenState imp_message_passing(const PccmpGraph& graph, const HiddenState& h0,
                                const ImpParams& params, int iterations,
                                ForwardCache* cache = nullptr);

/// Full scoring pass: init, M message-passing iterations, mean-pool + tanh
/// global features, and the per-check-node MLP on [h_c; h~v; h~c; theta].
PriorityVector imp_score(const PccmpGraph& graph, const ImpParams& params, double theta,
                         ForwardCache* cache = nullptr);

/// Exact reverse-mode gradients of sum_j dz[j] * z_j with respect to every
/// parameter. Requires the cache of the matching forward pass.
ImpParams imp_backward(const PccmpGraph& graph, const ImpParams& params,
                       const Eigen::VectorXd& dz, const ForwardCache& cache);

// --- checkpoint container ---------------------------------------------------
// Self-describing file: 8-byte magic "IMPCKPT1", LE u64 header length, JSON
// header (format version, hyperparameters, optional provenance object,
// tensor names/shapes/offsets), then a little-endian float32 payload in
// registry order, column-major.

void save_checkpoint(const ImpParams& params, const std::filesystem::path& file,
                     const std::string& provenance_json = "");
ImpParams load_checkpoint(const std::filesystem::path& file);

/// FNV-1a fingerprint of a checkpoint file, for provenance blocks.
std::string checkpoint_hash(const std::filesystem::path& file);

} // namespace polarlab
