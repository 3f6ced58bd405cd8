#include "polarlab/imp_model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "polarlab/common.hpp"
#include "polarlab/rng.hpp"

namespace polarlab {

void ImpHyper::validate() const {
    if (M < 1)
        throw std::invalid_argument("ImpHyper: M must be >= 1");
    if (static_cast<int>(d_hidden.size()) != M)
        throw std::invalid_argument("ImpHyper: d_hidden must have one entry per iteration");
    if (d_emb < 1 || d_init < 1 || d_pool < 1)
        throw std::invalid_argument("ImpHyper: dimensions must be positive");
    for (int d : d_hidden)
        if (d < 1)
            throw std::invalid_argument("ImpHyper: hidden dimensions must be positive");
    for (int d : post_hidden)
        if (d < 1)
            throw std::invalid_argument("ImpHyper: MLP dimensions must be positive");
}

ImpParams imp_zeros_like(const ImpHyper& hyper) {
    hyper.validate();
    ImpParams p;
    p.hyper = hyper;
    p.emb = Eigen::MatrixXd::Zero(hyper.d_emb, 3);
    p.init_w_v = Eigen::VectorXd::Zero(hyper.d_init);
    p.init_b_v = Eigen::VectorXd::Zero(hyper.d_init);
    p.init_w_c = Eigen::VectorXd::Zero(hyper.d_init);
    p.init_b_c = Eigen::VectorXd::Zero(hyper.d_init);
    p.layers.resize(static_cast<std::size_t>(hyper.M));
    for (int i = 0; i < hyper.M; ++i) {
        const int din = hyper.dim_at(i);
        const int dout = hyper.dim_at(i + 1);
        for (int mt = 0; mt < kNumMessageTypes; ++mt) {
            p.layers[static_cast<std::size_t>(i)].W[mt] = Eigen::MatrixXd::Zero(dout, 2 * din);
            p.layers[static_cast<std::size_t>(i)].b[mt] = Eigen::VectorXd::Zero(dout);
        }
    }
    p.pool_c = Eigen::MatrixXd::Zero(hyper.d_pool, hyper.d_final());
    p.pool_v = Eigen::MatrixXd::Zero(hyper.d_pool, hyper.d_final());
    int in_dim = hyper.post_input_dim();
    for (int width : hyper.post_hidden) {
        p.post_W.push_back(Eigen::MatrixXd::Zero(width, in_dim));
        p.post_b.push_back(Eigen::VectorXd::Zero(width));
        in_dim = width;
    }
    p.post_W.push_back(Eigen::MatrixXd::Zero(1, in_dim));
    p.post_b.push_back(Eigen::VectorXd::Zero(1));
    return p;
}

ImpParams imp_init_params(const ImpHyper& hyper, std::uint64_t seed) {
    ImpParams p = imp_zeros_like(hyper);
    Rng rng(seed);
    visit_tensors(p, [&](const std::string& name, Eigen::Ref<Eigen::MatrixXd> t) {
        if (name == "emb") {
            for (Eigen::Index c = 0; c < t.cols(); ++c)
                for (Eigen::Index r = 0; r < t.rows(); ++r)
                    t(r, c) = 0.1 * rng.gaussian();
            return;
        }
        const double bound = 1.0 / std::sqrt(static_cast<double>(t.cols()));
        for (Eigen::Index c = 0; c < t.cols(); ++c)
            for (Eigen::Index r = 0; r < t.rows(); ++r)
                t(r, c) = rng.uniform(-bound, bound);
    });
    return p;
}

std::size_t imp_param_count(const ImpParams& p) {
    std::size_t total = 0;
    visit_tensors(const_cast<ImpParams&>(p),
                  [&](const std::string&, Eigen::Ref<Eigen::MatrixXd> t) {
                      total += static_cast<std::size_t>(t.size());
                  });
    return total;
}

void imp_axpy(ImpParams& dst, const ImpParams& src, double alpha) {
    std::vector<Eigen::Ref<Eigen::MatrixXd>> dtensors;
    visit_tensors(dst, [&](const std::string&, Eigen::Ref<Eigen::MatrixXd> t) {
        dtensors.emplace_back(t);
    });
    std::size_t idx = 0;
    visit_tensors(const_cast<ImpParams&>(src),
                  [&](const std::string&, Eigen::Ref<Eigen::MatrixXd> t) {
                      dtensors[idx++] += alpha * t;
                  });
}

namespace {

Eigen::VectorXd tanh_vec(const Eigen::VectorXd& v) { return v.array().tanh().matrix(); }

/// Normalized-ReLU local aggregation applied column-wise, recording the
/// normalized pre-activation and the norms for the backward pass.
void normalize_relu(const Eigen::MatrixXd& S, Eigen::MatrixXd& H, Eigen::MatrixXd& Y,
                    Eigen::VectorXd& norms) {
    const Eigen::Index n = S.cols();
    H.resize(S.rows(), n);
    Y.resize(S.rows(), n);
    norms.resize(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const double r = S.col(c).norm();
        norms(c) = r;
        if (r == 0.0) {
            Y.col(c).setZero();
            H.col(c).setZero();
        } else {
            Y.col(c) = S.col(c) / r;
            H.col(c) = Y.col(c).cwiseMax(0.0);
        }
    }
}

void normalize_relu_backward(const Eigen::MatrixXd& dH, const Eigen::MatrixXd& Y,
                             const Eigen::VectorXd& norms, Eigen::MatrixXd& dS) {
    dS.resize(Y.rows(), Y.cols());
    Eigen::VectorXd dy(Y.rows());
    for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        const double r = norms(c);
        if (r == 0.0) {
            dS.col(c).setZero();
            continue;
        }
        dy = (Y.col(c).array() > 0.0).select(dH.col(c), 0.0);
        const double proj = Y.col(c).dot(dy);
        dS.col(c) = (dy - proj * Y.col(c)) / r;
    }
}

void aggregate(const PccmpGraph& graph, const Eigen::MatrixXd& Hv, const Eigen::MatrixXd& Hc,
               Eigen::MatrixXd& Acv, Eigen::MatrixXd& Avc, Eigen::MatrixXd& Acc) {
    const PccmpStructure& s = graph.structure();
    const int N = s.N;
    const Eigen::Index d = Hv.rows();
    Acv.setZero(d, N);
    Avc.setZero(d, N);
    Acc.setZero(d, N);
    for (int i = 0; i < N; ++i) {
        const auto& src = s.v_in_checks[static_cast<std::size_t>(i)];
        for (int j : src)
            Acv.col(i) += Hc.col(j);
        Acv.col(i) /= static_cast<double>(src.size());
    }
    for (int j = 0; j < N; ++j)
        for (int i : s.c_in_vars[static_cast<std::size_t>(j)])
            Avc.col(j) += Hv.col(i);
    Eigen::VectorXd running = Eigen::VectorXd::Zero(d);
    for (int j = 1; j < N; ++j) {
        running += Hc.col(j - 1);
        Acc.col(j) = running / static_cast<double>(j);
    }
}

void aggregate_backward(const PccmpGraph& graph, const Eigen::MatrixXd& dAcv,
                        const Eigen::MatrixXd& dAvc, const Eigen::MatrixXd& dAcc,
                        Eigen::MatrixXd& dHv, Eigen::MatrixXd& dHc) {
    const PccmpStructure& s = graph.structure();
    const int N = s.N;
    for (int i = 0; i < N; ++i) {
        const auto& src = s.v_in_checks[static_cast<std::size_t>(i)];
        const double inv = 1.0 / static_cast<double>(src.size());
        for (int j : src)
            dHc.col(j) += inv * dAcv.col(i);
    }
    for (int j = 0; j < N; ++j)
        for (int i : s.c_in_vars[static_cast<std::size_t>(j)])
            dHv.col(i) += dAvc.col(j);
    Eigen::VectorXd tail = Eigen::VectorXd::Zero(dAcc.rows());
    for (int k = N - 2; k >= 0; --k) {
        tail += dAcc.col(k + 1) / static_cast<double>(k + 1);
        dHc.col(k) += tail;
    }
}

} // namespace

HiddenState imp_init_embeddings(const PccmpGraph& graph, const ImpParams& params) {
    const ImpHyper& h = params.hyper;
    h.validate();
    if (params.emb.rows() != h.d_emb || params.init_w_v.size() != h.d_init)
        throw std::invalid_argument("imp_init_embeddings: parameter shapes do not match hyper");
    const int N = graph.N();
    HiddenState state;
    state.iteration = 0;
    state.Hv.resize(h.d0(), N);
    state.Hc.resize(h.d0(), N);
    for (int j = 0; j < N; ++j) {
        state.Hv.col(j).head(h.d_emb) = params.emb.col(static_cast<int>(NodeType::V));
        state.Hv.col(j).tail(h.d_init) =
            tanh_vec(params.init_w_v * graph.x_variable(j) + params.init_b_v);
        state.Hc.col(j).head(h.d_emb) = params.emb.col(static_cast<int>(graph.check_type(j)));
        state.Hc.col(j).tail(h.d_init) =
            tanh_vec(params.init_w_c * graph.x_check(j) + params.init_b_c);
    }
    return state;
}

HiddenState imp_message_passing(const PccmpGraph& graph, const HiddenState& h0,
                                const ImpParams& params, int iterations, ForwardCache* cache) {
    if (iterations < 1 || iterations > params.hyper.M)
        throw std::invalid_argument("imp_message_passing: iterations must be in [1, M]");
    const int N = graph.N();
    if (h0.Hv.rows() != params.hyper.d0() || h0.Hv.cols() != N)
        throw std::invalid_argument("imp_message_passing: bad input embedding shape");

    if (cache) {
        cache->Hv.assign(1, h0.Hv);
        cache->Hc.assign(1, h0.Hc);
        cache->iters.resize(static_cast<std::size_t>(iterations));
    }

    Eigen::MatrixXd Hv = h0.Hv, Hc = h0.Hc;
    Eigen::MatrixXd Acv, Avc, Acc, X, Sv, Sc, Yv, Yc, nextHv, nextHc;
    Eigen::VectorXd norm_v, norm_c;
    for (int it = 0; it < iterations; ++it) {
        const ImpParams::Layer& layer = params.layers[static_cast<std::size_t>(it)];
        const Eigen::Index din = Hv.rows();
        aggregate(graph, Hv, Hc, Acv, Avc, Acc);

        X.resize(2 * din, N);
        X.topRows(din) = Hv;
        X.bottomRows(din) = Acv;
        Eigen::MatrixXd Ucv = (layer.W[kC2V] * X).colwise() + layer.b[kC2V];
        X.topRows(din) = Hc;
        X.bottomRows(din) = Avc;
        Eigen::MatrixXd Uvc = (layer.W[kV2C] * X).colwise() + layer.b[kV2C];
        X.bottomRows(din) = Acc;
        Eigen::MatrixXd Ucc = (layer.W[kC2C] * X).colwise() + layer.b[kC2C];

        Sv = Ucv; // variables receive only c2v messages
        Sc = Uvc;
        Sc.rightCols(N - 1) += Ucc.rightCols(N - 1); // c_0 has no preceding check

        normalize_relu(Sv, nextHv, Yv, norm_v);
        normalize_relu(Sc, nextHc, Yc, norm_c);

        if (cache) {
            ForwardCache::IterCache& ic = cache->iters[static_cast<std::size_t>(it)];
            ic.Acv = Acv;
            ic.Avc = Avc;
            ic.Acc = Acc;
            ic.Ucv = std::move(Ucv);
            ic.Uvc = std::move(Uvc);
            ic.Ucc = std::move(Ucc);
            ic.Yv = Yv;
            ic.Yc = Yc;
            ic.norm_v = norm_v;
            ic.norm_c = norm_c;
            cache->Hv.push_back(nextHv);
            cache->Hc.push_back(nextHc);
        }
        Hv = nextHv;
        Hc = nextHc;
    }
    HiddenState out;
    out.Hv = std::move(Hv);
    out.Hc = std::move(Hc);
    out.iteration = iterations;
    return out;
}

PriorityVector imp_score(const PccmpGraph& graph, const ImpParams& params, double theta,
                         ForwardCache* cache) {
    const ImpHyper& h = params.hyper;
    const int N = graph.N();
    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    fc.valid = false;
    fc.theta = theta;

    HiddenState h0 = imp_init_embeddings(graph, params);
    HiddenState hm = imp_message_passing(graph, h0, params, h.M, &fc);

    fc.hbar_v = hm.Hv.rowwise().mean();
    fc.hbar_c = hm.Hc.rowwise().mean();
    fc.htilde_v = tanh_vec(params.pool_v * fc.hbar_v);
    fc.htilde_c = tanh_vec(params.pool_c * fc.hbar_c);

    fc.post_in.resize(h.post_input_dim(), N);
    fc.post_in.topRows(h.d_final()) = hm.Hc;
    for (int j = 0; j < N; ++j) {
        fc.post_in.col(j).segment(h.d_final(), h.d_pool) = fc.htilde_v;
        fc.post_in.col(j).segment(h.d_final() + h.d_pool, h.d_pool) = fc.htilde_c;
    }
    fc.post_in.row(h.post_input_dim() - 1).setConstant(theta);

    fc.post_acts.clear();
    const Eigen::MatrixXd* prev = &fc.post_in;
    for (std::size_t l = 0; l + 1 < params.post_W.size(); ++l) {
        fc.post_acts.push_back(
            ((params.post_W[l] * *prev).colwise() + params.post_b[l]).cwiseMax(0.0));
        prev = &fc.post_acts.back();
    }
    Eigen::MatrixXd zrow = (params.post_W.back() * *prev).colwise() + params.post_b.back();

    fc.valid = true;
    PriorityVector out;
    out.theta = theta;
    out.z = zrow.row(0).transpose();
    return out;
}

ImpParams imp_backward(const PccmpGraph& graph, const ImpParams& params,
                       const Eigen::VectorXd& dz, const ForwardCache& fc) {
    if (!fc.valid)
        throw std::logic_error("imp_backward: no cached forward pass");
    const ImpHyper& h = params.hyper;
    const int N = graph.N();
    if (dz.size() != N)
        throw std::invalid_argument("imp_backward: dz length must equal N");
    ImpParams g = imp_zeros_like(h);

    // POST MLP backward over all check nodes at once.
    const std::size_t last = params.post_W.size() - 1;
    Eigen::MatrixXd dA = dz.transpose();
    const Eigen::MatrixXd* below = fc.post_acts.empty() ? &fc.post_in : &fc.post_acts.back();
    g.post_W[last] = dA * below->transpose();
    g.post_b[last] = dA.rowwise().sum();
    dA = params.post_W[last].transpose() * dA;
    for (std::size_t l = last; l-- > 0;) {
        dA = (fc.post_acts[l].array() > 0.0).select(dA, 0.0);
        below = (l == 0) ? &fc.post_in : &fc.post_acts[l - 1];
        g.post_W[l] = dA * below->transpose();
        g.post_b[l] = dA.rowwise().sum();
        dA = params.post_W[l].transpose() * dA;
    }
    Eigen::MatrixXd dIn = std::move(dA);

    Eigen::MatrixXd dHc = dIn.topRows(h.d_final());
    Eigen::MatrixXd dHv = Eigen::MatrixXd::Zero(h.d_final(), N);
    Eigen::VectorXd dhtilde_v = dIn.middleRows(h.d_final(), h.d_pool).rowwise().sum();
    Eigen::VectorXd dhtilde_c = dIn.middleRows(h.d_final() + h.d_pool, h.d_pool).rowwise().sum();

    // Pooling backward: tanh, then the linear pool, then the column mean.
    Eigen::VectorXd dpre_v =
        (1.0 - fc.htilde_v.array().square()).matrix().cwiseProduct(dhtilde_v);
    Eigen::VectorXd dpre_c =
        (1.0 - fc.htilde_c.array().square()).matrix().cwiseProduct(dhtilde_c);
    g.pool_v = dpre_v * fc.hbar_v.transpose();
    g.pool_c = dpre_c * fc.hbar_c.transpose();
    const double invN = 1.0 / static_cast<double>(N);
    Eigen::VectorXd dmean_v = params.pool_v.transpose() * dpre_v;
    Eigen::VectorXd dmean_c = params.pool_c.transpose() * dpre_c;
    dHv.colwise() += (invN * dmean_v).eval();
    dHc.colwise() += (invN * dmean_c).eval();

    // Message-passing iterations, newest first.
    Eigen::MatrixXd dSv, dSc, X, dX, dAcv, dAvc, dAcc;
    for (int it = h.M - 1; it >= 0; --it) {
        const ForwardCache::IterCache& ic = fc.iters[static_cast<std::size_t>(it)];
        const Eigen::MatrixXd& Hv_in = fc.Hv[static_cast<std::size_t>(it)];
        const Eigen::MatrixXd& Hc_in = fc.Hc[static_cast<std::size_t>(it)];
        const Eigen::Index din = Hv_in.rows();
        ImpParams::Layer& gl = g.layers[static_cast<std::size_t>(it)];
        const ImpParams::Layer& layer = params.layers[static_cast<std::size_t>(it)];

        normalize_relu_backward(dHv, ic.Yv, ic.norm_v, dSv);
        normalize_relu_backward(dHc, ic.Yc, ic.norm_c, dSc);

        // dUcv = dSv; dUvc = dSc; dUcc = dSc with column 0 masked out.
        Eigen::MatrixXd dUcc = dSc;
        dUcc.col(0).setZero();

        Eigen::MatrixXd dHv_in = Eigen::MatrixXd::Zero(din, N);
        Eigen::MatrixXd dHc_in = Eigen::MatrixXd::Zero(din, N);

        X.resize(2 * din, N);
        X.topRows(din) = Hv_in;
        X.bottomRows(din) = ic.Acv;
        gl.W[kC2V] = dSv * X.transpose();
        gl.b[kC2V] = dSv.rowwise().sum();
        dX = layer.W[kC2V].transpose() * dSv;
        dHv_in += dX.topRows(din);
        dAcv = dX.bottomRows(din);

        X.topRows(din) = Hc_in;
        X.bottomRows(din) = ic.Avc;
        gl.W[kV2C] = dSc * X.transpose();
        gl.b[kV2C] = dSc.rowwise().sum();
        dX = layer.W[kV2C].transpose() * dSc;
        dHc_in += dX.topRows(din);
        dAvc = dX.bottomRows(din);

        X.bottomRows(din) = ic.Acc;
        gl.W[kC2C] = dUcc * X.transpose();
        gl.b[kC2C] = dUcc.rowwise().sum();
        dX = layer.W[kC2C].transpose() * dUcc;
        dHc_in += dX.topRows(din);
        dAcc = dX.bottomRows(din);

        aggregate_backward(graph, dAcv, dAvc, dAcc, dHv_in, dHc_in);
        dHv = std::move(dHv_in);
        dHc = std::move(dHc_in);
    }

    // Initialization backward.
    const Eigen::MatrixXd& H0v = fc.Hv[0];
    const Eigen::MatrixXd& H0c = fc.Hc[0];
    g.emb.col(static_cast<int>(NodeType::V)) = dHv.topRows(h.d_emb).rowwise().sum();
    for (int j = 0; j < N; ++j)
        g.emb.col(static_cast<int>(graph.check_type(j))) += dHc.col(j).head(h.d_emb);

    Eigen::MatrixXd Tv = H0v.bottomRows(h.d_init);
    Eigen::MatrixXd dpreV =
        (1.0 - Tv.array().square()).cwiseProduct(dHv.bottomRows(h.d_init).array()).matrix();
    Eigen::MatrixXd Tc = H0c.bottomRows(h.d_init);
    Eigen::MatrixXd dpreC =
        (1.0 - Tc.array().square()).cwiseProduct(dHc.bottomRows(h.d_init).array()).matrix();
    Eigen::VectorXd xv(N), xc(N);
    for (int j = 0; j < N; ++j) {
        xv(j) = graph.x_variable(j);
        xc(j) = graph.x_check(j);
    }
    g.init_w_v = dpreV * xv;
    g.init_b_v = dpreV.rowwise().sum();
    g.init_w_c = dpreC * xc;
    g.init_b_c = dpreC.rowwise().sum();

    return g;
}

// --- checkpoint --------------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'I', 'M', 'P', 'C', 'K', 'P', 'T', '1'};
static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");
} // namespace

void save_checkpoint(const ImpParams& params, const std::filesystem::path& file,
                     const std::string& provenance_json) {
    nlohmann::ordered_json header;
    header["format_version"] = 1;
    header["hyper"] = {{"M", params.hyper.M},
                       {"d_emb", params.hyper.d_emb},
                       {"d_init", params.hyper.d_init},
                       {"d_hidden", params.hyper.d_hidden},
                       {"d_pool", params.hyper.d_pool},
                       {"post_hidden", params.hyper.post_hidden}};
    header["dtype"] = "float32";
    header["layout"] = "column-major";
    if (!provenance_json.empty())
        header["provenance"] = nlohmann::ordered_json::parse(provenance_json);
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
    std::uint64_t offset = 0;
    std::vector<float> payload;
    visit_tensors(const_cast<ImpParams&>(params),
                  [&](const std::string& name, Eigen::Ref<Eigen::MatrixXd> t) {
                      tensors.push_back({{"name", name},
                                         {"rows", t.rows()},
                                         {"cols", t.cols()},
                                         {"offset", offset}});
                      for (Eigen::Index c = 0; c < t.cols(); ++c)
                          for (Eigen::Index r = 0; r < t.rows(); ++r)
                              payload.push_back(static_cast<float>(t(r, c)));
                      offset += static_cast<std::uint64_t>(t.size()) * sizeof(float);
                  });
    header["tensors"] = tensors;
    const std::string htext = header.dump();

    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t hlen = htext.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!out)
        throw std::runtime_error("checkpoint write failed: " + file.string());
}

ImpParams load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open checkpoint " + file.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a checkpoint file: " + file.string());
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string htext(hlen, '\0');
    in.read(htext.data(), static_cast<std::streamsize>(hlen));
    nlohmann::json header = nlohmann::json::parse(htext);
    if (header.at("format_version").get<int>() != 1)
        throw std::runtime_error("unsupported checkpoint version in " + file.string());

    ImpHyper hyper;
    const auto& hj = header.at("hyper");
    hyper.M = hj.at("M").get<int>();
    hyper.d_emb = hj.at("d_emb").get<int>();
    hyper.d_init = hj.at("d_init").get<int>();
    hyper.d_hidden = hj.at("d_hidden").get<std::vector<int>>();
    hyper.d_pool = hj.at("d_pool").get<int>();
    hyper.post_hidden = hj.at("post_hidden").get<std::vector<int>>();

    ImpParams params = imp_zeros_like(hyper);
    std::size_t tensor_idx = 0;
    const auto& tensors = header.at("tensors");
    visit_tensors(params, [&](const std::string& name, Eigen::Ref<Eigen::MatrixXd> t) {
        if (tensor_idx >= tensors.size())
            throw std::runtime_error("checkpoint is missing tensor " + name);
        const auto& tj = tensors[tensor_idx++];
        if (tj.at("name").get<std::string>() != name ||
            tj.at("rows").get<Eigen::Index>() != t.rows() ||
            tj.at("cols").get<Eigen::Index>() != t.cols())
            throw std::runtime_error("checkpoint tensor mismatch at " + name);
        std::vector<float> buf(static_cast<std::size_t>(t.size()));
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!in)
            throw std::runtime_error("checkpoint payload truncated at " + name);
        std::size_t k = 0;
        for (Eigen::Index c = 0; c < t.cols(); ++c)
            for (Eigen::Index r = 0; r < t.rows(); ++r)
                t(r, c) = static_cast<double>(buf[k++]);
    });
    return params;
}

std::string checkpoint_hash(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open checkpoint " + file.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
        if (!in)
            break;
    }
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

} // namespace polarlab
