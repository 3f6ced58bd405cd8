#include "polarlab/fer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "polarlab/common.hpp"
#include "polarlab/decoders.hpp"
#include "polarlab/polar.hpp"
#include "polarlab/rng.hpp"

namespace polarlab {

StopRule StopRule::evaluation(std::uint64_t min_errors, std::uint64_t min_frames,
                              std::uint64_t max_frames) {
    StopRule r;
    r.mode = StopMode::kEvaluation;
    r.min_errors = min_errors;
    r.min_frames = min_frames;
    r.max_frames = max_frames;
    r.block_frames = 8192;
    return r;
}

StopRule StopRule::training(std::uint64_t max_errors, std::uint64_t max_frames) {
    StopRule r;
    r.mode = StopMode::kTraining;
    r.min_errors = max_errors;
    r.min_frames = 0;
    r.max_frames = max_frames;
    r.block_frames = 256;
    return r;
}

void wilson_interval(std::uint64_t errors, std::uint64_t frames, double& lo, double& hi) {
    if (frames == 0) {
        lo = 0.0;
        hi = 1.0;
        return;
    }
    const double z = 1.959963984540054; // 97.5% normal quantile
    const double n = static_cast<double>(frames);
    const double p = static_cast<double>(errors) / n;
    const double z2n = z * z / n;
    const double denom = 1.0 + z2n;
    const double center = (p + z2n / 2.0) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

namespace {

/// One block of frames on its own substream. Noise and payload use separate
/// sub-generators so that runs with the same seed see the same channel
/// realizations even when the code dimension differs (common random numbers
/// for the trainer's per-step FER pairs).
std::uint64_t run_block(const Construction& c, ListDecoder& dec, SnrDb gamma,
                        std::uint64_t block_seed, std::uint64_t frames) {
    Rng info_rng(derive_stream(block_seed, 0));
    Rng noise_rng(derive_stream(block_seed, 1));
    const int info_len = c.spec.info_bits();
    BitVector info(static_cast<std::size_t>(info_len));
    std::uint64_t errors = 0;
    for (std::uint64_t f = 0; f < frames; ++f) {
        for (int i = 0; i < info_len; ++i)
            info[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(info_rng.bit());
        BitVector cw = encode(c, info);
        LlrVector llrs = transmit(cw, gamma, noise_rng);
        DecodeResult res = cascl_select(dec.decode(llrs), c);
        if (res.info_hat != info)
            ++errors;
    }
    return errors;
}

bool rule_satisfied(const StopRule& rule, std::uint64_t errors, std::uint64_t frames) {
    if (frames >= rule.max_frames)
        return true;
    if (rule.mode == StopMode::kTraining)
        return errors >= rule.min_errors;
    return errors >= rule.min_errors && frames >= rule.min_frames;
}

} // namespace

FerEstimate estimate_fer(const Construction& c, int list_size, SnrDb gamma, const StopRule& rule,
                         std::uint64_t seed, int workers) {
    c.validate();
    if (list_size < 1)
        throw std::invalid_argument("estimate_fer: list size must be >= 1");
    if (rule.block_frames == 0 || rule.max_frames == 0)
        throw std::invalid_argument("estimate_fer: empty frame budget");
    workers = std::max(1, workers);

    std::vector<ListDecoder> decoders;
    decoders.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        decoders.emplace_back(c, list_size);

    std::uint64_t frames = 0, errors = 0, next_block = 0;
    bool done = false;
    std::vector<std::uint64_t> block_frames(static_cast<std::size_t>(workers));
    std::vector<std::uint64_t> block_errors(static_cast<std::size_t>(workers));
    while (!done) {
        // One round of up to `workers` consecutive blocks, committed in order.
        int count = 0;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t start = (next_block + static_cast<std::uint64_t>(w)) * rule.block_frames;
            if (start >= rule.max_frames)
                break;
            block_frames[static_cast<std::size_t>(w)] =
                std::min<std::uint64_t>(rule.block_frames, rule.max_frames - start);
            ++count;
        }
        if (count == 0)
            break;
        auto run_one = [&](int w) {
            const std::uint64_t b = next_block + static_cast<std::uint64_t>(w);
            block_errors[static_cast<std::size_t>(w)] =
                run_block(c, decoders[static_cast<std::size_t>(w)], gamma, derive_stream(seed, b),
                          block_frames[static_cast<std::size_t>(w)]);
        };
        if (count == 1) {
            run_one(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(count));
            for (int w = 0; w < count; ++w)
                pool.emplace_back(run_one, w);
            for (std::thread& t : pool)
                t.join();
        }
        for (int w = 0; w < count; ++w) {
            frames += block_frames[static_cast<std::size_t>(w)];
            errors += block_errors[static_cast<std::size_t>(w)];
            if (rule_satisfied(rule, errors, frames)) {
                done = true;
                break;
            }
        }
        next_block += static_cast<std::uint64_t>(count);
    }

    FerEstimate est;
    est.frames = frames;
    est.errors = errors;
    est.fer = frames ? static_cast<double>(errors) / static_cast<double>(frames) : 0.0;
    wilson_interval(errors, frames, est.ci_low, est.ci_high);
    est.seed = seed;
    return est;
}

std::uint64_t sweep_row_seed(std::uint64_t master_seed, const std::string& label, double snr_db) {
    const auto snr_key = static_cast<std::uint64_t>(
        static_cast<std::int64_t>(std::llround(snr_db * 1000.0)));
    return derive_stream(derive_stream(master_seed, fnv1a64(label)), snr_key);
}

std::vector<SweepRow> sweep(const std::vector<std::pair<std::string, Construction>>& constructions,
                            const std::vector<double>& snrs_db, int list_size,
                            const StopRule& rule, std::uint64_t master_seed, int workers) {
    if (constructions.empty() || snrs_db.empty())
        throw std::invalid_argument("sweep: need at least one construction and one SNR point");
    std::vector<SweepRow> rows;
    rows.reserve(constructions.size() * snrs_db.size());
    for (const auto& [label, c] : constructions) {
        if (label.find(',') != std::string::npos)
            throw std::invalid_argument("sweep: label may not contain a comma: " + label);
        for (double snr : snrs_db) {
            SweepRow row;
            row.label = label;
            row.N = c.spec.N;
            row.K = c.spec.K;
            row.m = c.spec.m;
            row.L = list_size;
            row.snr_db = snr;
            const std::uint64_t row_seed = sweep_row_seed(master_seed, label, snr);
            row.est = estimate_fer(c, list_size, SnrDb{snr}, rule, row_seed, workers);
            rows.push_back(std::move(row));
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.label != b.label)
            return a.label < b.label;
        return a.snr_db < b.snr_db;
    });
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                         const std::vector<std::string>& provenance_lines) {
    std::string out;
    for (const std::string& line : provenance_lines)
        out += "# " + line + "\n";
    out += "label,N,K,m,L,snr_db,frames,errors,fer,ci_low,ci_high,seed\n";
    char buf[256];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%d,%.6g,%llu,%llu,%.9e,%.9e,%.9e,%llu\n",
                      r.label.c_str(), r.N, r.K, r.m, r.L, r.snr_db,
                      static_cast<unsigned long long>(r.est.frames),
                      static_cast<unsigned long long>(r.est.errors), r.est.fer, r.est.ci_low,
                      r.est.ci_high, static_cast<unsigned long long>(r.est.seed));
        out += buf;
    }
    return out;
}

} // namespace polarlab
