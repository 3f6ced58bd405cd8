#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polarlab/channel.hpp"
#include "polarlab/code_spec.hpp"

namespace polarlab {

struct FerEstimate {
    double fer = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t errors = 0;
    double ci_low = 0.0;  // Wilson score interval at 95%
    double ci_high = 0.0;
    std::uint64_t seed = 0;
};

enum class StopMode { kEvaluation, kTraining };

/// Stopping rule for Monte Carlo runs. Evaluation mode requires
/// errors >= min_errors AND frames >= min_frames (max_frames is a safety
/// cap); training mode stops at errors >= min_errors OR frames >= max_frames.
///
/// Frames are simulated in blocks of block_frames, each on its own RNG
/// substream, and the rule is checked at block boundaries in block order.
/// Results are therefore identical for any worker count.
struct StopRule {
    StopMode mode = StopMode::kEvaluation;
    std::uint64_t min_errors = 500;
    std::uint64_t min_frames = 1'000'000;
    std::uint64_t max_frames = 4'000'000'000ull;
    std::uint64_t block_frames = 8192;

    static StopRule evaluation(std::uint64_t min_errors = 500,
                               std::uint64_t min_frames = 1'000'000,
                               std::uint64_t max_frames = 4'000'000'000ull);
    static StopRule training(std::uint64_t max_errors = 100, std::uint64_t max_frames = 100'000);
};

/// 95% Wilson score interval for e successes in n trials.
void wilson_interval(std::uint64_t errors, std::uint64_t frames, double& lo, double& hi);

/// Monte Carlo FER of a construction under CA-SCL with list size L at the
/// given SNR: random information bits, QPSK/AWGN, decode, compare info bits.
FerEstimate estimate_fer(const Construction& c, int list_size, SnrDb gamma, const StopRule& rule,
                         std::uint64_t seed, int workers = 1);

struct SweepRow {
    std::string label;
    int N = 0, K = 0, m = 0;
    int L = 0;
    double snr_db = 0.0;
    FerEstimate est;
};

/// Substream seed of one sweep row; shared with the evaluate CLI so that a
/// compare run reproduces standalone evaluate rows bit-for-bit.
std::uint64_t sweep_row_seed(std::uint64_t master_seed, const std::string& label, double snr_db);

/// Cross product of constructions and SNR points, rows ordered by
/// (label, snr).
std::vector<SweepRow> sweep(const std::vector<std::pair<std::string, Construction>>& constructions,
                            const std::vector<double>& snrs_db, int list_size,
                            const StopRule& rule, std::uint64_t master_seed, int workers = 1);

/// CSV with the exact column set
/// label,N,K,m,L,snr_db,frames,errors,fer,ci_low,ci_high,seed.
/// Provenance lines, if any, are emitted first as '#'-prefixed comments.
std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                         const std::vector<std::string>& provenance_lines = {});

} // namespace polarlab
