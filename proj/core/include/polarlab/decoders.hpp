#pragma once

#include <vector>

#include "polarlab/channel.hpp"
#include "polarlab/code_spec.hpp"

namespace polarlab {

struct DecodeResult {
    BitVector u_hat;    // length-N source estimate
    BitVector info_hat; // the K-m information bits
    bool crc_pass = false;
    double path_metric = 0.0;
};

struct SclCandidate {
    BitVector u_hat;
    double path_metric = 0.0;
};

/// Successive-cancellation list decoder with LLR-domain path metrics.
///
/// f/g updates use the exact boxplus and the exact metric increment
/// ln(1 + exp(-(1-2u)*LLR)), so the final metric of a complete path equals
/// -log P(u|y) up to a path-independent constant. With L = 2^K and no CRC
/// the lowest-metric candidate is therefore the maximum-likelihood codeword,
/// which the acceptance suite checks against exhaustive enumeration.
///
/// Instances hold per-path scratch buffers and are reusable but not
/// thread-safe; give each thread its own instance.
class ListDecoder {
public:
    ListDecoder(Construction construction, int list_size);

    /// Candidates sorted by ascending path metric; ties keep path order
    /// (lower surviving path index first).
    const std::vector<SclCandidate>& decode(const LlrVector& llrs);

    const Construction& construction() const { return construction_; }
    int list_size() const { return L_; }

private:
    struct Path {
        std::vector<double> llr;    // levels 1..n, flattened
        std::vector<std::uint8_t> csums; // partial sums, 2 slots per entry
        BitVector u;
        double pm = 0.0;
    };

    void calc_llr(Path& p, int lambda, int phi);
    void update_csums(Path& p, int lambda, int phi);

    Construction construction_;
    int N_, n_, L_;
    std::vector<std::uint8_t> frozen_;
    std::vector<int> level_off_;
    const double* channel_ = nullptr;

    std::vector<Path> slots_;
    std::vector<int> active_;   // slot indices in canonical path order
    std::vector<SclCandidate> out_;

    struct Fork {
        double pm;
        int parent_pos; // position in active_, not slot id
        std::uint8_t bit;
    };
    std::vector<Fork> forks_;
};

/// Plain successive cancellation (standalone recursion, used as a reference
/// for the L=1 list decoder). Frozen bits forced to zero; an LLR of exactly
/// zero decides bit 0.
DecodeResult sc_decode(const LlrVector& llrs, const Construction& c);

std::vector<SclCandidate> scl_decode(const LlrVector& llrs, const Construction& c, int list_size);

/// CRC-aided selection: lowest-metric candidate whose non-frozen bits pass
/// the CRC; if none passes (or m = 0), the lowest-metric candidate.
DecodeResult cascl_decode(const LlrVector& llrs, const Construction& c, int list_size);

/// Selection step of CA-SCL applied to an existing decoder's output.
DecodeResult cascl_select(const std::vector<SclCandidate>& candidates, const Construction& c);

} // namespace polarlab
