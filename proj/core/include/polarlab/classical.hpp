#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polarlab/channel.hpp"
#include "polarlab/code_spec.hpp"

namespace polarlab {

/// Step-shaped reliability table: row l holds 2^l values, row 0 is the
/// design-channel figure of merit, row n the per-bit-channel metrics.
struct StepStructureZ {
    int n = 0;
    std::vector<std::vector<double>> rows;

    double at(int l, int t) const { return rows[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)]; }
    const std::vector<double>& final_row() const { return rows.back(); }
};

/// The four operators that specialize the abstract construction recursion.
/// f_post maps the final row to freeze priorities: larger = frozen first.
struct ConstructionOps {
    std::string name;
    std::function<double(SnrDb, int N, int K)> f_init;
    std::function<double(double)> f_left;
    std::function<double(double)> f_right;
    std::function<double(double)> f_post;
};

/// Runs the reliability recursion and freezes the N-K indices with the
/// largest post-processed metric (ties freeze the lower index first).
///
/// Index placement: row-l entry t spawns Z[l+1, 2t] = f_left(Z[l, t]) and
/// Z[l+1, 2t+1] = f_right(Z[l, t]), so the final row is indexed by the
/// natural source-bit order of the non-permuted generator (the left/minus
/// branch of the outermost polarization stage covers the low indices).
Construction run_abstract_construction(int N, int K, const ConstructionOps& ops, SnrDb gamma,
                                       StepStructureZ* z_out = nullptr);

/// Erasure-parameter recursion: f_init = eps, f_left(z) = 2z - z^2,
/// f_right(z) = z^2, identity post-processing.
ConstructionOps bhattacharyya_ops(double eps);

/// Default channel-parameter to erasure-parameter mapping used when a
/// Bhattacharyya construction is requested at an SNR: exp(-Es/N0).
double bhattacharyya_param_from_snr(SnrDb gamma);

/// How the Gaussian-approximation recursion seeds its initial mean LLR.
enum class GaInitMode {
    kLinear, // 4 * 10^(gamma/10)  (default)
    kDb,     // 4 * gamma, reading gamma as a plain dB number
};

/// Density-evolution over mean LLRs: f_left(x) = phi^-1(1-(1-phi(x))^2),
/// f_right(x) = 2x, f_post(x) = -x.
ConstructionOps ga_ops(SnrDb gamma, GaInitMode mode = GaInitMode::kLinear);

/// Two-branch interpolation of the density-evolution phi function.
double ga_phi(double x);

/// Monotone bracketed inversion of ga_phi, relative tolerance 1e-11.
/// Throws numerical_error if the bracket cannot be established.
double ga_phi_inv(double y);

} // namespace polarlab
