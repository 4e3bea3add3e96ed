#pragma once

#include <complex>
#include <vector>

#include "squeeze/moments.hpp"
#include "squeeze/two_mode.hpp"
#include "squeeze/units.hpp"

namespace squeeze {

inline constexpr int kMaxFockCutoff = 512;

/// Pure two-mode state truncated to n1 + n2 <= cutoff. Amplitudes are stored
/// block by block in total number N, and within a block by n2 = 0..N.
class FockStateTwoMode {
public:
    explicit FockStateTwoMode(int cutoff);

    int cutoff() const noexcept { return cutoff_; }
    std::size_t size() const noexcept { return amps_.size(); }

    static std::size_t block_offset(int total) noexcept
    {
        return static_cast<std::size_t>(total) * (total + 1) / 2;
    }
    static std::size_t index(int n1, int n2) noexcept { return block_offset(n1 + n2) + n2; }

    cplx& operator()(int n1, int n2) { return amps_[index(n1, n2)]; }
    const cplx& operator()(int n1, int n2) const { return amps_[index(n1, n2)]; }

    std::vector<cplx>& amplitudes() noexcept { return amps_; }
    const std::vector<cplx>& amplitudes() const noexcept { return amps_; }

    double norm() const;
    /// Probability in the outermost shell n1 + n2 = cutoff.
    double shell_probability() const;

private:
    int cutoff_;
    std::vector<cplx> amps_;
};

/// Smallest cutoff whose Poisson tail beyond it is below `leakage`.
int required_cutoff(double total_mean, double leakage = 1e-8);

/// Product coherent state |alpha, beta>, renormalised on the truncated space.
/// Throws CutoffError if the discarded probability exceeds 1e-8.
FockStateTwoMode prepare_coherent(cplx alpha, cplx beta, int cutoff);

/// exp(-i theta (e^{-i phi} a2^dag a1 + e^{+i phi} a1^dag a2)), applied per
/// total-number block. Matches beamsplitter_transform on coherent states.
FockStateTwoMode apply_beamsplitter_unitary(FockStateTwoMode state, double theta, double phi);

/// Multiplies amplitude (n1, n2) by exp(-i E(n1, n2) t).
FockStateTwoMode apply_kerr_diagonal(FockStateTwoMode state, const KerrParams& kerr, double t);

/// Mode-2 number moments. Vacuum in mode 2 is flagged with v reported as 1.
MomentSet number_moments(const FockStateTwoMode& state);
double mean_n1(const FockStateTwoMode& state);

/// Full Ramsey sequence by brute force from |alpha0, 0>. cutoff <= 0 picks
/// N0 + 10 sqrt(N0) + 20.
MomentSet fock_sequence_moments(cplx alpha0, const SequenceSpec& seq, const KerrParams& kerr,
                                int cutoff = 0);

}  // namespace squeeze
