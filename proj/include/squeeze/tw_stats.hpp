#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "squeeze/moments.hpp"

namespace squeeze {

/// Mergeable running central moments (count, mean, M2, M3, M4). Merging in a
/// fixed order gives bit-reproducible results.
class MomentAccumulator {
public:
    void add(double x);
    void merge(const MomentAccumulator& other);

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Population central moments.
    double variance() const noexcept { return n_ ? m2_ / n_ : 0.0; }
    double third() const noexcept { return n_ ? m3_ / n_ : 0.0; }
    double fourth() const noexcept { return n_ ? m4_ / n_ : 0.0; }
    /// Mean of x^2.
    double mean_square() const noexcept { return variance() + mean_ * mean_; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

/// Converts a Wigner (symmetrically ordered) ensemble of N_W = sum_k |psi_k|^2
/// over `modes` lattice modes into normally ordered number moments:
///   <N>   = <N_W> - M/2
///   <N^2> = <N_W^2> - M <N> - M(M+1)/4
/// Standard errors follow from the trajectory-level central moments (delta method).
/// Results with <N> indistinguishable from zero are flagged, v reported as 1.
MomentSet extract_moments(const MomentAccumulator& wigner_number, std::size_t modes);

}  // namespace squeeze
