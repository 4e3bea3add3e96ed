#pragma once

namespace squeeze {

/// Number statistics of one mode.
struct MomentSet {
    double mean_n2 = 0.0;
    double mean_n2_sq = 0.0;
    /// v = (<N^2> - <N>^2) / <N>; reported as 1 with `flagged` set when <N> <= 0.
    double variance_norm = 1.0;
    /// Sampling standard errors; zero for exact engines.
    double stderr_mean = 0.0;
    double stderr_mean_sq = 0.0;
    double stderr_v = 0.0;
    bool flagged = false;

    double variance() const noexcept { return mean_n2_sq - mean_n2 * mean_n2; }
};

/// Builds a MomentSet from a mean and a variance computed without cancellation.
inline MomentSet moments_from_mean_variance(double mean, double variance)
{
    MomentSet m;
    m.mean_n2 = mean;
    m.mean_n2_sq = variance + mean * mean;
    if (mean > 0.0) {
        m.variance_norm = variance / mean;
    } else {
        m.variance_norm = 1.0;
        m.flagged = true;
    }
    return m;
}

}  // namespace squeeze
