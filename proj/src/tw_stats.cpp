#include "squeeze/tw_stats.hpp"

#include <cmath>

#include "squeeze/error.hpp"

namespace squeeze {

void MomentAccumulator::add(double x)
{
    MomentAccumulator one;
    one.n_ = 1;
    one.mean_ = x;
    merge(one);
}

// Pebay (2008) pairwise update formulas for central moments up to fourth order.
void MomentAccumulator::merge(const MomentAccumulator& o)
{
    if (o.n_ == 0)
        return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double d = o.mean_ - mean_;
    const double d2 = d * d;
    const double d3 = d2 * d;
    const double d4 = d2 * d2;

    const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                      4.0 * d * (na * o.m3_ - nb * m3_) / n;
    const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                      3.0 * d * (na * o.m2_ - nb * m2_) / n;
    const double m2 = m2_ + o.m2_ + d2 * na * nb / n;

    mean_ += d * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += o.n_;
}

MomentSet extract_moments(const MomentAccumulator& acc, std::size_t modes)
{
    if (acc.count() < 2)
        throw ParameterError("moment extraction needs at least two trajectories");
    const double n = static_cast<double>(acc.count());
    const double m = static_cast<double>(modes);
    const double var_w = acc.variance();
    const double mu3 = acc.third();
    const double mu4 = acc.fourth();

    MomentSet out;
    out.mean_n2 = acc.mean() - 0.5 * m;
    const double variance = var_w - 0.25 * m;  // Var(N) = Var(N_W) - M/4
    out.mean_n2_sq = variance + out.mean_n2 * out.mean_n2;
    out.stderr_mean = std::sqrt(var_w / n);

    // <N^2> estimator is the sample mean of X^2 - M X (+ const); its spread:
    const double shift = 2.0 * acc.mean() - m;
    const double var_sq = mu4 - var_w * var_w + shift * shift * var_w + 2.0 * shift * mu3;
    out.stderr_mean_sq = std::sqrt(std::max(var_sq, 0.0) / n);

    if (out.mean_n2 > 3.0 * out.stderr_mean && out.mean_n2 > 0.0) {
        const double v = variance / out.mean_n2;
        out.variance_norm = v;
        const double num = (mu4 - var_w * var_w) - 2.0 * v * mu3 + v * v * var_w;
        out.stderr_v = std::sqrt(std::max(num, 0.0) / (n * out.mean_n2 * out.mean_n2));
    } else {
        out.variance_norm = 1.0;
        out.flagged = true;
    }
    return out;
}

}  // namespace squeeze
