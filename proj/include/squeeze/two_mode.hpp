#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "squeeze/moments.hpp"
#include "squeeze/units.hpp"

namespace squeeze {

using cplx = std::complex<double>;

/// Ramsey sequence with instantaneous pulses.
struct SequenceSpec {
    double theta1 = 0.0;  // first pulse area, rad
    double theta2 = 0.0;  // second pulse area, rad
    double phi = 0.0;     // second-pulse phase, rad (2 pi periodic)
    double t_hold = 0.0;  // s

    void validate() const;
};

/// Initial number distribution of mode 1. `fano` is variance/mean of the
/// total number; 1 is a Poissonian (coherent-state) mixture.
struct InitialEnsemble {
    double n0_mean = 0.0;
    double fano = 1.0;

    void validate() const;
};

struct ModeAmplitudes {
    cplx a1;
    cplx a2;
};

/// Resonant coupling pulse of area theta and phase phi acting on two mode amplitudes:
///   a1' = a1 cos(theta) - i a2 sin(theta) e^{+i phi}
///   a2' = a2 cos(theta) - i a1 sin(theta) e^{-i phi}
ModeAmplitudes beamsplitter_transform(ModeAmplitudes in, double theta, double phi);

/// E(n1, n2)/hbar = chi11 n1(n1-1) + chi22 n2(n2-1) + 2 chi12 n1 n2.
double kerr_energy(std::int64_t n1, std::int64_t n2, const KerrParams& kerr);

/// Populations after the full sequence for a single coherent input amplitude.
struct SequenceOutput {
    double mean_n1 = 0.0;
    double mean_n2 = 0.0;
    double var_n2 = 0.0;
};

/// Exact pulse -> Kerr hold -> pulse statistics starting from the coherent
/// state |alpha0, 0>. O(1) in |alpha0|^2.
SequenceOutput kerr_ramsey_sequence(cplx alpha0, const SequenceSpec& seq, const KerrParams& kerr);

/// Mode-2 moments for a Poissonian initial ensemble (init.fano must be 1).
MomentSet closed_form_moments(const InitialEnsemble& init, const SequenceSpec& seq,
                              const KerrParams& kerr);

struct MixtureOptions {
    double rel_tolerance = 1e-10;
    unsigned max_depth = 15;
};

/// Mode-2 moments for a super-Poissonian initial ensemble: |alpha0|^2 is
/// Gaussian (truncated at 0) with mean N0 and excess variance (fano - 1) N0, so
/// that the total-number Fano factor equals `fano`. fano <= 1 reduces to the
/// coherent result.
MomentSet mixture_moments(const InitialEnsemble& init, const SequenceSpec& seq,
                          const KerrParams& kerr, const MixtureOptions& options = {});

struct VarianceMap {
    std::vector<double> t_hold_axis;
    std::vector<double> phi_axis;
    std::vector<double> values;    // v, row-major [t_hold][phi]
    std::vector<double> mean_map;  // <N2>
    std::vector<double> mean_sq_map;

    double at(std::size_t i_hold, std::size_t i_phi) const
    {
        return values[i_hold * phi_axis.size() + i_phi];
    }
};

/// Dense evaluation over (t_hold, phi); uses mixture_moments when fano != 1.
VarianceMap variance_map(const InitialEnsemble& init, const KerrParams& kerr, double theta1,
                         double theta2, std::vector<double> t_hold_axis,
                         std::vector<double> phi_axis, unsigned threads = 1);

}  // namespace squeeze
