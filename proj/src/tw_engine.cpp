#include "squeeze/tw_engine.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

#include <fftw3.h>

#include "squeeze/error.hpp"
#include "squeeze/parallel.hpp"

namespace squeeze {

using cd = std::complex<double>;

namespace {

// The FFTW planner is not re-entrant; execution with the new-array interface is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cd* p) { return reinterpret_cast<fftw_complex*>(p); }

std::vector<double> wavenumbers_squared(std::size_t points, double length)
{
    std::vector<double> k2(points);
    const auto m = static_cast<std::ptrdiff_t>(points);
    for (std::ptrdiff_t j = 0; j < m; ++j) {
        const double k = 2.0 * kPi / length * static_cast<double>(j < m / 2 ? j : j - m);
        k2[static_cast<std::size_t>(j)] = k * k;
    }
    return k2;
}

double wigner_number(const std::vector<cd>& psi, double dx)
{
    double total = 0.0;
    for (const auto& v : psi)
        total += std::norm(v);
    return total * dx;
}

bool all_finite(const std::vector<cd>& psi)
{
    return std::all_of(psi.begin(), psi.end(),
                       [](const cd& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::size_t kChunk = 16;

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> Grid1D::x() const
{
    std::vector<double> out(points);
    const double h = dx();
    for (std::size_t i = 0; i < points; ++i)
        out[i] = (static_cast<double>(i) - static_cast<double>(points / 2)) * h;
    return out;
}

void Grid1D::validate() const
{
    if (points < 32 || (points & (points - 1)) != 0)
        throw ParameterError("grid points must be a power of two >= 32");
    if (!(length > 0.0) || !std::isfinite(length))
        throw ParameterError("grid length must be positive");
}

Grid1D TwParams::grid() const
{
    const TrapUnits units(species.mass, trap.omega);
    return {points, box_ho_lengths * units.length()};
}

const char* fft_backend_version() { return fftw_version; }

double max_stable_dt(const TwParams& params)
{
    // Above ~2 rad of kinetic phase at the Nyquist wavenumber the nonlinear
    // splitting goes unstable; the momentum kick the trap imparts per step at
    // the box edge must stay below half the Nyquist wavenumber so that the
    // local phase stays resolved.
    const TrapUnits units(params.species.mass, params.trap.omega);
    const double dx = params.box_ho_lengths / static_cast<double>(params.points);
    const double k_max = kPi / dx;
    const double edge = 0.5 * params.box_ho_lengths;
    const double h = std::min(4.0 / (k_max * k_max), 0.5 * k_max / edge);
    return units.from_time(h);
}

void TwParams::validate() const
{
    species.validate();
    trap.validate();
    grid().validate();
    if (!(box_ho_lengths > 0.0))
        throw ParameterError("box length must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ParameterError("time step must be positive");

    const double limit = max_stable_dt(*this);
    if (dt > limit) {
        std::ostringstream msg;
        msg << "dt = " << dt << " s exceeds the split-step bound " << limit << " s for "
            << points << " points over " << box_ho_lengths << " oscillator lengths";
        throw ParameterError(msg.str());
    }
}

void PulseSchedule::validate() const
{
    if (!(t0 <= t1 && t1 <= t2 && t2 <= t3))
        throw ParameterError("pulse schedule must satisfy t0 <= t1 <= t2 <= t3");
    if (!(omega0 >= 0.0) || !std::isfinite(omega0))
        throw ParameterError("Rabi frequency must be non-negative");
    if (!std::isfinite(phi2))
        throw ParameterError("phi2 must be finite");
}

PulseSchedule PulseSchedule::from_areas(double theta1, double theta2, double phi, double t_hold,
                                        double omega0, double t0)
{
    if (!(omega0 > 0.0))
        throw ParameterError("Rabi frequency must be positive");
    PulseSchedule s;
    s.t0 = t0;
    s.t1 = t0 + theta1 / omega0;
    s.t2 = s.t1 + t_hold;
    s.t3 = s.t2 + theta2 / omega0;
    s.omega0 = omega0;
    s.phi2 = phi;
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------

struct SpdeModel::Fft {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Fft(std::size_t points)
    {
        std::vector<cd> probe(points);
        std::lock_guard lock(planner_mutex());
        const int n = static_cast<int>(points);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_dft_1d(n, as_fftw(probe.data()), as_fftw(probe.data()), FFTW_FORWARD, flags);
        backward = fftw_plan_dft_1d(n, as_fftw(probe.data()), as_fftw(probe.data()), FFTW_BACKWARD, flags);
    }
    ~Fft()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void to_k(std::vector<cd>& v) const { fftw_execute_dft(forward, as_fftw(v.data()), as_fftw(v.data())); }
    void to_x(std::vector<cd>& v) const { fftw_execute_dft(backward, as_fftw(v.data()), as_fftw(v.data())); }
};

SpdeModel::SpdeModel(const TwParams& params)
    : params_(params)
    , units_(params.species.mass, params.trap.omega)
{
    params_.validate();
    const std::size_t m = params_.points;
    dx_ = params_.box_ho_lengths / static_cast<double>(m);
    x_.resize(m);
    potential_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        x_[i] = (static_cast<double>(i) - static_cast<double>(m / 2)) * dx_;
        potential_[i] = 0.5 * x_[i] * x_[i];
    }
    k2_ = wavenumbers_squared(m, params_.box_ho_lengths);

    const auto& sp = params_.species;
    auto coupling = [&](double a) {
        return units_.to_coupling_1d(
            reduce_to_1d(interaction_strength_3d(a, sp.mass), params_.trap.omega_perp, sp.mass));
    };
    g11_ = coupling(sp.a11);
    g22_ = coupling(sp.a22);
    g12_ = coupling(sp.a12);
    plans_ = std::make_unique<Fft>(m);
}

SpdeModel::~SpdeModel() = default;

std::vector<cd> SpdeModel::kinetic_factor(double dt_scaled) const
{
    std::vector<cd> f(k2_.size());
    const double inv_m = 1.0 / static_cast<double>(k2_.size());
    for (std::size_t j = 0; j < k2_.size(); ++j)
        f[j] = std::polar(inv_m, -0.5 * k2_[j] * dt_scaled);
    return f;
}

void SpdeModel::kinetic(FieldState& state, std::span<const cd> factor, Fft& fft) const
{
    for (auto* psi : {&state.psi1, &state.psi2}) {
        fft.to_k(*psi);
        for (std::size_t j = 0; j < factor.size(); ++j)
            (*psi)[j] *= factor[j];
        fft.to_x(*psi);
    }
}

void SpdeModel::nonlinear_phase(FieldState& state, double dt_scaled) const
{
    const double vac_self = 1.0 / dx_;
    const double vac_cross = 0.5 / dx_;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double n1 = std::norm(state.psi1[i]);
        const double n2 = std::norm(state.psi2[i]);
        const double l1 = potential_[i] + g11_ * (n1 - vac_self) + g12_ * (n2 - vac_cross);
        const double l2 = potential_[i] + g22_ * (n2 - vac_self) + g12_ * (n1 - vac_cross);
        state.psi1[i] *= std::polar(1.0, -l1 * dt_scaled);
        state.psi2[i] *= std::polar(1.0, -l2 * dt_scaled);
    }
}

void SpdeModel::local(FieldState& state, double dt_scaled, Coupling coupling) const
{
    if (coupling.rabi == 0.0) {
        nonlinear_phase(state, dt_scaled);
        return;
    }
    nonlinear_phase(state, 0.5 * dt_scaled);
    const double angle = units_.to_rate(coupling.rabi) * dt_scaled;
    const double c = std::cos(angle);
    const cd mis = cd(0.0, -std::sin(angle));
    const cd e = std::polar(1.0, coupling.phase);
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const cd a = state.psi1[i];
        const cd b = state.psi2[i];
        state.psi1[i] = c * a + mis * e * b;
        state.psi2[i] = c * b + mis * std::conj(e) * a;
    }
    nonlinear_phase(state, 0.5 * dt_scaled);
}

void SpdeModel::step(FieldState& state, double dt, Coupling coupling) const
{
    const double h = units_.to_time(dt);
    const auto half = kinetic_factor(0.5 * h);
    kinetic(state, half, *plans_);
    local(state, h, coupling);
    kinetic(state, half, *plans_);
    state.time += dt;
    if (!all_finite(state.psi1) || !all_finite(state.psi2))
        throw IntegrationError("non-finite field after split step", state.time);
}

void step_spde(const SpdeModel& model, FieldState& state, double dt, Coupling coupling)
{
    model.step(state, dt, coupling);
}

void SpdeModel::propagate(FieldState& state, double duration, Coupling coupling) const
{
    if (!(duration > 0.0))
        return;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(duration / params_.dt - 1e-9)));
    const double dt = duration / static_cast<double>(steps);
    const double h = units_.to_time(dt);
    const auto half = kinetic_factor(0.5 * h);
    const auto full = kinetic_factor(h);
    const double start = state.time;

    kinetic(state, half, *plans_);
    for (std::size_t s = 0; s < steps; ++s) {
        local(state, h, coupling);
        kinetic(state, s + 1 < steps ? std::span<const cd>(full) : std::span<const cd>(half), *plans_);
        if ((s + 1) % 512 == 0 && !all_finite(state.psi1))
            throw IntegrationError("non-finite field during propagation",
                                   start + static_cast<double>(s + 1) * dt);
    }
    state.time = start + duration;
    if (!all_finite(state.psi1) || !all_finite(state.psi2))
        throw IntegrationError("non-finite field during propagation", state.time);
}

void SpdeModel::propagate_mean_field(std::vector<cd>& psi, double atoms, double duration) const
{
    if (!(duration > 0.0))
        return;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(duration / params_.dt - 1e-9)));
    const double h = units_.to_time(duration / static_cast<double>(steps));
    const auto half = kinetic_factor(0.5 * h);
    const double g = g11_ * atoms;
    for (std::size_t s = 0; s < steps; ++s) {
        plans_->to_k(psi);
        for (std::size_t j = 0; j < psi.size(); ++j)
            psi[j] *= half[j];
        plans_->to_x(psi);
        for (std::size_t i = 0; i < psi.size(); ++i)
            psi[i] *= std::polar(1.0, -(potential_[i] + g * std::norm(psi[i])) * h);
        plans_->to_k(psi);
        for (std::size_t j = 0; j < psi.size(); ++j)
            psi[j] *= half[j];
        plans_->to_x(psi);
    }
}

SpdeModel::Energies SpdeModel::energies(std::span<const double> psi, double atoms) const
{
    Energies e;
    std::vector<cd> work(psi.begin(), psi.end());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double rho = psi[i] * psi[i];
        e.potential += potential_[i] * rho * dx_;
        e.interaction += 0.5 * g11_ * atoms * rho * rho * dx_;
    }
    plans_->to_k(work);
    const double m = static_cast<double>(psi.size());
    for (std::size_t j = 0; j < work.size(); ++j)
        e.kinetic += 0.5 * k2_[j] * std::norm(work[j]) * dx_ / m;
    return e;
}

std::vector<double> SpdeModel::ground_state(double atoms) const
{
    if (!(atoms >= 0.0))
        throw ParameterError("atom number must be non-negative");
    const std::size_t m = x_.size();
    const double g = g11_ * atoms;

    // Start from the wider of the oscillator Gaussian and the Thomas-Fermi extent.
    const double tf_radius = std::cbrt(1.5 * g);
    const double width = std::max(1.0, 0.6 * tf_radius);
    std::vector<cd> psi(m);
    for (std::size_t i = 0; i < m; ++i)
        psi[i] = std::exp(-0.5 * x_[i] * x_[i] / (width * width));

    auto normalise = [&] {
        double n = 0.0;
        for (const auto& v : psi)
            n += std::norm(v);
        const double s = 1.0 / std::sqrt(n * dx_);
        for (auto& v : psi)
            v = cd(v.real() * s, 0.0);
    };
    auto energy = [&] {
        std::vector<double> re(m);
        for (std::size_t i = 0; i < m; ++i)
            re[i] = psi[i].real();
        return energies(re, atoms).total();
    };
    normalise();

    // Imaginary-time Strang splitting leaves an O(dtau^2) bias in the fixed
    // point, so refine the step once each rung has converged.
    constexpr std::size_t kBudget = 400000;
    constexpr std::size_t kCheckEvery = 20;
    std::size_t used = 0;
    for (double dtau : {1e-2, 1e-3, 1e-4}) {
        std::vector<double> half(m);
        for (std::size_t j = 0; j < m; ++j)
            half[j] = std::exp(-0.25 * k2_[j] * dtau) / static_cast<double>(m);
        double last = energy();
        bool converged = false;
        while (used < kBudget) {
            for (std::size_t s = 0; s < kCheckEvery; ++s, ++used) {
                plans_->to_k(psi);
                for (std::size_t j = 0; j < m; ++j)
                    psi[j] *= half[j];
                plans_->to_x(psi);
                for (std::size_t i = 0; i < m; ++i)
                    psi[i] *= std::exp(-(potential_[i] + g * std::norm(psi[i])) * dtau);
                plans_->to_k(psi);
                for (std::size_t j = 0; j < m; ++j)
                    psi[j] *= half[j];
                plans_->to_x(psi);
                normalise();
            }
            const double now = energy();
            const double per_step = std::abs(now - last) / kCheckEvery;
            last = now;
            // 1e-10 per step at the coarsest rung, scaled with the step.
            if (per_step < 1e-10 * dtau / 1e-2) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream msg;
            msg << "ground state did not converge within " << kBudget << " imaginary-time steps";
            throw NumericalError(msg.str(), std::abs(energy() - last));
        }
    }
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i)
        out[i] = std::abs(psi[i].real());
    const double edge = std::max(out.front() * out.front(), out.back() * out.back());
    const double peak = *std::max_element(out.begin(), out.end());
    if (edge > 1e-10 * peak * peak) {
        std::ostringstream msg;
        msg << "ground state density at the box edge is " << edge / (peak * peak)
            << " of the peak; enlarge the box";
        throw NumericalError(msg.str(), edge / (peak * peak));
    }
    return out;
}

KerrParams SpdeModel::frozen_mode_kerr(std::span<const double> psi0) const
{
    const double a = units_.length();
    std::vector<double> density(psi0.size());
    for (std::size_t i = 0; i < psi0.size(); ++i)
        density[i] = psi0[i] * psi0[i] / a;
    const CartesianDensity mode{density, dx_ * a};
    const auto& sp = params_.species;
    auto chi = [&](double scattering) {
        const double u1 = reduce_to_1d(interaction_strength_3d(scattering, sp.mass),
                                       params_.trap.omega_perp, sp.mass);
        return chi_from_mode(u1, mode);
    };
    return {chi(sp.a11), chi(sp.a22), chi(sp.a12), 0.0};
}

std::vector<double> gpe_ground_state(const Grid1D& grid, double u11_1d, double n0_mean,
                                     double omega, double mass)
{
    grid.validate();
    if (!(n0_mean > 0.0) || !(u11_1d >= 0.0))
        throw ParameterError("ground state needs positive atom number and non-negative U");
    const TrapUnits units(mass, omega);
    // A model whose a11 reproduces the requested U11 with omega_perp = omega.
    const double a_perp_sq = kHbar / (mass * omega);
    TwParams p;
    p.species = {mass, u11_1d * 2.0 * kPi * a_perp_sq * mass / (4.0 * kPi * kHbar * kHbar), 0.0, 0.0};
    p.trap = {omega, omega};
    p.points = grid.points;
    p.box_ho_lengths = units.to_length(grid.length);
    p.dt = units.from_time(1e-3);
    const SpdeModel with_u(p);
    auto psi = with_u.ground_state(n0_mean);
    const double s = 1.0 / std::sqrt(units.length());
    for (auto& v : psi)
        v *= s;
    return psi;
}

// ---------------------------------------------------------------------------

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index)
{
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

FieldState sample_wigner_initial(std::span<const double> psi0, double dx, double n0_mean,
                                 double fano, std::uint64_t seed)
{
    if (!(dx > 0.0))
        throw ParameterError("grid spacing must be positive");
    if (!(n0_mean >= 0.0) || !(fano >= 0.0))
        throw ParameterError("n0_mean and fano must be non-negative");
    std::mt19937_64 rng(seed);

    double atoms = n0_mean;
    if (fano > 1.0) {
        std::normal_distribution<double> number(n0_mean, std::sqrt((fano - 1.0) * n0_mean));
        do {
            atoms = number(rng);
        } while (atoms < 0.0);
    }

    std::normal_distribution<double> quadrature(0.0, std::sqrt(0.25 / dx));
    const double amp = std::sqrt(atoms);
    FieldState st;
    st.psi1.resize(psi0.size());
    st.psi2.resize(psi0.size());
    for (std::size_t i = 0; i < psi0.size(); ++i) {
        const double re = quadrature(rng);
        const double im = quadrature(rng);
        st.psi1[i] = cd(amp * psi0[i] + re, im);
    }
    for (std::size_t i = 0; i < psi0.size(); ++i) {
        const double re = quadrature(rng);
        const double im = quadrature(rng);
        st.psi2[i] = cd(re, im);
    }
    return st;
}

TrajectoryRecord run_trajectory(const SpdeModel& model, std::span<const double> psi0,
                                const PulseSchedule& schedule, std::span<const double> phases,
                                const InitialCondition& init, std::uint64_t seed,
                                bool record_densities)
{
    schedule.validate();
    if (psi0.size() != model.points())
        throw ParameterError("ground state does not match the model grid");
    if (phases.empty())
        throw ParameterError("at least one second-pulse phase is required");

    const double dx = model.dx();
    FieldState st = sample_wigner_initial(psi0, dx, init.n0_mean, init.fano, seed);
    st.time = schedule.t0;

    TrajectoryRecord rec;
    rec.nw1_t0 = wigner_number(st.psi1, dx);
    rec.nw2_t0 = wigner_number(st.psi2, dx);

    auto snapshot = [&](std::vector<double>& d1, std::vector<double>& d2) {
        if (!record_densities)
            return;
        d1.resize(st.psi1.size());
        d2.resize(st.psi2.size());
        for (std::size_t i = 0; i < st.psi1.size(); ++i) {
            d1[i] = std::norm(st.psi1[i]);
            d2[i] = std::norm(st.psi2[i]);
        }
    };

    model.propagate(st, schedule.t1 - schedule.t0, {schedule.omega0, 0.0});
    snapshot(rec.density1_t1, rec.density2_t1);
    model.propagate(st, schedule.t2 - schedule.t1, {0.0, 0.0});
    snapshot(rec.density1_t2, rec.density2_t2);

    rec.nw1_t3.reserve(phases.size());
    rec.nw2_t3.reserve(phases.size());
    for (double phi : phases) {
        FieldState branch = st;
        model.propagate(branch, schedule.t3 - schedule.t2, {schedule.omega0, phi});
        rec.nw1_t3.push_back(wigner_number(branch.psi1, dx));
        rec.nw2_t3.push_back(wigner_number(branch.psi2, dx));
    }
    return rec;
}

// ---------------------------------------------------------------------------

void EnsembleStats::reset(std::size_t phases, std::size_t points)
{
    *this = EnsembleStats{};
    n1_t3.assign(phases, {});
    n2_t3.assign(phases, {});
    total_t3.assign(phases, {});
    density1_t1_sum.assign(points, 0.0);
    density2_t1_sum.assign(points, 0.0);
    density1_t2_sum.assign(points, 0.0);
    density2_t2_sum.assign(points, 0.0);
}

void EnsembleStats::add(const TrajectoryRecord& r)
{
    ++n_traj;
    total_t0.add(r.nw1_t0 + r.nw2_t0);
    n1_t0.add(r.nw1_t0);
    for (std::size_t p = 0; p < n2_t3.size(); ++p) {
        n1_t3[p].add(r.nw1_t3[p]);
        n2_t3[p].add(r.nw2_t3[p]);
        total_t3[p].add(r.nw1_t3[p] + r.nw2_t3[p]);
    }
    auto accumulate = [](std::vector<double>& sum, const std::vector<double>& d) {
        for (std::size_t i = 0; i < d.size() && i < sum.size(); ++i)
            sum[i] += d[i];
    };
    accumulate(density1_t1_sum, r.density1_t1);
    accumulate(density2_t1_sum, r.density2_t1);
    accumulate(density1_t2_sum, r.density1_t2);
    accumulate(density2_t2_sum, r.density2_t2);
}

void EnsembleStats::merge(const EnsembleStats& o)
{
    n_traj += o.n_traj;
    total_t0.merge(o.total_t0);
    n1_t0.merge(o.n1_t0);
    for (std::size_t p = 0; p < n2_t3.size(); ++p) {
        n1_t3[p].merge(o.n1_t3[p]);
        n2_t3[p].merge(o.n2_t3[p]);
        total_t3[p].merge(o.total_t3[p]);
    }
    for (std::size_t i = 0; i < density1_t1_sum.size(); ++i) {
        density1_t1_sum[i] += o.density1_t1_sum[i];
        density2_t1_sum[i] += o.density2_t1_sum[i];
        density1_t2_sum[i] += o.density1_t2_sum[i];
        density2_t2_sum[i] += o.density2_t2_sum[i];
    }
}

EnsembleResult summarize_ensemble(const SpdeModel& model, const EnsembleStats& stats,
                                  std::span<const double> phases)
{
    const std::size_t m = model.points();
    EnsembleResult out;
    out.n_traj = stats.n_traj;
    out.phases.assign(phases.begin(), phases.end());
    for (std::size_t p = 0; p < phases.size(); ++p) {
        out.mode2.push_back(extract_moments(stats.n2_t3[p], m));
        out.mode1.push_back(extract_moments(stats.n1_t3[p], m));
        const auto total = extract_moments(stats.total_t3[p], 2 * m);
        out.total_t3.push_back(total.mean_n2);
        out.total_t3_stderr.push_back(total.stderr_mean);
    }
    out.mode1_initial = extract_moments(stats.n1_t0, m);
    const auto total0 = extract_moments(stats.total_t0, 2 * m);
    out.total_t0 = total0.mean_n2;
    out.total_t0_stderr = total0.stderr_mean;

    const double a = model.units().length();
    const double vacuum = 0.5 / model.dx();
    const double inv_n = 1.0 / static_cast<double>(stats.n_traj);
    auto to_si = [&](const std::vector<double>& sum) {
        std::vector<double> d(sum.size());
        for (std::size_t i = 0; i < sum.size(); ++i)
            d[i] = (sum[i] * inv_n - vacuum) / a;
        return d;
    };
    out.x.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        out.x[i] = model.units().from_length(model.x()[i]);
    out.density1_t1 = to_si(stats.density1_t1_sum);
    out.density2_t1 = to_si(stats.density2_t1_sum);
    out.density1_t2 = to_si(stats.density1_t2_sum);
    out.density2_t2 = to_si(stats.density2_t2_sum);
    return out;
}

EnsembleResult run_ensemble(const SpdeModel& model, std::span<const double> psi0,
                            const PulseSchedule& schedule, std::span<const double> phases,
                            const InitialCondition& init, const EnsembleOptions& options)
{
    if (options.n_traj < 2)
        throw ParameterError("an ensemble needs at least two trajectories");
    std::vector<double> phase_list(phases.begin(), phases.end());
    if (phase_list.empty())
        phase_list.push_back(schedule.phi2);

    const std::size_t chunks = (options.n_traj + kChunk - 1) / kChunk;
    std::vector<EnsembleStats> partial(chunks);
    parallel_for(chunks, options.threads, [&](std::size_t c) {
        EnsembleStats& acc = partial[c];
        acc.reset(phase_list.size(), model.points());
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min<std::uint64_t>(begin + kChunk, options.n_traj);
        for (std::uint64_t i = begin; i < end; ++i)
            acc.add(run_trajectory(model, psi0, schedule, phase_list, init,
                                   trajectory_seed(options.master_seed, i), options.record_densities));
    });

    EnsembleStats total;
    total.reset(phase_list.size(), model.points());
    for (const auto& p : partial)
        total.merge(p);
    return summarize_ensemble(model, total, phase_list);
}

}  // namespace squeeze
