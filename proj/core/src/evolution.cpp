#include "tebd/evolution.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "tebd/observables.hpp"

namespace tebd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

long integral_step_count(double total_time, double delta, const char* who) {
  if (!(delta > 0)) throw std::invalid_argument(std::string(who) + ": delta must be positive");
  if (total_time < 0) throw std::invalid_argument(std::string(who) + ": negative time span");
  const double raw = total_time / delta;
  const long steps = std::lround(raw);
  if (std::abs(raw - static_cast<double>(steps)) > 1e-9 * std::max(1.0, raw))
    throw std::invalid_argument(std::string(who) +
                                ": total time must be an integer multiple of delta");
  return steps;
}

void record_sample(EvolutionReport& report, double t, double cum, const VidalMps& state,
                   const std::vector<int>& spectrum_bonds) {
  report.times.push_back(t);
  report.cum_discarded.push_back(cum);
  report.max_chi.push_back(state.max_rank());
  report.ranks.push_back(state.bond_ranks());
  for (int b : spectrum_bonds) report.bond_spectra[b].push_back(state.schmidt_spectrum(b));
}

void guard_finite(const VidalMps& state, long step) {
  if (!state.all_finite())
    throw NumericalError("evolution: non-finite tensor entry after step " +
                         std::to_string(step));
}

}  // namespace

double apply_schedule_step(VidalMps& state, const GateSchedule& schedule,
                           const TruncationPolicy& policy, int threads) {
  const bool nonunitary = schedule.axis == TimeAxis::imaginary_time;
  double step_weight = 0.0;
  for (const GateLayer& layer : schedule.layers) {
    const size_t m = layer.bond_gates.size();
    std::vector<double> weights(m, 0.0);
    if (threads > 1 && m > 1) {
      const int workers = std::min<int>(threads, static_cast<int>(m));
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (size_t g = w; g < m; g += workers) {
            const auto& [bond, gate] = layer.bond_gates[g];
            weights[g] = state.apply_two_site_gate(bond, gate, policy);
          }
        });
      }
      for (auto& th : pool) th.join();
    } else {
      for (size_t g = 0; g < m; ++g) {
        const auto& [bond, gate] = layer.bond_gates[g];
        weights[g] = state.apply_two_site_gate(bond, gate, policy);
      }
    }
    for (double w : weights) step_weight += w;
    for (const auto& [site, gate] : layer.site_gates)
      state.apply_single_site_gate(site, gate, nonunitary);
  }
  return step_weight;
}

EvolutionReport evolve_real(VidalMps& state, const LocalHamiltonian& h,
                            const RealTimeOptions& opt, const StepHook& hook) {
  long steps = integral_step_count(opt.total_time, opt.delta, "evolve_real");
  if (opt.halt_after_steps >= 0) steps = std::min(steps, opt.halt_after_steps);

  const GateSchedule schedule = make_schedule(h, opt.delta, opt.order, TimeAxis::real_time);

  EvolutionReport report;
  record_sample(report, 0.0, 0.0, state, opt.spectrum_bonds);

  double cum = 0.0;
  for (long k = 1; k <= steps; ++k) {
    const auto t0 = Clock::now();
    const double w = apply_schedule_step(state, schedule, opt.policy, opt.threads);
    report.step_seconds.push_back(seconds_since(t0));
    cum += w;
    guard_finite(state, k);
    const double t = static_cast<double>(k) * opt.delta;
    if (hook) hook(StepInfo{k, t, w, cum}, state);
    const bool due = opt.sample_every > 0 && k % opt.sample_every == 0;
    if (due || k == steps) record_sample(report, t, cum, state, opt.spectrum_bonds);
  }
  report.steps_completed = steps;
  return report;
}

EvolutionReport evolve_imaginary(VidalMps& state, const LocalHamiltonian& h,
                                 const ImaginaryTimeOptions& opt, const StepHook& hook) {
  if (opt.delta_tau_schedule.empty())
    throw std::invalid_argument("evolve_imaginary: delta_tau schedule is empty");
  for (double dt : opt.delta_tau_schedule)
    if (!(dt > 0)) throw std::invalid_argument("evolve_imaginary: delta_tau must be positive");

  EvolutionReport report;
  double tau = 0.0;
  long total_steps = 0;

  state.normalize();
  record_sample(report, tau, 0.0, state, opt.spectrum_bonds);
  report.energies.push_back(energy_exact(state, h));

  double cum = 0.0;
  for (double dtau : opt.delta_tau_schedule) {
    const GateSchedule schedule = make_schedule(h, dtau, opt.order, TimeAxis::imaginary_time);
    const long probe_steps =
        opt.criterion.probe_interval > 0
            ? std::max<long>(1, std::lround(opt.criterion.probe_interval / dtau))
            : 10;

    VidalMps reference = state;
    bool stage_converged = false;
    for (long k = 1; k <= opt.criterion.max_steps_per_stage; ++k) {
      const auto t0 = Clock::now();
      cum += apply_schedule_step(state, schedule, opt.policy, opt.threads);
      state.normalize();
      report.step_seconds.push_back(seconds_since(t0));
      tau += dtau;
      ++total_steps;
      guard_finite(state, total_steps);
      if (hook) hook(StepInfo{total_steps, tau, 0.0, cum}, state);

      if (k % probe_steps == 0) {
        const double residual = 1.0 - std::norm(inner_product(reference, state));
        record_sample(report, tau, cum, state, opt.spectrum_bonds);
        report.energies.push_back(energy_exact(state, h));
        if (residual < opt.criterion.overlap_tol) {
          stage_converged = true;
          break;
        }
        reference = state;
      }
    }
    if (!stage_converged) {
      report.converged = false;
      report.stop_reason = "stage with delta_tau = " + std::to_string(dtau) +
                           " exhausted its step budget";
      break;
    }
  }
  // Non-unitary updates leave a residual gauge defect; sweep it out so the
  // returned state satisfies the canonical-form identities again. The 1e-16
  // weight floor sheds Schmidt channels too light for the gauge to hold.
  regauge(state, 1e-8, 16, 1e-16);
  state.normalize();
  report.steps_completed = total_steps;
  return report;
}

EvolutionReport evolve_adiabatic(VidalMps& state, const LocalHamiltonian& h_start,
                                 const LocalHamiltonian& h_end, const AdiabaticOptions& opt,
                                 const StepHook& hook) {
  const long steps = integral_step_count(opt.ramp_time, opt.delta, "evolve_adiabatic");
  if (steps == 0) throw std::invalid_argument("evolve_adiabatic: ramp needs at least one step");

  EvolutionReport report;
  record_sample(report, 0.0, 0.0, state, {});
  report.energies.push_back(energy_exact(state, h_start));

  double cum = 0.0;
  for (long k = 0; k < steps; ++k) {
    const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(steps);
    const LocalHamiltonian hs = interpolate(h_start, h_end, s);
    const GateSchedule schedule = make_schedule(hs, opt.delta, opt.order, TimeAxis::real_time);
    const auto t0 = Clock::now();
    cum += apply_schedule_step(state, schedule, opt.policy, opt.threads);
    report.step_seconds.push_back(seconds_since(t0));
    guard_finite(state, k + 1);
    const double t = static_cast<double>(k + 1) * opt.delta;
    if (hook) hook(StepInfo{k + 1, t, 0.0, cum}, state);
    const bool due = opt.sample_every > 0 && (k + 1) % opt.sample_every == 0;
    if (due || k + 1 == steps) {
      record_sample(report, t, cum, state, {});
      report.energies.push_back(energy_exact(state, hs));
    }
  }
  report.steps_completed = steps;
  return report;
}

void apply_local_excitation(VidalMps& state,
                            const std::vector<std::pair<int, CMatrix>>& factors) {
  for (const auto& [site, op] : factors) state.apply_single_site_gate(site, op, true);
  const double norm2 = inner_product(state, state).real();
  if (!(norm2 > 1e-24))
    throw std::invalid_argument("apply_local_excitation: excitation annihilated the state");
  state.normalize();
}

}  // namespace tebd
