#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tebd/hamiltonian.hpp"
#include "tebd/mps.hpp"

namespace tebd {

/// Thrown when a run produces non-finite tensor entries.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepInfo {
  long step = 0;           // 1-based completed step count
  double t = 0.0;          // evolved time (or accumulated tau)
  double step_discarded = 0.0;
  double cum_discarded = 0.0;
};

/// Called after every completed Trotter step.
using StepHook = std::function<void(const StepInfo&, const VidalMps&)>;

/// Per-sample diagnostics of one run. Rows are parallel across the vectors;
/// bond_spectra holds the raw Schmidt vectors of the requested bonds at each
/// sample. step_seconds has one entry per executed step, not per sample.
struct EvolutionReport {
  std::vector<double> times;
  std::vector<double> cum_discarded;
  std::vector<int> max_chi;
  std::vector<std::vector<int>> ranks;
  std::map<int, std::vector<RVector>> bond_spectra;
  std::vector<double> energies;  // imaginary-time probes, adiabatic samples
  std::vector<double> step_seconds;
  long steps_completed = 0;
  bool converged = true;
  std::string stop_reason;
};

struct RealTimeOptions {
  double total_time = 0.0;
  double delta = 0.0;
  int order = 2;
  TruncationPolicy policy;
  int sample_every = 1;            // in steps; 0 samples only endpoints
  std::vector<int> spectrum_bonds;
  int threads = 1;
  long halt_after_steps = -1;      // stop early after this many steps (resume support)
};

/// Trotterized real-time evolution exp(-i H T). total_time must be an
/// integer multiple of delta within 1e-9. The state is advanced in place.
EvolutionReport evolve_real(VidalMps& state, const LocalHamiltonian& h,
                            const RealTimeOptions& opt, const StepHook& hook = {});

struct ConvergenceCriterion {
  double overlap_tol = 1e-10;
  double probe_interval = 0.0;  // tau units; <= 0 means 10 steps of the stage
  long max_steps_per_stage = 200000;
};

struct ImaginaryTimeOptions {
  std::vector<double> delta_tau_schedule{0.1, 0.01, 0.001};
  int order = 2;
  TruncationPolicy policy;
  ConvergenceCriterion criterion;
  std::vector<int> spectrum_bonds;
  int threads = 1;
};

/// Ground-state search by normalized imaginary-time evolution. Runs each
/// delta_tau stage until 1 - |<psi_tau|psi_tau+tau'>|^2 drops below
/// overlap_tol, then moves to the next stage. The state is normalized after
/// every step. A stage that exhausts its step budget marks the report
/// non-converged; the state so far is still returned. Assumes the starting
/// state has nonzero ground-state overlap (not checkable here).
EvolutionReport evolve_imaginary(VidalMps& state, const LocalHamiltonian& h,
                                 const ImaginaryTimeOptions& opt, const StepHook& hook = {});

struct AdiabaticOptions {
  double ramp_time = 0.0;
  double delta = 0.0;
  int order = 2;
  TruncationPolicy policy;
  int sample_every = 1;
  int threads = 1;
};

/// Piecewise-constant ramp between two Hamiltonians: step k of m runs under
/// interpolate(h_start, h_end, (k+1/2)/m) with a fresh schedule. The caller
/// is responsible for starting in the ground state of h_start.
EvolutionReport evolve_adiabatic(VidalMps& state, const LocalHamiltonian& h_start,
                                 const LocalHamiltonian& h_end, const AdiabaticOptions& opt,
                                 const StepHook& hook = {});

/// Applies a product of single-site factors (not necessarily unitary, e.g.
/// sigma_minus) in order, then normalizes. Rejects excitations that
/// annihilate the state.
void apply_local_excitation(VidalMps& state, const std::vector<std::pair<int, CMatrix>>& factors);

/// Applies one full Trotter step (all layers of the schedule, in order) and
/// returns its total discarded weight. Within a layer the bond gates touch
/// disjoint tensors; threads > 1 applies them concurrently, which does not
/// change any result bit since per-bond weights are reduced in bond order.
double apply_schedule_step(VidalMps& state, const GateSchedule& schedule,
                           const TruncationPolicy& policy, int threads = 1);

}  // namespace tebd
