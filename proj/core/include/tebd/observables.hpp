#pragma once

#include <vector>

#include "tebd/evolution.hpp"
#include "tebd/hamiltonian.hpp"
#include "tebd/mps.hpp"

namespace tebd {

/// <psi|H|psi> summed over the local terms; requires a normalized state.
/// Built on the canonical-form expectation shortcuts, so the state must be
/// in canonical form (any unitary-circuit product is).
double energy(const VidalMps& state, const LocalHamiltonian& h);

/// <psi|H|psi> / <psi|psi> by full transfer contraction. One O(n d chi^3)
/// sweep, exact in any gauge; the evaluator of choice while non-unitary
/// updates hold the state away from canonical form.
double energy_exact(const VidalMps& state, const LocalHamiltonian& h);

/// Total magnetization <sum_l sigma_z^[l]>.
double total_sz(const VidalMps& state);

/// Grid of <O_x(t)^dag O_src(0)> values relative to a source site. x is the
/// signed offset from the source; rows of `values` follow `offsets`, columns
/// follow `times`. ground_energy records the phase reference.
struct CorrelatorSeries {
  std::vector<int> offsets;
  std::vector<double> times;
  CMatrix values;
  double ground_energy = 0.0;
  int source_site = 0;
};

struct CorrelatorOptions {
  double t_max = 0.0;
  double delta = 0.0;
  int order = 2;
  TruncationPolicy policy;
  int sample_every = 1;       // sample times are multiples of sample_every * delta
  int source_site = -1;       // -1 picks the chain center n/2
  std::vector<int> offsets;   // empty means every site, as offsets from source
  int threads = 1;
};

/// Evaluates value(x, t) = e^{+i E_gr t} <gs| O_x^dag e^{-iHt} O_src |gs>
/// by evolving the excited state and overlapping against O_x|gs>. The
/// excited state is evolved normalized; its original norm multiplies the
/// result, so returned values carry physical magnitude. With O = identity
/// and gs an eigenstate the grid is identically 1, which pins the phase
/// convention. Throws if O annihilates the ground state.
CorrelatorSeries dynamic_correlator(const VidalMps& gs, const LocalHamiltonian& h,
                                    const CMatrix& op, const CorrelatorOptions& opt);

enum class Taper { none, hann };

/// Discrete space-time Fourier transform of a correlator grid:
///   S(k, w) = sum_{x,t} taper(t) C(x, t) exp(-i k x + i w t)
/// on the momentum grid k = 2 pi m / Nx (per site offset) and frequency
/// grid w = 2 pi m' / (Nt dt). Requires uniform grids: consecutive integer
/// offsets and equally spaced times.
struct StructureFactor {
  std::vector<double> k;
  std::vector<double> omega;
  CMatrix values;  // rows follow k, columns follow omega
};

StructureFactor structure_factor(const CorrelatorSeries& series, Taper window);

/// Squared Schmidt spectrum p_alpha at one bond over the sampled times of a
/// run, zero-padded to the largest rank seen.
struct SpectrumTrajectory {
  int bond = 0;
  std::vector<double> times;
  std::vector<RVector> spectra;
};

SpectrumTrajectory spectrum_trajectory(const EvolutionReport& report, int bond);

}  // namespace tebd
