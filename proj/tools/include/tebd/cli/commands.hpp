#pragma once

#include <string>

#include "tebd/cli/config.hpp"

namespace tebd::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kValidation = 2,
  kNonConvergence = 3,
  kNumericalAbort = 4,
};

struct RunOptions {
  std::string out_dir;
  std::string resume_path;  // quench only
  int threads = 1;
};

/// Ground-state search by imaginary time. Writes ground_state.snap,
/// energy_trace.csv (tau,energy,max_chi,discarded_weight_cum) and
/// summary.json. Non-convergence keeps the outputs and returns
/// kNonConvergence.
int cmd_ground(const ExperimentConfig& cfg, const RunOptions& run);

/// Real-time evolution with per-sample diagnostics. Writes spectrum.csv
/// (t,alpha,p_alpha), chi.csv, fidelity.csv when an oracle is enabled,
/// observables.csv when sampled observables are configured, periodic
/// checkpoints, and the manifest.
int cmd_quench(const ExperimentConfig& cfg, const RunOptions& run);

/// Dynamic correlator and its space-time Fourier transform. Writes
/// correlator.csv (x,t,re,im) and structure_factor.csv (k,omega,re,abs).
int cmd_correlator(const ExperimentConfig& cfg, const RunOptions& run);

/// Wall-clock sweeps over chain length and retained rank for offline slope
/// fits. Writes scaling.csv (n,chi,delta,steps,seconds).
int cmd_scaling(const ExperimentConfig& cfg, const RunOptions& run);

struct ScalingPointSpec {
  int n = 0;
  int chi = 0;
  double delta = 0.05;
  long steps = 30;
  int warmup_layers = 8;
  uint64_t seed = 0;
  int threads = 1;
};

/// One timed point of the cost-model sweep: pins every bond at the target
/// rank with seeded random entangling layers, then times `steps` Trotter
/// steps of the model at that rank cap.
double time_scaling_point(const ModelSpec& model, int d, const ScalingPointSpec& point);

struct Checkpoint {
  long step = 0;
  double t = 0.0;
  double cum_discarded = 0.0;
  VidalMps state;
};

void save_checkpoint(const std::string& path, const Checkpoint& chk);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tebd::cli
