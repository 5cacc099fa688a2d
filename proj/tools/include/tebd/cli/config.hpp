#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tebd/evolution.hpp"
#include "tebd/hamiltonian.hpp"
#include "tebd/mps.hpp"

namespace tebd::cli {

/// Anything wrong with a run configuration: unknown keys, missing blocks,
/// out-of-range values. Maps to the validation exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OracleKind { none, dense, two_magnon };

OracleKind parse_oracle_name(const std::string& name);

struct ModelSpec {
  std::string name;                 // ferromagnet | transverse_ising | explicit
  double b_field = 0.0;             // ferromagnet
  double j_coupling = 0.0;
  double field = 0.0;               // transverse_ising
  double coupling = 0.0;
  std::vector<CMatrix> k1, k2;      // explicit

  LocalHamiltonian build(int n, int d) const;
};

struct InitialStateSpec {
  enum class Kind { product, product_tilted, snapshot } kind = Kind::product;
  std::vector<int> configuration;  // product
  double theta = 0.0;              // product_tilted
  std::string path;                // snapshot
};

struct RealEvolutionSpec {
  double time = 0.0;
  double delta = 0.0;
  int order = 2;
  long halt_after_steps = 0;  // 0 = run to completion
};

struct ImaginaryEvolutionSpec {
  std::vector<double> delta_tau_schedule;
  int order = 2;
  double overlap_tol = 1e-10;
  double probe_interval = 0.0;  // tau units; 0 = ten steps of the running stage
  long max_steps_per_stage = 200000;
};

struct SamplerSpec {
  int interval_steps = 1;
  std::vector<int> bonds;
  std::vector<std::string> observables;  // energy | total_sz | norm
};

struct CorrelatorSpec {
  std::string operator_name = "sigma_minus";
  std::optional<CMatrix> operator_matrix;
  int source_site = -1;  // -1 = chain center
  double t_max = 0.0;
  double delta = 0.0;
  int order = 2;
  int sample_every = 1;
  std::string window = "none";  // none | hann
  std::vector<int> offsets;
  std::string input_csv;        // synthetic mode: transform this grid instead
  std::string ground_snapshot;  // reuse a stored ground state
};

struct ScalingSpec {
  std::vector<int> n_list;
  std::vector<int> chi_list;
  double delta = 0.05;
  long steps = 30;
  int warmup_layers = 8;
};

struct ExperimentConfig {
  ModelSpec model;
  int n = 0;
  int d = 2;
  InitialStateSpec initial_state;
  std::vector<std::pair<int, CMatrix>> excitation;
  std::optional<RealEvolutionSpec> real_evolution;
  std::optional<ImaginaryEvolutionSpec> imaginary_evolution;
  TruncationPolicy truncation;
  SamplerSpec samplers;
  OracleKind oracle = OracleKind::none;
  long checkpoint_interval_steps = 0;
  uint64_t seed = 0;
  std::string output_directory;
  std::optional<CorrelatorSpec> correlator;
  std::optional<ScalingSpec> scaling;

  nlohmann::json resolved;  // parsed document, echoed into the manifest

  LocalHamiltonian build_hamiltonian() const { return model.build(n, d); }
  LocalHamiltonian build_hamiltonian(int chain_length) const {
    return model.build(chain_length, d);
  }
  /// Initial state before any excitation factors.
  VidalMps build_initial_state() const;
};

/// Parses and validates a config file. Validation is fail-closed: any key
/// the schema does not know is an error.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& doc);

/// d = 2 operators by name: sigma_x, sigma_y, sigma_z, sigma_plus,
/// sigma_minus, identity.
CMatrix named_operator(const std::string& name);

}  // namespace tebd::cli
