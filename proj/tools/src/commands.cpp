#include "tebd/cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>

#include "tebd/cli/csv.hpp"
#include "tebd/cli/manifest.hpp"
#include "tebd/evolution.hpp"
#include "tebd/observables.hpp"
#include "tebd/oracle.hpp"
#include "tebd/snapshot.hpp"

namespace tebd::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string d17(double v) { return format_double(v); }

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir);
}

VidalMps initial_state_with_excitation(const ExperimentConfig& cfg) {
  VidalMps state = cfg.build_initial_state();
  if (!cfg.excitation.empty()) apply_local_excitation(state, cfg.excitation);
  return state;
}

// Exact reference evolution |psi(t)> = V e^{-iEt} V^dag |psi(0)> with the
// eigendecomposition done once.
class DenseReference {
public:
  DenseReference(const VidalMps& initial, const LocalHamiltonian& h)
      : n_(h.n), d_(h.d) {
    const CMatrix full = dense_hamiltonian(h);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(full);
    if (eig.info() != Eigen::Success)
      throw std::runtime_error("dense oracle: eigendecomposition failed");
    vectors_ = eig.eigenvectors();
    values_ = eig.eigenvalues();
    modal0_ = vectors_.adjoint() * dense_from_mps(initial).amplitudes;
  }

  double fidelity_error_at(double t, const VidalMps& state) const {
    CVector modal = modal0_;
    for (Eigen::Index k = 0; k < modal.size(); ++k)
      modal[k] *= std::exp(Complex(0, -values_[k] * t));
    DenseState exact;
    exact.n = n_;
    exact.d = d_;
    exact.amplitudes = vectors_ * modal;
    return fidelity_error(exact, state);
  }

private:
  int n_, d_;
  CMatrix vectors_;
  RVector values_;
  CVector modal0_;
};

// The two flipped sites of a two-magnon basis state, read off the
// magnetization profile. Rejects anything else.
std::pair<int, int> locate_flip_pair(const VidalMps& state) {
  std::vector<int> flips;
  const CMatrix sz = pauli_z();
  for (int l = 0; l < state.size(); ++l) {
    const double m = expect_local(state, l, sz).real();
    if (std::abs(m + 1.0) < 1e-9)
      flips.push_back(l);
    else if (std::abs(m - 1.0) > 1e-9)
      throw ConfigError(
          "two-magnon oracle: initial state must be a basis configuration "
          "with exactly two flipped sites");
  }
  if (flips.size() != 2)
    throw ConfigError("two-magnon oracle: initial state must hold exactly two flips");
  return {flips[0], flips[1]};
}

uint64_t mix_seed(uint64_t seed, int n, int chi) {
  uint64_t x = seed ^ (0x9e3779b97f4a7c15ull + static_cast<uint64_t>(n) * 1000003ull +
                       static_cast<uint64_t>(chi) * 10007ull);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  return x;
}

CMatrix seeded_random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c)
    if (std::abs(r(c, c)) > 0) q.col(c) *= r(c, c) / std::abs(r(c, c));
  return q;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& chk) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + tmp);
    out.write("TEBDCHK1", 8);
    const uint64_t step = static_cast<uint64_t>(chk.step);
    out.write(reinterpret_cast<const char*>(&step), sizeof step);
    out.write(reinterpret_cast<const char*>(&chk.t), sizeof chk.t);
    out.write(reinterpret_cast<const char*>(&chk.cum_discarded), sizeof chk.cum_discarded);
    write_snapshot(out, chk.state);
  }
  fs::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "TEBDCHK1")
    throw std::runtime_error("checkpoint: bad magic in " + path);
  Checkpoint chk;
  uint64_t step = 0;
  in.read(reinterpret_cast<char*>(&step), sizeof step);
  in.read(reinterpret_cast<char*>(&chk.t), sizeof chk.t);
  in.read(reinterpret_cast<char*>(&chk.cum_discarded), sizeof chk.cum_discarded);
  if (!in) throw std::runtime_error("checkpoint: truncated header in " + path);
  chk.step = static_cast<long>(step);
  chk.state = read_snapshot(in);
  return chk;
}

int cmd_ground(const ExperimentConfig& cfg, const RunOptions& run) {
  if (!cfg.imaginary_evolution)
    throw ConfigError("ground: config needs an evolution block with axis = imaginary");
  if (!run.resume_path.empty())
    throw ConfigError("ground: --resume is only supported by the quench command");

  ensure_out_dir(run.out_dir);
  RunManifest manifest(run.out_dir, "ground", cfg.resolved);
  const auto t0 = Clock::now();

  const LocalHamiltonian h = cfg.build_hamiltonian();
  VidalMps state = initial_state_with_excitation(cfg);

  const ImaginaryEvolutionSpec& spec = *cfg.imaginary_evolution;
  ImaginaryTimeOptions opt;
  opt.delta_tau_schedule = spec.delta_tau_schedule;
  opt.order = spec.order;
  opt.policy = cfg.truncation;
  opt.criterion.overlap_tol = spec.overlap_tol;
  opt.criterion.probe_interval = spec.probe_interval;
  opt.criterion.max_steps_per_stage = spec.max_steps_per_stage;
  opt.threads = run.threads;

  EvolutionReport report = evolve_imaginary(state, h, opt);

  {
    CsvWriter trace(run.out_dir + "/energy_trace.csv",
                    {"tau", "energy", "max_chi", "discarded_weight_cum"}, false);
    for (size_t k = 0; k < report.times.size(); ++k)
      trace.row({d17(report.times[k]), d17(report.energies[k]),
                 std::to_string(report.max_chi[k]), d17(report.cum_discarded[k])});
  }

  save_snapshot(run.out_dir + "/ground_state.snap", state);

  {
    nlohmann::json summary;
    summary["converged"] = report.converged;
    summary["stop_reason"] = report.stop_reason;
    summary["steps"] = report.steps_completed;
    summary["final_energy"] = energy_exact(state, h);
    summary["max_chi"] = state.max_rank();
    summary["canonical_defect"] = canonical_form_defect(state);
    std::ofstream out(run.out_dir + "/summary.json", std::ios::trunc);
    out << summary.dump(2) << '\n';
  }

  manifest.add_stage("imaginary_time", seconds_since(t0));
  manifest.add_file("energy_trace.csv");
  manifest.add_file("ground_state.snap");
  manifest.add_file("summary.json");
  manifest.write();
  return report.converged ? kOk : kNonConvergence;
}

int cmd_quench(const ExperimentConfig& cfg, const RunOptions& run) {
  if (!cfg.real_evolution)
    throw ConfigError("quench: config needs an evolution block with axis = real");
  const RealEvolutionSpec& evo = *cfg.real_evolution;

  const long total_steps = std::lround(evo.time / evo.delta);
  if (std::abs(evo.time / evo.delta - static_cast<double>(total_steps)) >
      1e-9 * std::max(1.0, evo.time / evo.delta))
    throw ConfigError("quench: evolution.time must be an integer multiple of delta");

  ensure_out_dir(run.out_dir);
  RunManifest manifest(run.out_dir, "quench", cfg.resolved);
  const auto t0 = Clock::now();

  const LocalHamiltonian h = cfg.build_hamiltonian();
  VidalMps initial = initial_state_with_excitation(cfg);

  const bool resuming = !run.resume_path.empty();
  VidalMps state = initial;
  long step0 = 0;
  double cum0 = 0.0;
  if (resuming) {
    if (!fs::exists(fs::path(run.out_dir) / "chi.csv"))
      throw ConfigError("quench: --resume must write into the original output directory");
    Checkpoint chk = load_checkpoint(run.resume_path);
    if (chk.state.size() != cfg.n || chk.state.phys_dim() != cfg.d)
      throw ConfigError("quench: checkpoint shape does not match the config");
    if (chk.step > total_steps)
      throw ConfigError("quench: checkpoint is past the configured time span");
    state = std::move(chk.state);
    step0 = chk.step;
    cum0 = chk.cum_discarded;
  }

  // Exact references, initialized from the t = 0 state.
  std::function<double(double, const VidalMps&)> fidelity_probe;
  std::unique_ptr<DenseReference> dense_ref;
  std::unique_ptr<TwoMagnonPropagator> magnon_prop;
  std::pair<int, int> magnon_pair{0, 1};
  if (cfg.oracle == OracleKind::dense) {
    dense_ref = std::make_unique<DenseReference>(initial, h);
    fidelity_probe = [&](double t, const VidalMps& s) {
      return dense_ref->fidelity_error_at(t, s);
    };
  } else if (cfg.oracle == OracleKind::two_magnon) {
    if (cfg.model.name != "ferromagnet")
      throw ConfigError("two-magnon oracle: model must be the builtin ferromagnet");
    magnon_pair = locate_flip_pair(initial);
    magnon_prop = std::make_unique<TwoMagnonPropagator>(cfg.n, cfg.model.b_field,
                                                        cfg.model.j_coupling);
    fidelity_probe = [&](double t, const VidalMps& s) {
      return fidelity_error(magnon_prop->evolve(magnon_pair, t), s);
    };
  }

  std::vector<int> bonds = cfg.samplers.bonds;
  if (bonds.empty()) bonds.push_back((cfg.n - 1) / 2);

  const bool append = resuming;
  std::map<int, std::unique_ptr<CsvWriter>> spectrum_csvs;
  for (size_t k = 0; k < bonds.size(); ++k) {
    const std::string name =
        k == 0 ? "spectrum.csv" : "spectrum_bond" + std::to_string(bonds[k]) + ".csv";
    spectrum_csvs[bonds[k]] = std::make_unique<CsvWriter>(
        run.out_dir + "/" + name, std::vector<std::string>{"t", "alpha", "p_alpha"}, append);
  }
  CsvWriter chi_csv(run.out_dir + "/chi.csv", {"t", "max_chi"}, append);
  std::unique_ptr<CsvWriter> fidelity_csv;
  if (fidelity_probe)
    fidelity_csv = std::make_unique<CsvWriter>(
        run.out_dir + "/fidelity.csv", std::vector<std::string>{"t", "epsilon"}, append);
  std::unique_ptr<CsvWriter> observables_csv;
  if (!cfg.samplers.observables.empty())
    observables_csv = std::make_unique<CsvWriter>(
        run.out_dir + "/observables.csv", std::vector<std::string>{"t", "name", "value"},
        append);

  auto write_sample = [&](double t, const VidalMps& s) {
    for (int b : bonds) {
      const RVector& lam = s.schmidt_spectrum(b);
      for (Eigen::Index a = 0; a < lam.size(); ++a)
        spectrum_csvs[b]->row({d17(t), std::to_string(a + 1), d17(lam[a] * lam[a])});
    }
    chi_csv.row({d17(t), std::to_string(s.max_rank())});
    if (fidelity_csv) fidelity_csv->row({d17(t), d17(fidelity_probe(t, s))});
    if (observables_csv)
      for (const std::string& name : cfg.samplers.observables) {
        double value = 0.0;
        if (name == "energy")
          value = energy_exact(s, h);
        else if (name == "total_sz")
          value = total_sz(s);
        else
          value = inner_product(s, s).real();
        observables_csv->row({d17(t), name, d17(value)});
      }
  };

  if (!resuming) write_sample(0.0, state);

  const std::string checkpoint_path = run.out_dir + "/checkpoint.chk";
  long last_step = step0;
  double last_cum = cum0;

  if (total_steps > step0) {
    RealTimeOptions opt;
    opt.total_time = static_cast<double>(total_steps - step0) * evo.delta;
    opt.delta = evo.delta;
    opt.order = evo.order;
    opt.policy = cfg.truncation;
    opt.sample_every = 0;
    opt.threads = run.threads;
    if (evo.halt_after_steps > 0)
      opt.halt_after_steps = std::max<long>(0, evo.halt_after_steps - step0);

    evolve_real(state, h, opt, [&](const StepInfo& info, const VidalMps& s) {
      const long gstep = step0 + info.step;
      const double t = static_cast<double>(gstep) * evo.delta;
      last_step = gstep;
      last_cum = cum0 + info.cum_discarded;
      const bool due = gstep % cfg.samplers.interval_steps == 0 || gstep == total_steps;
      if (due) write_sample(t, s);
      if (cfg.checkpoint_interval_steps > 0 && gstep % cfg.checkpoint_interval_steps == 0)
        save_checkpoint(checkpoint_path, {gstep, t, last_cum, s});
    });
  }

  const bool halted = last_step < total_steps;
  if (halted)
    save_checkpoint(checkpoint_path,
                    {last_step, static_cast<double>(last_step) * evo.delta, last_cum, state});

  manifest.add_stage("real_time", seconds_since(t0));
  for (const auto& [b, csv] : spectrum_csvs) csv->flush();
  chi_csv.flush();
  if (fidelity_csv) fidelity_csv->flush();
  if (observables_csv) observables_csv->flush();

  for (size_t k = 0; k < bonds.size(); ++k)
    manifest.add_file(k == 0 ? "spectrum.csv"
                             : "spectrum_bond" + std::to_string(bonds[k]) + ".csv");
  manifest.add_file("chi.csv");
  if (fidelity_csv) manifest.add_file("fidelity.csv");
  if (observables_csv) manifest.add_file("observables.csv");
  if (fs::exists(checkpoint_path)) manifest.add_file("checkpoint.chk");
  manifest.write();
  return kOk;
}

namespace {

CorrelatorSeries read_correlator_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("correlator.input_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "x,t,re,im")
    throw ConfigError("correlator.input_csv: expected header x,t,re,im");

  std::map<int, std::map<double, Complex>> grid;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int x;
    double t, re, im;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &x, &t, &re, &im) != 4)
      throw ConfigError("correlator.input_csv: malformed row \"" + line + "\"");
    grid[x][t] = Complex(re, im);
  }
  if (grid.empty()) throw ConfigError("correlator.input_csv: no data rows");

  CorrelatorSeries series;
  const auto& first_row = grid.begin()->second;
  for (const auto& [t, v] : first_row) series.times.push_back(t);
  for (const auto& [x, row] : grid) series.offsets.push_back(x);
  series.values.resize(static_cast<Eigen::Index>(series.offsets.size()),
                       static_cast<Eigen::Index>(series.times.size()));
  Eigen::Index r = 0;
  for (const auto& [x, row] : grid) {
    if (row.size() != series.times.size())
      throw ConfigError("correlator.input_csv: grid has holes");
    Eigen::Index c = 0;
    for (const auto& [t, v] : row) {
      if (t != series.times[c])
        throw ConfigError("correlator.input_csv: time grids differ between offsets");
      series.values(r, c) = v;
      ++c;
    }
    ++r;
  }
  return series;
}

void write_correlator_outputs(const CorrelatorSeries& series, Taper window,
                              const std::string& out_dir, RunManifest& manifest) {
  {
    CsvWriter grid(out_dir + "/correlator.csv", {"x", "t", "re", "im"}, false);
    for (size_t r = 0; r < series.offsets.size(); ++r)
      for (size_t c = 0; c < series.times.size(); ++c) {
        const Complex v = series.values(static_cast<Eigen::Index>(r),
                                        static_cast<Eigen::Index>(c));
        grid.row({std::to_string(series.offsets[r]), d17(series.times[c]),
                  d17(v.real()), d17(v.imag())});
      }
  }
  {
    StructureFactor sf = structure_factor(series, window);
    CsvWriter table(out_dir + "/structure_factor.csv", {"k", "omega", "re", "abs"}, false);
    for (size_t mk = 0; mk < sf.k.size(); ++mk)
      for (size_t mw = 0; mw < sf.omega.size(); ++mw) {
        const Complex v = sf.values(static_cast<Eigen::Index>(mk),
                                    static_cast<Eigen::Index>(mw));
        table.row({d17(sf.k[mk]), d17(sf.omega[mw]), d17(v.real()), d17(std::abs(v))});
      }
  }
  manifest.add_file("correlator.csv");
  manifest.add_file("structure_factor.csv");
}

}  // namespace

int cmd_correlator(const ExperimentConfig& cfg, const RunOptions& run) {
  if (!cfg.correlator)
    throw ConfigError("correlator: config needs a correlator block");
  if (!run.resume_path.empty())
    throw ConfigError("correlator: --resume is only supported by the quench command");
  const CorrelatorSpec& spec = *cfg.correlator;

  ensure_out_dir(run.out_dir);
  RunManifest manifest(run.out_dir, "correlator", cfg.resolved);
  const auto t0 = Clock::now();
  const Taper window = spec.window == "hann" ? Taper::hann : Taper::none;

  if (!spec.input_csv.empty()) {
    CorrelatorSeries series = read_correlator_csv(spec.input_csv);
    write_correlator_outputs(series, window, run.out_dir, manifest);
    manifest.add_stage("fourier_transform", seconds_since(t0));
    manifest.write();
    return kOk;
  }

  const LocalHamiltonian h = cfg.build_hamiltonian();

  VidalMps gs = [&] {
    if (!spec.ground_snapshot.empty()) {
      VidalMps state = load_snapshot(spec.ground_snapshot);
      if (state.size() != cfg.n || state.phys_dim() != cfg.d)
        throw ConfigError("correlator.ground_snapshot: shape does not match n, d");
      return state;
    }
    if (!cfg.imaginary_evolution)
      throw ConfigError(
          "correlator: provide correlator.ground_snapshot or an imaginary-time "
          "evolution block to prepare the ground state inline");
    VidalMps state = cfg.build_initial_state();
    ImaginaryTimeOptions opt;
    opt.delta_tau_schedule = cfg.imaginary_evolution->delta_tau_schedule;
    opt.order = cfg.imaginary_evolution->order;
    opt.policy = cfg.truncation;
    opt.criterion.overlap_tol = cfg.imaginary_evolution->overlap_tol;
    opt.criterion.probe_interval = cfg.imaginary_evolution->probe_interval;
    opt.criterion.max_steps_per_stage = cfg.imaginary_evolution->max_steps_per_stage;
    opt.threads = run.threads;
    EvolutionReport report = evolve_imaginary(state, h, opt);
    if (!report.converged)
      throw std::runtime_error("correlator: inline ground-state search did not converge");
    return state;
  }();

  const CMatrix op =
      spec.operator_matrix ? *spec.operator_matrix : named_operator(spec.operator_name);

  CorrelatorOptions opt;
  opt.t_max = spec.t_max;
  opt.delta = spec.delta;
  opt.order = spec.order;
  opt.policy = cfg.truncation;
  opt.sample_every = spec.sample_every;
  opt.source_site = spec.source_site;
  opt.offsets = spec.offsets;
  opt.threads = run.threads;

  CorrelatorSeries series = dynamic_correlator(gs, h, op, opt);
  write_correlator_outputs(series, window, run.out_dir, manifest);
  manifest.add_stage("correlator", seconds_since(t0));
  manifest.write();
  return kOk;
}

double time_scaling_point(const ModelSpec& model, int d, const ScalingPointSpec& point) {
  const LocalHamiltonian h = model.build(point.n, d);

  std::vector<CVector> locals(point.n, [&] {
    CVector v = CVector::Zero(d);
    v[0] = 1.0;
    return v;
  }());
  VidalMps state = VidalMps::product_state(locals);

  TruncationPolicy policy;
  policy.chi_max = point.chi;
  policy.weight_tol = 0.0;

  std::mt19937_64 rng(mix_seed(point.seed, point.n, point.chi));
  for (int layer = 0; layer < point.warmup_layers; ++layer)
    for (int parity : {0, 1})
      for (int b = parity; b < point.n - 1; b += 2)
        state.apply_two_site_gate(b, seeded_random_unitary(d * d, rng), policy);

  RealTimeOptions opt;
  opt.total_time = static_cast<double>(point.steps) * point.delta;
  opt.delta = point.delta;
  opt.order = 2;
  opt.policy = policy;
  opt.sample_every = 0;
  opt.threads = point.threads;

  const auto t0 = Clock::now();
  evolve_real(state, h, opt);
  return seconds_since(t0);
}

int cmd_scaling(const ExperimentConfig& cfg, const RunOptions& run) {
  if (!cfg.scaling) throw ConfigError("scaling: config needs a scaling block");
  if (!run.resume_path.empty())
    throw ConfigError("scaling: --resume is only supported by the quench command");
  const ScalingSpec& spec = *cfg.scaling;

  ensure_out_dir(run.out_dir);
  RunManifest manifest(run.out_dir, "scaling", cfg.resolved);
  const auto t0 = Clock::now();

  {
    CsvWriter table(run.out_dir + "/scaling.csv", {"n", "chi", "delta", "steps", "seconds"},
                    false);
    for (int n : spec.n_list)
      for (int chi : spec.chi_list) {
        ScalingPointSpec point;
        point.n = n;
        point.chi = chi;
        point.delta = spec.delta;
        point.steps = spec.steps;
        point.warmup_layers = spec.warmup_layers;
        point.seed = cfg.seed;
        point.threads = run.threads;
        const double secs = time_scaling_point(cfg.model, cfg.d, point);
        table.row({std::to_string(n), std::to_string(chi), d17(spec.delta),
                   std::to_string(spec.steps), d17(secs)});
      }
  }

  manifest.add_stage("sweep", seconds_since(t0));
  manifest.add_file("scaling.csv");
  manifest.write();
  return kOk;
}

}  // namespace tebd::cli
