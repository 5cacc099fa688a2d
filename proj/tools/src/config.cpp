#include "tebd/cli/config.hpp"

#include <fstream>
#include <set>

#include "tebd/snapshot.hpp"

namespace tebd::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key \"" + key + "\"");
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
  return obj.at(key);
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

long as_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<long>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
  return v.get<bool>();
}

// Matrices come in as nested arrays of [re, im] pairs.
CMatrix parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a matrix");
  const size_t rows = v.size();
  const size_t cols = v.at(0).is_array() ? v.at(0).size() : 0;
  if (cols == 0) throw ConfigError(where + ": empty matrix row");
  CMatrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    const json& row = v.at(r);
    if (!row.is_array() || row.size() != cols)
      throw ConfigError(where + ": ragged matrix");
    for (size_t c = 0; c < cols; ++c) {
      const json& cell = row.at(c);
      if (!cell.is_array() || cell.size() != 2)
        throw ConfigError(where + ": entries must be [re, im] pairs");
      m(r, c) = Complex(as_double(cell.at(0), where), as_double(cell.at(1), where));
    }
  }
  return m;
}

ModelSpec parse_model(const json& v) {
  ModelSpec model;
  model.name = as_string(require(v, "name", "model"), "model.name");
  if (model.name == "ferromagnet") {
    check_keys(v, "model", {"name", "b_field", "j_coupling"});
    model.b_field = as_double(require(v, "b_field", "model"), "model.b_field");
    model.j_coupling = as_double(require(v, "j_coupling", "model"), "model.j_coupling");
  } else if (model.name == "transverse_ising") {
    check_keys(v, "model", {"name", "field", "coupling"});
    model.field = as_double(require(v, "field", "model"), "model.field");
    model.coupling = as_double(require(v, "coupling", "model"), "model.coupling");
  } else if (model.name == "explicit") {
    check_keys(v, "model", {"name", "k1", "k2"});
    for (const json& m : require(v, "k1", "model"))
      model.k1.push_back(parse_matrix(m, "model.k1"));
    for (const json& m : require(v, "k2", "model"))
      model.k2.push_back(parse_matrix(m, "model.k2"));
  } else {
    throw ConfigError("model.name: unknown model \"" + model.name + "\"");
  }
  return model;
}

InitialStateSpec parse_initial_state(const json& v, int n) {
  InitialStateSpec spec;
  const std::string kind = as_string(require(v, "kind", "initial_state"), "initial_state.kind");
  if (kind == "product") {
    check_keys(v, "initial_state", {"kind", "configuration"});
    spec.kind = InitialStateSpec::Kind::product;
    for (const json& c : require(v, "configuration", "initial_state"))
      spec.configuration.push_back(static_cast<int>(as_integer(c, "initial_state.configuration")));
    if (static_cast<int>(spec.configuration.size()) != n)
      throw ConfigError("initial_state.configuration: expected exactly n entries");
  } else if (kind == "product_tilted") {
    check_keys(v, "initial_state", {"kind", "theta"});
    spec.kind = InitialStateSpec::Kind::product_tilted;
    spec.theta = as_double(require(v, "theta", "initial_state"), "initial_state.theta");
  } else if (kind == "snapshot") {
    check_keys(v, "initial_state", {"kind", "path"});
    spec.kind = InitialStateSpec::Kind::snapshot;
    spec.path = as_string(require(v, "path", "initial_state"), "initial_state.path");
  } else {
    throw ConfigError("initial_state.kind: unknown kind \"" + kind + "\"");
  }
  return spec;
}

}  // namespace

OracleKind parse_oracle_name(const std::string& name) {
  if (name == "none") return OracleKind::none;
  if (name == "dense") return OracleKind::dense;
  if (name == "two-magnon") return OracleKind::two_magnon;
  throw ConfigError("oracle: expected none, dense or two-magnon, got \"" + name + "\"");
}

CMatrix named_operator(const std::string& name) {
  if (name == "sigma_x") return pauli_x();
  if (name == "sigma_y") return pauli_y();
  if (name == "sigma_z") return pauli_z();
  if (name == "sigma_plus") return sigma_plus();
  if (name == "sigma_minus") return sigma_minus();
  if (name == "identity") return identity_matrix(2);
  throw ConfigError("unknown operator name \"" + name + "\"");
}

LocalHamiltonian ModelSpec::build(int n, int d) const {
  if (name == "ferromagnet") {
    if (d != 2) throw ConfigError("model ferromagnet requires d = 2");
    return heisenberg_ferromagnet(n, b_field, j_coupling);
  }
  if (name == "transverse_ising") {
    if (d != 2) throw ConfigError("model transverse_ising requires d = 2");
    return transverse_field_chain(n, field, coupling);
  }
  LocalHamiltonian h;
  h.n = n;
  h.d = d;
  h.k1 = k1;
  h.k2 = k2;
  h.validate();
  return h;
}

VidalMps ExperimentConfig::build_initial_state() const {
  switch (initial_state.kind) {
    case InitialStateSpec::Kind::product: {
      std::vector<CVector> locals;
      for (int l = 0; l < n; ++l) {
        const int idx = initial_state.configuration[l];
        if (idx < 0 || idx >= d)
          throw ConfigError("initial_state.configuration: index out of range");
        CVector v = CVector::Zero(d);
        v[idx] = 1.0;
        locals.push_back(std::move(v));
      }
      return VidalMps::product_state(locals);
    }
    case InitialStateSpec::Kind::product_tilted: {
      if (d != 2) throw ConfigError("initial_state product_tilted requires d = 2");
      CVector v(2);
      v << std::cos(initial_state.theta), std::sin(initial_state.theta);
      return VidalMps::product_state(std::vector<CVector>(n, v));
    }
    case InitialStateSpec::Kind::snapshot: {
      VidalMps state = load_snapshot(initial_state.path);
      if (state.size() != n || state.phys_dim() != d)
        throw ConfigError("initial_state.path: snapshot shape does not match n, d");
      return state;
    }
  }
  throw ConfigError("initial_state: unreachable kind");
}

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc, "config",
             {"model", "n", "d", "initial_state", "excitation", "evolution", "truncation",
              "samplers", "oracle", "checkpoint", "seed", "output", "correlator", "scaling"});

  ExperimentConfig cfg;
  cfg.resolved = doc;
  cfg.model = parse_model(require(doc, "model", "config"));
  cfg.n = static_cast<int>(as_integer(require(doc, "n", "config"), "n"));
  if (cfg.n < 2) throw ConfigError("n: need at least two sites");
  if (doc.contains("d")) {
    cfg.d = static_cast<int>(as_integer(doc.at("d"), "d"));
    if (cfg.d < 2) throw ConfigError("d: local dimension must be >= 2");
  }

  cfg.initial_state = parse_initial_state(require(doc, "initial_state", "config"), cfg.n);

  if (doc.contains("excitation")) {
    if (!doc.at("excitation").is_array())
      throw ConfigError("excitation: expected an array of factors");
    for (const json& f : doc.at("excitation")) {
      check_keys(f, "excitation[]", {"site", "op", "matrix"});
      const int site = static_cast<int>(as_integer(require(f, "site", "excitation[]"), "excitation[].site"));
      if (site < 0 || site >= cfg.n) throw ConfigError("excitation[].site: out of range");
      CMatrix op;
      if (f.contains("matrix"))
        op = parse_matrix(f.at("matrix"), "excitation[].matrix");
      else
        op = named_operator(as_string(require(f, "op", "excitation[]"), "excitation[].op"));
      if (op.rows() != cfg.d || op.cols() != cfg.d)
        throw ConfigError("excitation[]: operator must be d x d");
      cfg.excitation.emplace_back(site, std::move(op));
    }
  }

  if (doc.contains("evolution")) {
    const json& evo = doc.at("evolution");
    const std::string axis = as_string(require(evo, "axis", "evolution"), "evolution.axis");
    if (axis == "real") {
      check_keys(evo, "evolution", {"axis", "time", "delta", "order", "halt_after_steps"});
      RealEvolutionSpec spec;
      spec.time = as_double(require(evo, "time", "evolution"), "evolution.time");
      spec.delta = as_double(require(evo, "delta", "evolution"), "evolution.delta");
      if (spec.time < 0) throw ConfigError("evolution.time: must be non-negative");
      if (!(spec.delta > 0)) throw ConfigError("evolution.delta: must be positive");
      if (evo.contains("order"))
        spec.order = static_cast<int>(as_integer(evo.at("order"), "evolution.order"));
      if (spec.order != 1 && spec.order != 2)
        throw ConfigError("evolution.order: only 1 and 2 are supported");
      if (evo.contains("halt_after_steps")) {
        spec.halt_after_steps = as_integer(evo.at("halt_after_steps"), "evolution.halt_after_steps");
        if (spec.halt_after_steps < 0)
          throw ConfigError("evolution.halt_after_steps: must be >= 0");
      }
      cfg.real_evolution = spec;
    } else if (axis == "imaginary") {
      check_keys(evo, "evolution",
                 {"axis", "delta_tau_schedule", "order", "overlap_tol",
                  "probe_interval", "max_steps_per_stage"});
      ImaginaryEvolutionSpec spec;
      for (const json& dt : require(evo, "delta_tau_schedule", "evolution"))
        spec.delta_tau_schedule.push_back(as_double(dt, "evolution.delta_tau_schedule"));
      if (spec.delta_tau_schedule.empty())
        throw ConfigError("evolution.delta_tau_schedule: must list at least one stage");
      for (double dt : spec.delta_tau_schedule)
        if (!(dt > 0)) throw ConfigError("evolution.delta_tau_schedule: stages must be positive");
      if (evo.contains("order"))
        spec.order = static_cast<int>(as_integer(evo.at("order"), "evolution.order"));
      if (spec.order != 1 && spec.order != 2)
        throw ConfigError("evolution.order: only 1 and 2 are supported");
      if (evo.contains("overlap_tol")) {
        spec.overlap_tol = as_double(evo.at("overlap_tol"), "evolution.overlap_tol");
        if (!(spec.overlap_tol > 0)) throw ConfigError("evolution.overlap_tol: must be positive");
      }
      if (evo.contains("probe_interval")) {
        spec.probe_interval = as_double(evo.at("probe_interval"), "evolution.probe_interval");
        if (spec.probe_interval < 0)
          throw ConfigError("evolution.probe_interval: must be non-negative");
      }
      if (evo.contains("max_steps_per_stage")) {
        spec.max_steps_per_stage =
            as_integer(evo.at("max_steps_per_stage"), "evolution.max_steps_per_stage");
        if (spec.max_steps_per_stage < 1)
          throw ConfigError("evolution.max_steps_per_stage: must be >= 1");
      }
      cfg.imaginary_evolution = spec;
    } else {
      throw ConfigError("evolution.axis: expected real or imaginary");
    }
  }

  if (doc.contains("truncation")) {
    const json& tr = doc.at("truncation");
    check_keys(tr, "truncation", {"chi_max", "weight_tol", "renormalize"});
    if (tr.contains("chi_max")) {
      const long chi = as_integer(tr.at("chi_max"), "truncation.chi_max");
      if (chi < 1) throw ConfigError("truncation.chi_max: must be >= 1");
      cfg.truncation.chi_max = static_cast<int>(chi);
    }
    if (tr.contains("weight_tol")) {
      cfg.truncation.weight_tol = as_double(tr.at("weight_tol"), "truncation.weight_tol");
      if (cfg.truncation.weight_tol < 0)
        throw ConfigError("truncation.weight_tol: must be non-negative");
    }
    if (tr.contains("renormalize"))
      cfg.truncation.renormalize = as_bool(tr.at("renormalize"), "truncation.renormalize");
  }

  if (doc.contains("samplers")) {
    const json& s = doc.at("samplers");
    check_keys(s, "samplers", {"interval_steps", "bonds", "observables"});
    if (s.contains("interval_steps")) {
      cfg.samplers.interval_steps =
          static_cast<int>(as_integer(s.at("interval_steps"), "samplers.interval_steps"));
      if (cfg.samplers.interval_steps < 1)
        throw ConfigError("samplers.interval_steps: must be >= 1");
    }
    if (s.contains("bonds"))
      for (const json& b : s.at("bonds")) {
        const int bond = static_cast<int>(as_integer(b, "samplers.bonds"));
        if (bond < 0 || bond >= cfg.n - 1) throw ConfigError("samplers.bonds: out of range");
        cfg.samplers.bonds.push_back(bond);
      }
    if (s.contains("observables"))
      for (const json& o : s.at("observables")) {
        const std::string name = as_string(o, "samplers.observables");
        if (name != "energy" && name != "total_sz" && name != "norm")
          throw ConfigError("samplers.observables: unknown observable \"" + name + "\"");
        cfg.samplers.observables.push_back(name);
      }
  }

  if (doc.contains("oracle"))
    cfg.oracle = parse_oracle_name(as_string(doc.at("oracle"), "oracle"));

  if (doc.contains("checkpoint")) {
    const json& c = doc.at("checkpoint");
    check_keys(c, "checkpoint", {"interval_steps"});
    if (c.contains("interval_steps")) {
      cfg.checkpoint_interval_steps = as_integer(c.at("interval_steps"), "checkpoint.interval_steps");
      if (cfg.checkpoint_interval_steps < 0)
        throw ConfigError("checkpoint.interval_steps: must be >= 0");
    }
  }

  if (doc.contains("seed")) {
    const long s = as_integer(doc.at("seed"), "seed");
    if (s < 0) throw ConfigError("seed: must be non-negative");
    cfg.seed = static_cast<uint64_t>(s);
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, "output", {"directory"});
    if (o.contains("directory"))
      cfg.output_directory = as_string(o.at("directory"), "output.directory");
  }

  if (doc.contains("correlator")) {
    const json& c = doc.at("correlator");
    check_keys(c, "correlator",
               {"operator", "matrix", "source_site", "t_max", "delta", "order",
                "sample_every", "window", "offsets", "input_csv", "ground_snapshot"});
    CorrelatorSpec spec;
    if (c.contains("operator"))
      spec.operator_name = as_string(c.at("operator"), "correlator.operator");
    if (c.contains("matrix"))
      spec.operator_matrix = parse_matrix(c.at("matrix"), "correlator.matrix");
    if (c.contains("source_site")) {
      spec.source_site = static_cast<int>(as_integer(c.at("source_site"), "correlator.source_site"));
      if (spec.source_site >= cfg.n) throw ConfigError("correlator.source_site: out of range");
    }
    if (c.contains("input_csv"))
      spec.input_csv = as_string(c.at("input_csv"), "correlator.input_csv");
    if (spec.input_csv.empty()) {
      spec.t_max = as_double(require(c, "t_max", "correlator"), "correlator.t_max");
      spec.delta = as_double(require(c, "delta", "correlator"), "correlator.delta");
      if (spec.t_max < 0) throw ConfigError("correlator.t_max: must be non-negative");
      if (!(spec.delta > 0)) throw ConfigError("correlator.delta: must be positive");
    }
    if (c.contains("order"))
      spec.order = static_cast<int>(as_integer(c.at("order"), "correlator.order"));
    if (c.contains("sample_every")) {
      spec.sample_every = static_cast<int>(as_integer(c.at("sample_every"), "correlator.sample_every"));
      if (spec.sample_every < 1) throw ConfigError("correlator.sample_every: must be >= 1");
    }
    if (c.contains("window")) {
      spec.window = as_string(c.at("window"), "correlator.window");
      if (spec.window != "none" && spec.window != "hann")
        throw ConfigError("correlator.window: expected none or hann");
    }
    if (c.contains("offsets"))
      for (const json& x : c.at("offsets"))
        spec.offsets.push_back(static_cast<int>(as_integer(x, "correlator.offsets")));
    if (c.contains("ground_snapshot"))
      spec.ground_snapshot = as_string(c.at("ground_snapshot"), "correlator.ground_snapshot");
    cfg.correlator = spec;
  }

  if (doc.contains("scaling")) {
    const json& s = doc.at("scaling");
    check_keys(s, "scaling", {"n_list", "chi_list", "delta", "steps", "warmup_layers"});
    ScalingSpec spec;
    for (const json& v : require(s, "n_list", "scaling")) {
      const int n = static_cast<int>(as_integer(v, "scaling.n_list"));
      if (n < 2) throw ConfigError("scaling.n_list: entries must be >= 2");
      spec.n_list.push_back(n);
    }
    for (const json& v : require(s, "chi_list", "scaling")) {
      const int chi = static_cast<int>(as_integer(v, "scaling.chi_list"));
      if (chi < 1) throw ConfigError("scaling.chi_list: entries must be >= 1");
      spec.chi_list.push_back(chi);
    }
    if (spec.n_list.empty() || spec.chi_list.empty())
      throw ConfigError("scaling: n_list and chi_list must be non-empty");
    if (s.contains("delta")) {
      spec.delta = as_double(s.at("delta"), "scaling.delta");
      if (!(spec.delta > 0)) throw ConfigError("scaling.delta: must be positive");
    }
    if (s.contains("steps")) {
      spec.steps = as_integer(s.at("steps"), "scaling.steps");
      if (spec.steps < 1) throw ConfigError("scaling.steps: must be >= 1");
    }
    if (s.contains("warmup_layers")) {
      spec.warmup_layers = static_cast<int>(as_integer(s.at("warmup_layers"), "scaling.warmup_layers"));
      if (spec.warmup_layers < 0) throw ConfigError("scaling.warmup_layers: must be >= 0");
    }
    cfg.scaling = spec;
  }

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace tebd::cli
