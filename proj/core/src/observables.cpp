#include "tebd/observables.hpp"

#include <cmath>
#include <numbers>

namespace tebd {

double energy(const VidalMps& state, const LocalHamiltonian& h) {
  if (state.size() != h.n || state.phys_dim() != h.d)
    throw std::invalid_argument("energy: state and Hamiltonian shapes differ");
  Complex e(0, 0);
  for (int l = 0; l < h.n; ++l) e += expect_local(state, l, h.k1[l]);
  for (int b = 0; b < h.n - 1; ++b) e += expect_bond(state, b, h.k2[b]);
  return e.real();
}

namespace {

// Site matrices with the right-cut lambda folded in: A_l[i] = Gamma_l[i] diag(lambda_{l+1}).
std::vector<CMatrix> folded_site_matrices(const VidalMps& psi, int l) {
  const Tensor3& g = psi.gamma(l);
  const RVector& lam = psi.lambda(l + 1);
  std::vector<CMatrix> mats(psi.phys_dim());
  for (int i = 0; i < psi.phys_dim(); ++i) {
    CMatrix m(g.left(), g.right());
    for (int a = 0; a < g.left(); ++a)
      for (int b = 0; b < g.right(); ++b) m(a, b) = g(a, i, b) * lam[b];
    mats[i] = std::move(m);
  }
  return mats;
}

}  // namespace

double energy_exact(const VidalMps& state, const LocalHamiltonian& h) {
  if (state.size() != h.n || state.phys_dim() != h.d)
    throw std::invalid_argument("energy_exact: state and Hamiltonian shapes differ");
  const int n = h.n, d = h.d;

  std::vector<std::vector<CMatrix>> site(n);
  for (int l = 0; l < n; ++l) site[l] = folded_site_matrices(state, l);

  // Left environments L[l] (bra row, ket column) and right environments
  // R[l] (ket row, bra column) of the identity-operator network.
  std::vector<CMatrix> left(n + 1), right(n + 1);
  left[0] = CMatrix::Ones(1, 1);
  for (int l = 0; l < n; ++l) {
    CMatrix next = CMatrix::Zero(site[l][0].cols(), site[l][0].cols());
    for (int i = 0; i < d; ++i)
      next.noalias() += site[l][i].adjoint() * left[l] * site[l][i];
    left[l + 1] = std::move(next);
  }
  right[n] = CMatrix::Ones(1, 1);
  for (int l = n - 1; l >= 0; --l) {
    CMatrix next = CMatrix::Zero(site[l][0].rows(), site[l][0].rows());
    for (int i = 0; i < d; ++i)
      next.noalias() += site[l][i] * right[l + 1] * site[l][i].adjoint();
    right[l] = std::move(next);
  }

  const double norm2 = left[n](0, 0).real();
  if (!(norm2 > 0)) throw std::runtime_error("energy_exact: zero-norm state");

  Complex acc(0, 0);
  for (int l = 0; l < n; ++l) {
    CMatrix m = CMatrix::Zero(site[l][0].cols(), site[l][0].cols());
    for (int ib = 0; ib < d; ++ib)
      for (int ik = 0; ik < d; ++ik) {
        const Complex w = h.k1[l](ib, ik);
        if (w == Complex(0, 0)) continue;
        m.noalias() += w * (site[l][ib].adjoint() * left[l] * site[l][ik]);
      }
    acc += (m * right[l + 1]).trace();
  }
  for (int b = 0; b < n - 1; ++b) {
    CMatrix m = CMatrix::Zero(site[b + 1][0].cols(), site[b + 1][0].cols());
    for (int ib = 0; ib < d; ++ib)
      for (int ik = 0; ik < d; ++ik) {
        const CMatrix g = site[b][ib].adjoint() * left[b] * site[b][ik];
        for (int jb = 0; jb < d; ++jb)
          for (int jk = 0; jk < d; ++jk) {
            const Complex w = h.k2[b](ib * d + jb, ik * d + jk);
            if (w == Complex(0, 0)) continue;
            m.noalias() += w * (site[b + 1][jb].adjoint() * g * site[b + 1][jk]);
          }
      }
    acc += (m * right[b + 2]).trace();
  }
  return acc.real() / norm2;
}

double total_sz(const VidalMps& state) {
  const CMatrix sz = pauli_z();
  Complex acc(0, 0);
  for (int l = 0; l < state.size(); ++l) acc += expect_local(state, l, sz);
  return acc.real();
}

CorrelatorSeries dynamic_correlator(const VidalMps& gs, const LocalHamiltonian& h,
                                    const CMatrix& op, const CorrelatorOptions& opt) {
  const int n = gs.size();
  const int d = gs.phys_dim();
  if (op.rows() != d || op.cols() != d)
    throw std::invalid_argument("dynamic_correlator: operator must be d x d");
  if (opt.sample_every < 1)
    throw std::invalid_argument("dynamic_correlator: sample_every must be >= 1");

  const int src = opt.source_site < 0 ? n / 2 : opt.source_site;
  if (src < 0 || src >= n)
    throw std::invalid_argument("dynamic_correlator: source site out of range");

  CorrelatorSeries series;
  series.source_site = src;
  series.ground_energy = energy(gs, h);

  if (opt.offsets.empty()) {
    for (int l = 0; l < n; ++l) series.offsets.push_back(l - src);
  } else {
    series.offsets = opt.offsets;
    for (int x : series.offsets)
      if (src + x < 0 || src + x >= n)
        throw std::invalid_argument("dynamic_correlator: offset leaves the chain");
  }

  // Excite at the source and keep the dropped norm as an explicit factor.
  VidalMps excited = gs;
  excited.apply_single_site_gate(src, op, true);
  const double norm2 = inner_product(excited, excited).real();
  if (!(norm2 > 1e-24))
    throw std::invalid_argument("dynamic_correlator: operator annihilates the ground state");
  const double excitation_norm = std::sqrt(norm2);
  excited.normalize();

  // O_x |gs>, deliberately unnormalized.
  std::vector<VidalMps> probes;
  probes.reserve(series.offsets.size());
  for (int x : series.offsets) {
    VidalMps p = gs;
    p.apply_single_site_gate(src + x, op, true);
    probes.push_back(std::move(p));
  }

  const long sample_count = [&] {
    const double raw = opt.t_max / (opt.delta * opt.sample_every);
    const long k = std::lround(raw);
    if (std::abs(raw - static_cast<double>(k)) > 1e-9 * std::max(1.0, raw))
      throw std::invalid_argument(
          "dynamic_correlator: t_max must be a multiple of the sampling stride");
    return k;
  }();

  series.times.resize(sample_count + 1);
  series.values.resize(static_cast<Eigen::Index>(series.offsets.size()), sample_count + 1);

  auto fill_column = [&](long column, double t, const VidalMps& state) {
    series.times[column] = t;
    const Complex phase = std::exp(Complex(0, series.ground_energy * t)) * excitation_norm;
    for (size_t r = 0; r < probes.size(); ++r)
      series.values(static_cast<Eigen::Index>(r), column) =
          phase * inner_product(probes[r], state);
  };

  fill_column(0, 0.0, excited);
  if (sample_count > 0) {
    RealTimeOptions evo;
    evo.total_time = opt.t_max;
    evo.delta = opt.delta;
    evo.order = opt.order;
    evo.policy = opt.policy;
    evo.sample_every = 0;  // samples are taken by the hook below
    evo.threads = opt.threads;
    evolve_real(excited, h, evo, [&](const StepInfo& info, const VidalMps& state) {
      if (info.step % opt.sample_every == 0)
        fill_column(info.step / opt.sample_every, info.t, state);
    });
  }
  return series;
}

StructureFactor structure_factor(const CorrelatorSeries& series, Taper window) {
  const auto nx = static_cast<Eigen::Index>(series.offsets.size());
  const auto nt = static_cast<Eigen::Index>(series.times.size());
  if (nx == 0 || nt == 0) throw std::invalid_argument("structure_factor: empty grid");
  if (series.values.rows() != nx || series.values.cols() != nt)
    throw std::invalid_argument("structure_factor: grid has holes");

  for (Eigen::Index j = 1; j < nx; ++j)
    if (series.offsets[j] != series.offsets[j - 1] + 1)
      throw std::invalid_argument("structure_factor: offsets must be consecutive");
  const double dt = nt > 1 ? series.times[1] - series.times[0] : 1.0;
  if (!(dt > 0)) throw std::invalid_argument("structure_factor: times must increase");
  for (Eigen::Index m = 1; m < nt; ++m)
    if (std::abs(series.times[m] - series.times[m - 1] - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("structure_factor: time grid is not uniform");

  RVector taper = RVector::Ones(nt);
  if (window == Taper::hann && nt > 1)
    for (Eigen::Index m = 0; m < nt; ++m)
      taper[m] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(m) /
                                       static_cast<double>(nt - 1)));

  StructureFactor out;
  out.k.resize(nx);
  out.omega.resize(nt);
  for (Eigen::Index mk = 0; mk < nx; ++mk)
    out.k[mk] = 2.0 * std::numbers::pi * static_cast<double>(mk) / static_cast<double>(nx);
  for (Eigen::Index mw = 0; mw < nt; ++mw)
    out.omega[mw] = 2.0 * std::numbers::pi * static_cast<double>(mw) /
                    (static_cast<double>(nt) * dt);

  out.values = CMatrix::Zero(nx, nt);
  for (Eigen::Index mk = 0; mk < nx; ++mk)
    for (Eigen::Index mw = 0; mw < nt; ++mw) {
      Complex acc(0, 0);
      for (Eigen::Index j = 0; j < nx; ++j)
        for (Eigen::Index m = 0; m < nt; ++m) {
          const double phase = -out.k[mk] * static_cast<double>(series.offsets[j]) +
                               out.omega[mw] * series.times[m];
          acc += taper[m] * series.values(j, m) * std::exp(Complex(0, phase));
        }
      out.values(mk, mw) = acc;
    }
  return out;
}

SpectrumTrajectory spectrum_trajectory(const EvolutionReport& report, int bond) {
  const auto it = report.bond_spectra.find(bond);
  if (it == report.bond_spectra.end())
    throw std::invalid_argument("spectrum_trajectory: bond was not sampled");

  SpectrumTrajectory out;
  out.bond = bond;
  out.times = report.times;

  Eigen::Index max_rank = 0;
  for (const RVector& lam : it->second) max_rank = std::max(max_rank, lam.size());
  out.spectra.reserve(it->second.size());
  for (const RVector& lam : it->second) {
    RVector p = RVector::Zero(max_rank);
    for (Eigen::Index a = 0; a < lam.size(); ++a) p[a] = lam[a] * lam[a];
    out.spectra.push_back(std::move(p));
  }
  return out;
}

}  // namespace tebd
