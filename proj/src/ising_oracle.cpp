#include "ionfab/ising_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <queue>

#include "ionfab/errors.hpp"
#include "ionfab/rng.hpp"

namespace ionfab::ising {

SpinConfig spins_from_index(std::uint64_t index, int n) {
  SpinConfig s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = (index >> i) & 1U ? -1 : 1;
  return s;
}

std::uint64_t index_from_spins(const SpinConfig& s) {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == -1) idx |= std::uint64_t{1} << i;
  }
  return idx;
}

double energy(const IsingInstance& inst, const SpinConfig& s) {
  const int n = inst.n_spins();
  if (static_cast<int>(s.size()) != n) {
    throw DomainError("configuration has " + std::to_string(s.size()) + " spins; instance has " +
                      std::to_string(n));
  }
  for (int v : s) {
    if (v != 1 && v != -1) throw DomainError("spins must be +1 or -1");
  }
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      e += inst.coupling(i, j) * s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)];
    }
  }
  for (int i = 0; i < n; ++i) e += inst.field(i) * s[static_cast<std::size_t>(i)];
  return e;
}

double energy_scale(const IsingInstance& inst) {
  const int n = inst.n_spins();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) s += std::abs(inst.coupling(i, j));
    s += std::abs(inst.field(i));
  }
  return std::max(1.0, s);
}

namespace {

// Walks all 2^n configurations in reflected Gray order, calling
// visit(index, approximate energy). The running energy is resynchronised
// from scratch every 4096 steps to bound drift.
template <class Visit>
void gray_walk(const IsingInstance& inst, Visit&& visit) {
  const int n = inst.n_spins();
  std::vector<double> jm(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      jm[static_cast<std::size_t>(i * n + j)] = i == j ? 0.0 : inst.coupling(i, j);
    }
  }
  SpinConfig s(static_cast<std::size_t>(n), 1);
  std::vector<double> h(static_cast<std::size_t>(n), 0.0);  // sum_j J_ij s_j
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) h[static_cast<std::size_t>(i)] += jm[static_cast<std::size_t>(i * n + j)];
  }
  double e = energy(inst, s);
  std::uint64_t index = 0;
  visit(index, e);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int flip = std::countr_zero(k);
    const auto uf = static_cast<std::size_t>(flip);
    const int old = s[uf];
    e += -2.0 * old * (h[uf] + inst.field(flip));
    s[uf] = -old;
    for (int j = 0; j < n; ++j) h[static_cast<std::size_t>(j)] += -2.0 * old * jm[static_cast<std::size_t>(j * n + flip)];
    index ^= std::uint64_t{1} << flip;
    if ((k & 4095U) == 0) e = energy(inst, s);
    visit(index, e);
  }
}

}  // namespace

GroundStates brute_force_ground_state(const IsingInstance& inst, std::size_t cap) {
  const int n = inst.n_spins();
  if (n < 1 || n > kMaxBruteForceSpins) {
    throw DomainError("brute force supports 1.." + std::to_string(kMaxBruteForceSpins) + " spins, got " +
                      std::to_string(n));
  }
  GroundStates g;
  g.tolerance = 1e-9 * energy_scale(inst);

  double approx_min = std::numeric_limits<double>::infinity();
  gray_walk(inst, [&](std::uint64_t, double e) { approx_min = std::min(approx_min, e); });

  std::priority_queue<std::uint64_t> keep;  // max-heap of the smallest indices
  gray_walk(inst, [&](std::uint64_t idx, double e) {
    if (e > approx_min + g.tolerance) return;
    ++g.count;
    if (cap == 0) return;
    if (keep.size() < cap) {
      keep.push(idx);
    } else if (idx < keep.top()) {
      keep.pop();
      keep.push(idx);
    }
  });
  g.truncated = g.count > keep.size();
  while (!keep.empty()) {
    g.indices.push_back(keep.top());
    keep.pop();
  }
  std::reverse(g.indices.begin(), g.indices.end());
  g.energy = std::numeric_limits<double>::infinity();
  for (auto idx : g.indices) g.energy = std::min(g.energy, energy(inst, spins_from_index(idx, n)));
  if (g.indices.empty()) g.energy = approx_min;
  return g;
}

AdiabaticRun adiabatic_evolve(const IsingInstance& inst, double total_time, int steps, int trace_points) {
  const int n = inst.n_spins();
  if (n < 1 || n > kMaxAdiabaticSpins) {
    throw DomainError("adiabatic evolution supports 1.." + std::to_string(kMaxAdiabaticSpins) +
                      " spins, got " + std::to_string(n));
  }
  if (!std::isfinite(total_time) || !(total_time > 0.0)) throw DomainError("total_time must be finite and > 0");
  if (steps < 10) throw DomainError("steps must be >= 10");
  if (trace_points < 2) throw DomainError("trace_points must be >= 2");

  using cplx = std::complex<double>;
  const std::size_t dim = std::size_t{1} << n;
  const double scale = inst.j0 != 0.0 ? std::abs(inst.j0) : 1.0;

  std::vector<double> diag(dim);
  for (std::size_t z = 0; z < dim; ++z) diag[z] = energy(inst, spins_from_index(z, n));

  AdiabaticRun run;
  run.total_time = total_time;
  run.steps = steps;
  run.ground_energy = *std::min_element(diag.begin(), diag.end());
  const double tol = 1e-9 * energy_scale(inst);
  std::vector<std::size_t> ground;
  for (std::size_t z = 0; z < dim; ++z) {
    if (diag[z] <= run.ground_energy + tol) ground.push_back(z);
  }
  run.ground_count = ground.size();

  std::vector<cplx> psi(dim, cplx(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));

  auto expectation = [&](double s) {
    double ez = 0.0;
    for (std::size_t z = 0; z < dim; ++z) ez += std::norm(psi[z]) * diag[z];
    double ex = 0.0;
    for (int q = 0; q < n; ++q) {
      const std::size_t bit = std::size_t{1} << q;
      for (std::size_t z = 0; z < dim; ++z) ex += (std::conj(psi[z]) * psi[z ^ bit]).real();
    }
    return TracePoint{s, -(1.0 - s) * ex + s * ez / scale, ez};
  };

  const double dt = total_time / steps;
  const int stride = std::max(1, (steps + trace_points - 2) / (trace_points - 1));
  run.trace.push_back(expectation(0.0));
  for (int k = 0; k < steps; ++k) {
    const double s = (k + 0.5) / steps;
    // exp(+i dt (1-s) X) on every qubit
    const double theta = dt * (1.0 - s);
    const double c = std::cos(theta);
    const cplx is(0.0, std::sin(theta));
    for (int q = 0; q < n; ++q) {
      const std::size_t bit = std::size_t{1} << q;
      for (std::size_t z = 0; z < dim; ++z) {
        if (z & bit) continue;
        const cplx a0 = psi[z];
        const cplx a1 = psi[z | bit];
        psi[z] = c * a0 + is * a1;
        psi[z | bit] = is * a0 + c * a1;
      }
    }
    // exp(-i dt s H_Ising / |j0|)
    const double w = dt * s / scale;
    for (std::size_t z = 0; z < dim; ++z) psi[z] *= std::polar(1.0, -w * diag[z]);

    double norm2 = 0.0;
    for (const auto& a : psi) norm2 += std::norm(a);
    run.max_norm_error = std::max(run.max_norm_error, std::abs(std::sqrt(norm2) - 1.0));
    if ((k + 1) % stride == 0 || k + 1 == steps) {
      const double s_end = static_cast<double>(k + 1) / steps;
      if (run.trace.back().s != s_end) run.trace.push_back(expectation(s_end));
    }
  }
  run.final_ising_energy = run.trace.back().ising_energy;
  double overlap = 0.0;
  for (auto z : ground) overlap += std::norm(psi[z]);
  run.overlap = std::clamp(overlap, 0.0, 1.0);
  return run;
}

AnnealResult anneal_classical(const IsingInstance& inst, const AnnealSchedule& sched, std::uint64_t seed,
                              const std::optional<SpinConfig>& initial) {
  const int n = inst.n_spins();
  if (n < 1 || n > kMaxAnnealSpins) {
    throw DomainError("annealing supports 1.." + std::to_string(kMaxAnnealSpins) + " spins");
  }
  if (!std::isfinite(sched.t_start) || !std::isfinite(sched.t_end) || sched.t_end < 0.0 ||
      sched.t_start < sched.t_end) {
    throw DomainError("schedule needs finite t_start >= t_end >= 0");
  }
  if (sched.t_end == 0.0 && sched.t_start != 0.0) {
    throw DomainError("a geometric schedule cannot reach 0 from t_start > 0");
  }
  if (sched.n_temps < 1 || sched.sweeps_per_temp < 1) throw DomainError("n_temps and sweeps_per_temp must be >= 1");

  // Sparse neighbour lists over the supported couplings.
  std::vector<std::vector<std::pair<int, double>>> nbr(static_cast<std::size_t>(n));
  for (auto [i, j] : inst.support_edges()) {
    const double v = inst.coupling(i, j);
    if (v == 0.0) continue;
    nbr[static_cast<std::size_t>(i)].push_back({j, v});
    nbr[static_cast<std::size_t>(j)].push_back({i, v});
  }

  Rng rng(seed);
  SpinConfig s;
  if (initial) {
    if (static_cast<int>(initial->size()) != n) throw DomainError("initial configuration has the wrong length");
    s = *initial;
    for (int v : s) {
      if (v != 1 && v != -1) throw DomainError("spins must be +1 or -1");
    }
  } else {
    s.resize(static_cast<std::size_t>(n));
    for (auto& v : s) v = rng.bernoulli(0.5) ? -1 : 1;
  }
  std::vector<double> h(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (auto [j, v] : nbr[static_cast<std::size_t>(i)]) h[static_cast<std::size_t>(i)] += v * s[static_cast<std::size_t>(j)];
  }

  double e = energy(inst, s);
  AnnealResult res;
  res.spins = s;
  double best = e;

  for (int t = 0; t < sched.n_temps; ++t) {
    double temp = sched.t_start;
    if (sched.n_temps > 1 && sched.t_start > 0.0) {
      temp = sched.t_start * std::pow(sched.t_end / sched.t_start, static_cast<double>(t) / (sched.n_temps - 1));
    }
    for (int sweep = 0; sweep < sched.sweeps_per_temp; ++sweep) {
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double de = -2.0 * s[ui] * (h[ui] + inst.field(i));
        bool accept = de < 0.0;
        if (!accept && temp > 0.0) accept = rng.uniform() < std::exp(-de / temp);
        if (!accept) continue;
        const int old = s[ui];
        s[ui] = -old;
        for (auto [j, v] : nbr[ui]) h[static_cast<std::size_t>(j)] += -2.0 * old * v;
        e += de;
        ++res.accepted;
        if (e < best) {
          best = e;
          res.spins = s;
        }
      }
    }
  }
  res.energy = energy(inst, res.spins);
  return res;
}

nlohmann::json to_json(const IsingInstance& inst, const GroundStates& g) {
  nlohmann::json configs = nlohmann::json::array();
  for (auto idx : g.indices) configs.push_back(spins_from_index(idx, inst.n_spins()));
  return {{"schema", "ionfab-ising-solution/1"},
          {"n", inst.n_spins()},
          {"energy", g.energy},
          {"count", g.count},
          {"truncated", g.truncated},
          {"tolerance", g.tolerance},
          {"configs", configs}};
}

nlohmann::json to_json(const AdiabaticRun& run) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& p : run.trace) trace.push_back({p.s, p.energy, p.ising_energy});
  return {{"schema", "ionfab-adiabatic/1"},
          {"total_time", run.total_time},
          {"steps", run.steps},
          {"overlap", run.overlap},
          {"final_ising_energy", run.final_ising_energy},
          {"ground_energy", run.ground_energy},
          {"ground_count", run.ground_count},
          {"max_norm_error", run.max_norm_error},
          {"trace", trace}};
}

nlohmann::json to_json(const AnnealResult& r, const AnnealSchedule& sched, std::uint64_t seed) {
  return {{"schema", "ionfab-anneal/1"},
          {"seed", seed},
          {"schedule",
           {{"t_start", sched.t_start},
            {"t_end", sched.t_end},
            {"n_temps", sched.n_temps},
            {"sweeps_per_temp", sched.sweeps_per_temp}}},
          {"energy", r.energy},
          {"accepted", r.accepted},
          {"spins", r.spins}};
}

}  // namespace ionfab::ising
