#include "freeconv/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "freeconv/regularity.hpp"
#include "freeconv/series.hpp"

namespace freeconv {

namespace {

using Clock = std::chrono::steady_clock;

UnitAngle pi_times(double k) { return UnitAngle::from_pi_multiple(k); }

CircleMeasure three_atom() { return atomic({{pi_times(0), 0.4}, {pi_times(0.5), 0.3}, {pi_times(1), 0.3}}); }

ConvolutionOptions options_for(const AcceptanceConfig& cfg, std::size_t grid) {
  ConvolutionOptions o;
  o.grid_size = grid;
  o.schedule = cfg.schedule;
  o.solver = cfg.solver;
  o.threads = cfg.threads;
  return o;
}

template <class Fn>
CriterionResult timed(std::string name, Fn fn) {
  CriterionResult r;
  r.name = std::move(name);
  const auto start = Clock::now();
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

}  // namespace

std::vector<MeasurePair> atomic_suite() {
  return {
      {"bernoulli 0.7 squared", bernoulli(0.7), bernoulli(0.7)},
      {"bernoulli 0.5 squared", bernoulli(0.5), bernoulli(0.5)},
      {"0.4/0.3/0.3 squared", three_atom(), three_atom()},
      {"0.6/0.2/0.2 with 0.6/0.4", atomic({{pi_times(0), 0.6}, {pi_times(0.5), 0.2}, {pi_times(1), 0.2}}),
       bernoulli(0.6)},
      {"0.6/0.4 at 1, i squared", atomic({{pi_times(0), 0.6}, {pi_times(0.5), 0.4}}),
       atomic({{pi_times(0), 0.6}, {pi_times(0.5), 0.4}})},
      {"1, i with 1, -i", atomic({{pi_times(0), 0.5}, {pi_times(0.5), 0.5}}),
       atomic({{pi_times(0), 0.5}, {pi_times(1.5), 0.5}})},
      {"bernoulli 0.9 with 0.4/0.3/0.3", bernoulli(0.9), three_atom()},
      {"off-grid atoms", atomic({{UnitAngle(0.3), 0.8}, {UnitAngle(2.0), 0.2}}),
       atomic({{UnitAngle(1.1), 0.7}, {UnitAngle(4.0), 0.3}})},
  };
}

std::vector<MeasurePair> random_atomic_pairs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> atoms_count(2, 4);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::exponential_distribution<double> weight(1.0);

  auto draw = [&] {
    for (;;) {
      const int n = atoms_count(rng);
      std::vector<Atom> atoms;
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        atoms.push_back({UnitAngle(angle(rng)), weight(rng)});
        total += atoms.back().mass;
      }
      for (auto& a : atoms) a.mass /= total;
      CircleMeasure m = atomic(std::move(atoms));
      try {
        m = validate(m);
      } catch (const std::exception&) {
        continue;
      }
      if (std::abs(moment(m, 1)) >= 0.1) return m;
    }
  };

  std::vector<MeasurePair> pairs;
  for (std::size_t i = 0; i < count; ++i) {
    CircleMeasure m1 = draw();
    CircleMeasure m2 = draw();
    pairs.push_back({"random pair " + std::to_string(i), std::move(m1), std::move(m2)});
  }
  return pairs;
}

CriterionResult check_haar_degeneration(const AcceptanceConfig& cfg) {
  return timed("Haar degeneration", [&](CriterionResult& r) {
    const auto start = Clock::now();
    const auto res = convolve(bernoulli(0.5), bernoulli(0.5), options_for(cfg, cfg.grid_size));
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    double worst = 0.0;
    bool all_finite = true;
    for (std::size_t k = 0; k < res.density.size(); ++k) {
      all_finite = all_finite && res.status[k] == PointStatus::Finite;
      worst = std::max(worst, std::abs(res.density[k] - 1.0 / kTwoPi));
    }
    r.passed = all_finite && worst <= 1e-6 && res.atoms.empty() && secs < 5.0;
    std::ostringstream os;
    os << "max |density - 1/2pi| = " << worst << ", atoms = " << res.atoms.size() << ", runtime " << secs << " s";
    r.detail = os.str();
  });
}

CriterionResult check_atom_rule(const AcceptanceConfig& cfg) {
  return timed("Atom rule", [&](CriterionResult& r) {
    const auto res = convolve(bernoulli(0.7), bernoulli(0.7), options_for(cfg, cfg.grid_size));
    const auto predicted = predicted_atoms(bernoulli(0.7), bernoulli(0.7));
    std::ostringstream os;
    os << "atoms = " << res.atoms.size();
    if (res.atoms.size() == 1 && predicted.size() == 1) {
      const auto& a = res.atoms.front();
      os << ", angle " << a.atom.angle.radians() << ", radial mass " << a.radial_mass << ", predicted "
         << predicted.front().mass;
      r.passed = a.atom.angle.radians() == 0.0 && std::abs(a.radial_mass - 0.4) <= 1e-5 &&
                 std::abs(predicted.front().mass - 0.4) <= 1e-12 && a.confirmed;
    }
    r.detail = os.str();
  });
}

CriterionResult check_bounded_density(const AcceptanceConfig& cfg) {
  return timed("Bounded-density case", [&](CriterionResult& r) {
    const auto rep = classify(three_atom(), three_atom());
    const auto res = convolve(three_atom(), three_atom(), options_for(cfg, cfg.grid_size));
    double eta_sup = 0.0, density_sup = 0.0, gap_inf = 2.0;
    std::size_t vanishing = 0;
    bool finite = true;
    for (std::size_t k = 0; k < res.density.size(); ++k) {
      eta_sup = std::max(eta_sup, res.diagnostics[k].eta_abs);
      gap_inf = std::min(gap_inf, res.diagnostics[k].eta_gap);
      if (res.density[k] < 1e-9) ++vanishing;
      finite = finite && res.status[k] == PointStatus::Finite && std::isfinite(res.density[k]);
      if (std::isfinite(res.density[k])) density_sup = std::max(density_sup, res.density[k]);
    }
    r.passed = rep.verdict == Verdict::BoundedDensity && eta_sup <= 1.0 - 1e-4 && finite &&
               std::abs(res.mass_defect) <= 1e-4;
    std::ostringstream os;
    os << "verdict " << to_string(rep.verdict) << ", sup|eta| = " << eta_sup << ", sup density = " << density_sup
       << ", all points finite = " << (finite ? "yes" : "no") << ", total mass = " << 1.0 - res.mass_defect
       << "; min |1 - eta| = " << gap_inf << ", grid points with zero density = " << vanishing;
    r.detail = os.str();
  });
}

CriterionResult check_atomic_singular_part(const AcceptanceConfig& cfg) {
  return timed("Purely atomic singular part", [&](CriterionResult& r) {
    std::size_t flags = 0, misplaced = 0;
    for (const auto& pair : atomic_suite()) {
      const auto res = convolve(pair.m1, pair.m2, options_for(cfg, cfg.grid_size));
      const auto pairs = critical_pairs(pair.m1, pair.m2);
      for (std::size_t k = 0; k < res.status.size(); ++k) {
        if (res.status[k] != PointStatus::Divergent) continue;
        ++flags;
        const UnitAngle theta(res.angles[k]);
        const bool near = std::any_of(pairs.begin(), pairs.end(), [&](const CriticalPair& p) {
          return circular_distance(p.product_angle, theta) <= 1e-6;
        });
        if (!near) ++misplaced;
      }
    }
    r.passed = misplaced == 0;
    std::ostringstream os;
    os << flags << " divergent flags over " << atomic_suite().size() << " pairs, " << misplaced
       << " away from critical-pair products";
    r.detail = os.str();
  });
}

CriterionResult check_oracle_agreement(const AcceptanceConfig& cfg) {
  return timed("Oracle agreement", [&](CriterionResult& r) {
    const auto start = Clock::now();
    double worst = 0.0;
    std::string worst_label;
    for (const auto& pair : random_atomic_pairs(20, cfg.seed)) {
      const auto oracle = boxtimes_moments(pair.m1, pair.m2, 8);
      const auto res = convolve(pair.m1, pair.m2, options_for(cfg, cfg.oracle_grid_size));
      const double dev = compare_moments(res, oracle);
      if (dev > worst) {
        worst = dev;
        worst_label = pair.label;
      }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    r.passed = worst < 1e-3 && secs < 120.0;
    std::ostringstream os;
    os << "max moment deviation " << worst << " (" << worst_label << "), runtime " << secs << " s";
    r.detail = os.str();
  });
}

CriterionResult check_subordination_residuals(const AcceptanceConfig& cfg) {
  return timed("Subordination residuals and invariants", [&](CriterionResult& r) {
    std::ostringstream os;
    bool ok = true;

    // Radii up to exactly 1 − 1e−6.
    ConvolutionOptions opts = options_for(cfg, cfg.grid_size);
    opts.schedule = RadialSchedule::geometric(10, 19);
    opts.schedule.radii.push_back(1.0 - 1e-6);
    std::size_t points = 0, bad = 0;
    double worst = 0.0;
    for (const auto& pair : atomic_suite()) {
      const auto res = convolve(pair.m1, pair.m2, opts);
      for (std::size_t k = 0; k < res.diagnostics.size(); ++k) {
        ++points;
        worst = std::max(worst, res.diagnostics[k].max_residual);
        if (!(res.diagnostics[k].max_residual < 1e-10) || res.status[k] == PointStatus::SolverFailed) ++bad;
      }
    }
    ok = ok && bad == 0;
    os << points - bad << "/" << points << " points with residual < 1e-10 (max " << worst << ")";

    // Commutativity on an asymmetric pair.
    const CircleMeasure a = atomic({{pi_times(0), 0.6}, {pi_times(0.5), 0.2}, {pi_times(1), 0.2}});
    const CircleMeasure b = bernoulli(0.6);
    const auto ab = convolve(a, b, options_for(cfg, cfg.grid_size));
    const auto ba = convolve(b, a, options_for(cfg, cfg.grid_size));
    double comm = 0.0;
    bool same_status = ab.status == ba.status;
    for (std::size_t k = 0; k < ab.density.size(); ++k)
      if (ab.status[k] == PointStatus::Finite && ba.status[k] == PointStatus::Finite)
        comm = std::max(comm, std::abs(ab.density[k] - ba.density[k]));
    bool same_atoms = ab.atoms.size() == ba.atoms.size();
    for (std::size_t i = 0; same_atoms && i < ab.atoms.size(); ++i)
      same_atoms = ab.atoms[i].atom.angle == ba.atoms[i].atom.angle && ab.atoms[i].atom.mass == ba.atoms[i].atom.mass;
    ok = ok && same_status && same_atoms && comm <= 1e-8;
    os << "; commutativity max diff " << comm << (same_status ? "" : " (status mismatch)")
       << (same_atoms ? "" : " (atom mismatch)");

    // Unit element through the rotation rule and through the solver.
    const std::size_t m = cfg.grid_size;
    CircleMeasure nu = atomic({{UnitAngle(0.7), 0.3}, {pi_times(1.25), 0.2}});
    nu.ac = sample_density([](double t) { return 1.0 + 0.8 * std::cos(t) + 0.3 * std::sin(2.0 * t); }, 0.5, m);
    nu = validate(nu);
    double unit_err = 0.0;
    bool unit_atoms = true;
    for (bool shortcut : {true, false}) {
      ConvolutionOptions uo = options_for(cfg, m);
      uo.rotation_shortcut = shortcut;
      const auto res = convolve(point_mass(UnitAngle(0.0)), nu, uo);
      for (std::size_t k = 0; k < m; ++k) {
        const UnitAngle theta(res.angles[k]);
        // At an atom of ν the density is infinite and must be flagged as such.
        const bool at_atom = std::any_of(nu.atoms.begin(), nu.atoms.end(), [&](const Atom& a) {
          return circular_distance(a.angle, theta) <= kAngleMatchTol;
        });
        if (at_atom) {
          if (res.status[k] != PointStatus::Divergent) unit_err = std::max(unit_err, 1.0);
          continue;
        }
        const double err = std::abs(res.density[k] - ac_density(nu.ac, theta));
        unit_err = std::isfinite(err) ? std::max(unit_err, err) : std::max(unit_err, 1.0);
      }
      unit_atoms = unit_atoms && res.atoms.size() == nu.atoms.size();
      for (std::size_t i = 0; unit_atoms && i < nu.atoms.size(); ++i)
        unit_atoms = res.atoms[i].atom.angle == nu.atoms[i].angle && res.atoms[i].atom.mass == nu.atoms[i].mass &&
                     res.atoms[i].confirmed;
    }
    ok = ok && unit_err <= 1e-8 && unit_atoms;
    os << "; unit element max diff " << unit_err << (unit_atoms ? "" : " (atom mismatch)");

    r.passed = ok;
    r.detail = os.str();
  });
}

CriterionResult check_arc_positivity(const AcceptanceConfig& cfg) {
  return timed("Arc positivity", [&](CriterionResult& r) {
    const CircleMeasure m1 = atomic({{pi_times(0), 0.6}, {pi_times(0.5), 0.2}, {pi_times(1), 0.2}});
    const CircleMeasure m2 = bernoulli(0.6);
    const auto res = convolve(m1, m2, options_for(cfg, cfg.grid_size));
    SingularSetOptions so;
    so.solver = cfg.solver;
    const auto arcs = arc_positivity(m1, m2, res, so);
    std::ostringstream os;
    bool ok = arcs.size() == 2;
    for (const auto& arc : arcs) {
      ok = ok && arc.mass > 1e-3;
      os << "arc (" << arc.from.radians() << ", " << arc.to.radians() << ") mass " << arc.mass << "; ";
    }
    if (arcs.size() == 2)
      ok = ok && arcs[0].from.radians() == 0.0 && arcs[1].from == pi_times(1);
    r.passed = ok;
    r.detail = os.str();
  });
}

std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg,
                                            const std::function<void(const CriterionResult&)>& report) {
  std::vector<CriterionResult> out;
  auto record = [&](CriterionResult r) {
    if (report) report(r);
    out.push_back(std::move(r));
  };
  record(check_haar_degeneration(cfg));
  record(check_atom_rule(cfg));
  record(check_bounded_density(cfg));
  record(check_atomic_singular_part(cfg));
  record(check_oracle_agreement(cfg));
  record(check_subordination_residuals(cfg));
  record(check_arc_positivity(cfg));
  return out;
}

}  // namespace freeconv
