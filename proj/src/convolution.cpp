#include "freeconv/convolution.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "freeconv/regularity.hpp"

namespace freeconv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(i) for i in [0, n) on a small pool; each index is visited once.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
}

std::vector<double> grid_angles(std::size_t m) {
  std::vector<double> angles(m);
  for (std::size_t k = 0; k < m; ++k) angles[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
  return angles;
}

// The factor that is not a point mass, rotated by the point mass's angle.
CircleMeasure rotation_image(const CircleMeasure& m1, const CircleMeasure& m2) {
  if (is_point_mass(m1)) return m2.rotated(m1.atoms.front().angle);
  return m1.rotated(m2.atoms.front().angle);
}

std::vector<Atom> expected_atoms(const CircleMeasure& v1, const CircleMeasure& v2) {
  if (is_point_mass(v1) || is_point_mass(v2)) return rotation_image(v1, v2).atoms;
  return predicted_atoms(v1, v2);
}

std::vector<DetectedAtom> confirm_atoms(const Transform& t1, const Transform& t2, const std::vector<Atom>& expected,
                                        const RadialSchedule& schedule, const SolverOptions& solver,
                                        double tol) {
  std::vector<DetectedAtom> out;
  for (const auto& atom : expected) {
    const auto psi = boundary_psi(t1, t2, atom.angle, schedule, solver);
    const RadialLimit lim = atom_mass_from_samples(schedule.radii, psi);
    // Rounding in η/(1 − η) limits the last samples, so convergence is judged
    // against the confirmation tolerance rather than the density tolerance.
    const bool ok = lim.status != LimitStatus::Divergent && lim.change < tol && std::abs(lim.value - atom.mass) < tol;
    out.push_back({atom, lim.value, ok});
  }
  return out;
}

bool usable(PointStatus s, double value) {
  return (s == PointStatus::Finite || s == PointStatus::Unconverged) && std::isfinite(value);
}

// Clamps the reported density and builds the quadrature from every usable
// cell not listed in `refined`, followed by `extra`.
void finish_masses(ConvolutionResult& r, const std::vector<bool>& refined, std::vector<QuadratureNode> extra) {
  const double h = r.spacing();
  r.min_raw_density = std::numeric_limits<double>::infinity();
  r.quadrature.clear();
  for (std::size_t k = 0; k < r.density.size(); ++k) {
    if (!usable(r.status[k], r.density[k])) continue;
    r.min_raw_density = std::min(r.min_raw_density, r.density[k]);
    r.density[k] = std::max(r.density[k], 0.0);
    if (refined.empty() || !refined[k]) r.quadrature.push_back({r.angles[k], r.density[k] * h});
  }
  if (!std::isfinite(r.min_raw_density)) r.min_raw_density = 0.0;
  for (auto& q : extra) r.quadrature.push_back({q.angle, std::max(q.weight, 0.0)});
  std::sort(r.quadrature.begin(), r.quadrature.end(),
            [](const QuadratureNode& a, const QuadratureNode& b) { return a.angle < b.angle; });
  r.ac_mass = 0.0;
  for (const auto& q : r.quadrature) r.ac_mass += q.weight;
  double atoms = 0.0;
  for (const auto& a : r.atoms) atoms += a.atom.mass;
  r.mass_defect = 1.0 - r.ac_mass - atoms;
}

constexpr double kMinAnchorFloor = 1e-9;
constexpr double kAtomFloorPerMass = 1e-6;

struct Anchor {
  double angle;
  // Closer than this, η/(1 − η) is swamped by rounding next to an atom.
  double floor;
};

// Product angles of atom pairs whose masses sum to at least 1 − gap. The
// density may be singular or sharply peaked there.
std::vector<Anchor> refinement_anchors(const CircleMeasure& v1, const CircleMeasure& v2, double gap) {
  std::vector<Anchor> anchors;
  for (const auto& a1 : v1.atoms)
    for (const auto& a2 : v2.atoms) {
      const double sum = a1.mass + a2.mass;
      if (sum < 1.0 - gap) continue;
      const double floor = sum > 1.0 + kPairSumTol ? std::max(kMinAnchorFloor, kAtomFloorPerMass * (sum - 1.0))
                                                    : kMinAnchorFloor;
      anchors.push_back({(a1.angle + a2.angle).radians(), floor});
    }
  std::sort(anchors.begin(), anchors.end(), [](const Anchor& a, const Anchor& b) { return a.angle < b.angle; });
  std::vector<Anchor> merged;
  for (const auto& a : anchors) {
    if (!merged.empty() && a.angle - merged.back().angle <= kAngleMatchTol) {
      merged.back().floor = std::max(merged.back().floor, a.floor);
      continue;
    }
    merged.push_back(a);
  }
  if (merged.size() > 1 && kTwoPi - merged.back().angle + merged.front().angle <= kAngleMatchTol) {
    merged.front().floor = std::max(merged.front().floor, merged.back().floor);
    merged.pop_back();
  }
  return merged;
}

// 8-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 8> kGaussX = {
    0.019855071751231856, 0.10166676129318664, 0.23723379504183550, 0.40828267875217510,
    0.59171732124782490,  0.76276620495816450, 0.89833323870681336, 0.98014492824876814};
constexpr std::array<double, 8> kGaussW = {
    0.050614268145188130, 0.11119051722668724, 0.15685332293894364, 0.18134189168918100,
    0.18134189168918100,  0.15685332293894364, 0.11119051722668724, 0.050614268145188130};

// A piece [anchor, anchor ± u²] for u in [ulo, uhi]; θ = anchor ± u².
struct Panel {
  double anchor;
  double floor;
  int direction;  // 0: plain panel, θ = anchor + u
  double ulo, uhi;
  std::vector<QuadratureNode> nodes;  // weights already include the density
  double sum = 0.0;
  int depth = 0;
};

constexpr int kMaxPanelDepth = 14;
constexpr std::size_t kMaxPanels = 4096;
constexpr double kPanelAbsTol = 1e-9;
constexpr double kPanelRelTol = 1e-7;

// Radii pushed deep enough that 1 − r is well below the distance to the anchor,
// but not so deep that η/(1 − η) loses its digits.
RadialSchedule node_schedule(double distance, const RadialSchedule& base) {
  const int count = static_cast<int>(base.radii.size());
  const int kmax_base = static_cast<int>(std::lround(-std::log2(1.0 - base.radii.back())));
  const int wanted = static_cast<int>(std::ceil(-std::log2(std::max(distance, 1e-300)))) + 10;
  const int kmax = std::max(kmax_base, std::min(wanted, 40));
  return RadialSchedule::geometric(std::max(2, kmax - count + 1), kmax);
}

// Integrates the density over pieces next to the anchors with Gauss panels in
// u (θ = anchor ± u²), bisecting panels until halves agree with the whole.
class AnchorQuadrature {
 public:
  AnchorQuadrature(const Transform& t1, const Transform& t2, const ConvolutionOptions& options)
      : t1_(t1), t2_(t2), options_(options) {}

  void add_piece(const Anchor& anchor, double length, int direction) {
    if (length <= 0.0) return;
    const double umax = std::sqrt(length);
    double hi = umax;
    for (int i = 0; i < 3; ++i) {
      const double lo = i == 2 ? 0.0 : hi / 4.0;
      initial_.push_back({anchor.angle, anchor.floor, direction, lo, hi, {}, 0.0, 0});
      hi = lo;
    }
  }

  void add_cell(double lo, double hi) { initial_.push_back({lo, 0.0, 0, 0.0, hi - lo, {}, 0.0, 0}); }

  std::vector<QuadratureNode> run(std::size_t& failed_nodes) {
    std::vector<QuadratureNode> out;
    evaluate(initial_);
    std::vector<Panel> active = std::move(initial_);
    std::size_t panels = active.size();
    while (!active.empty()) {
      std::vector<Panel> children;
      for (const auto& p : active) {
        const double mid = 0.5 * (p.ulo + p.uhi);
        children.push_back({p.anchor, p.floor, p.direction, p.ulo, mid, {}, 0.0, p.depth + 1});
        children.push_back({p.anchor, p.floor, p.direction, mid, p.uhi, {}, 0.0, p.depth + 1});
      }
      evaluate(children);
      panels += children.size();
      std::vector<Panel> next;
      for (std::size_t i = 0; i < active.size(); ++i) {
        auto& left = children[2 * i];
        auto& right = children[2 * i + 1];
        const double refined = left.sum + right.sum;
        const double err = std::abs(refined - active[i].sum);
        const bool done = err <= kPanelAbsTol + kPanelRelTol * std::abs(refined) || left.depth >= kMaxPanelDepth ||
                          panels >= kMaxPanels || (left.direction != 0 && left.uhi * left.uhi <= left.floor);
        if (done) {
          for (auto* c : {&left, &right}) out.insert(out.end(), c->nodes.begin(), c->nodes.end());
        } else {
          next.push_back(std::move(left));
          next.push_back(std::move(right));
        }
      }
      active = std::move(next);
    }
    failed_nodes = failed_;
    return out;
  }

 private:
  void evaluate(std::vector<Panel>& panels) {
    struct Job {
      std::size_t panel;
      double angle, jacobian, distance, floor;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < panels.size(); ++p) {
      const auto& pn = panels[p];
      for (std::size_t i = 0; i < kGaussX.size(); ++i) {
        const double u = pn.ulo + (pn.uhi - pn.ulo) * kGaussX[i];
        if (pn.direction == 0)
          jobs.push_back({p, pn.anchor + u, (pn.uhi - pn.ulo) * kGaussW[i], 1.0, 0.0});
        else
          jobs.push_back({p, pn.anchor + pn.direction * u * u, (pn.uhi - pn.ulo) * kGaussW[i] * 2.0 * u, u * u, pn.floor});
      }
    }
    std::vector<double> weight(jobs.size(), 0.0);
    std::vector<char> failed(jobs.size(), 0);
    parallel_for(jobs.size(), options_.threads, [&](std::size_t j) {
      const auto& job = jobs[j];
      if (job.jacobian == 0.0 || job.distance < job.floor) return;
      const RadialSchedule sched = node_schedule(job.distance, options_.schedule);
      std::vector<SubordinationResult> ray;
      const auto psi = boundary_psi(t1_, t2_, UnitAngle(job.angle), sched, options_.solver, &ray);
      const bool solved = std::all_of(ray.begin(), ray.end(), [](const SubordinationResult& s) { return s.converged; });
      const RadialLimit lim = density_from_samples(sched.radii, psi);
      if (solved && lim.status != LimitStatus::Divergent && std::isfinite(lim.value))
        weight[j] = std::max(lim.value, 0.0) * job.jacobian;
      else
        failed[j] = 1;
    });
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      auto& pn = panels[jobs[j].panel];
      pn.nodes.push_back({UnitAngle(jobs[j].angle).radians(), weight[j]});
      pn.sum += weight[j];
      failed_ += static_cast<std::size_t>(failed[j]);
    }
  }

  const Transform& t1_;
  const Transform& t2_;
  const ConvolutionOptions& options_;
  std::vector<Panel> initial_;
  std::size_t failed_ = 0;
};

}  // namespace

const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::Finite: return "finite";
    case PointStatus::Divergent: return "divergent";
    case PointStatus::Unconverged: return "unconverged";
    case PointStatus::SolverFailed: return "solver_failed";
  }
  return "unknown";
}

std::size_t ConvolutionResult::count(PointStatus s) const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

std::vector<Complex> boundary_psi(const Transform& t1, const Transform& t2, UnitAngle theta,
                                  const RadialSchedule& schedule, const SolverOptions& solver,
                                  std::vector<SubordinationResult>* solved) {
  auto ray = solve_ray(t1, t2, theta.conjugate(), schedule, solver);
  std::vector<Complex> psi;
  psi.reserve(ray.size());
  for (const auto& s : ray) psi.push_back(s.eta / (1.0 - s.eta));
  if (solved) *solved = std::move(ray);
  return psi;
}

ConvolutionResult convolve(const CircleMeasure& m1, const CircleMeasure& m2, const ConvolutionOptions& options) {
  const CircleMeasure v1 = validate(m1);
  const CircleMeasure v2 = validate(m2);
  if (options.grid_size < 2) throw PreconditionFailed("grid size must be at least 2");
  options.schedule.check();

  ConvolutionResult r;
  const std::size_t m = options.grid_size;
  r.angles = grid_angles(m);
  r.density.assign(m, 0.0);
  r.status.assign(m, PointStatus::Finite);
  r.diagnostics.assign(m, {});

  const bool has_point_mass = is_point_mass(v1) || is_point_mass(v2);
  if (has_point_mass && options.rotation_shortcut) {
    const CircleMeasure image = rotation_image(v1, v2);
    r.rotation = true;
    std::vector<QuadratureNode> cells(m);
    for (std::size_t k = 0; k < m; ++k) {
      const UnitAngle theta(r.angles[k]);
      const double d = ac_density(image.ac, theta);
      cells[k] = {r.angles[k], d * r.spacing()};
      r.density[k] = d;
      for (const auto& a : image.atoms)
        if (circular_distance(a.angle, theta) <= kAngleMatchTol) {
          r.status[k] = PointStatus::Divergent;
          r.density[k] = kNaN;
        }
    }
    for (const auto& a : image.atoms) r.atoms.push_back({a, a.mass, true});
    finish_masses(r, std::vector<bool>(m, true), std::move(cells));
    return r;
  }

  const Transform t1(v1), t2(v2);
  const std::vector<Atom> expected = expected_atoms(v1, v2);

  parallel_for(m, options.threads, [&](std::size_t k) {
    std::vector<SubordinationResult> ray;
    const auto psi = boundary_psi(t1, t2, UnitAngle(r.angles[k]), options.schedule, options.solver, &ray);
    auto& diag = r.diagnostics[k];
    bool failed = false;
    for (const auto& s : ray) {
      diag.max_residual = std::max(diag.max_residual, s.residual);
      diag.max_iterations = std::max(diag.max_iterations, s.iterations);
      failed = failed || !s.converged;
    }
    diag.eta_abs = std::abs(ray.back().eta);
    diag.eta_gap = std::abs(1.0 - ray.back().eta);
    if (failed) {
      r.status[k] = PointStatus::SolverFailed;
      r.density[k] = kNaN;
      return;
    }
    const RadialLimit lim = density_from_samples(options.schedule.radii, psi);
    diag.change = lim.change;
    switch (lim.status) {
      case LimitStatus::Converged:
        r.status[k] = PointStatus::Finite;
        r.density[k] = lim.value;
        break;
      case LimitStatus::Divergent:
        r.status[k] = PointStatus::Divergent;
        r.density[k] = kNaN;
        break;
      case LimitStatus::Unconverged:
        r.status[k] = PointStatus::Unconverged;
        r.density[k] = lim.value;
        break;
    }
  });

  const std::size_t failures = r.count(PointStatus::SolverFailed);
  if (static_cast<double>(failures) > options.max_failure_fraction * static_cast<double>(m)) {
    std::ostringstream os;
    os << failures << " of " << m << " grid points failed to solve";
    throw SolverFailure(os.str());
  }

  r.atoms = confirm_atoms(t1, t2, expected, options.schedule, options.solver, options.atom_confirm_tol);

  // Cells whose trapezoid weight is replaced by adaptive panels: windows
  // around (near-)critical products, and cells where the grid is rough.
  const double h = r.spacing();
  const auto mm = static_cast<long>(m);
  auto wrap = [&](long j) { return static_cast<std::size_t>(((j % mm) + mm) % mm); };
  std::vector<bool> window(m, false), rough(m, false);
  const auto anchors = refinement_anchors(v1, v2, options.near_critical_gap);
  const auto half = static_cast<long>(options.refine_halfwidth);
  for (const auto& a : anchors) {
    const long c = std::lround(a.angle / h);
    for (long j = c - half; j <= c + half; ++j) window[wrap(j)] = true;
  }
  if (options.roughness > 0.0)
    for (long k = 0; k < mm; ++k) {
      const std::size_t l = wrap(k - 1), c = wrap(k), n = wrap(k + 1);
      const bool ok = usable(r.status[l], r.density[l]) && usable(r.status[c], r.density[c]) &&
                      usable(r.status[n], r.density[n]);
      rough[c] = !window[c] && (!ok || std::abs(r.density[l] - 2.0 * r.density[c] + r.density[n]) > options.roughness);
    }

  std::vector<bool> refined(m, false);
  for (std::size_t k = 0; k < m; ++k) refined[k] = window[k] || rough[k];
  r.refined_cells = static_cast<std::size_t>(std::count(refined.begin(), refined.end(), true));

  AnchorQuadrature quad(t1, t2, options);
  // Each stretch between a window edge or midpoint and an anchor is one piece.
  auto add_between = [&](double lo, double hi, std::vector<Anchor> inside) {
    std::sort(inside.begin(), inside.end(), [](const Anchor& a, const Anchor& b) { return a.angle < b.angle; });
    if (inside.empty()) return;
    quad.add_piece(inside.front(), inside.front().angle - lo, -1);
    for (std::size_t i = 0; i + 1 < inside.size(); ++i) {
      const double mid = 0.5 * (inside[i + 1].angle - inside[i].angle);
      quad.add_piece(inside[i], mid, +1);
      quad.add_piece(inside[i + 1], mid, -1);
    }
    quad.add_piece(inside.back(), hi - inside.back().angle, +1);
  };
  const auto windows = static_cast<std::size_t>(std::count(window.begin(), window.end(), true));
  if (windows == m) {
    std::vector<Anchor> inside = anchors;
    const double lo = anchors.front().angle;
    Anchor again = anchors.front();
    again.angle += kTwoPi;
    inside.push_back(again);
    add_between(lo, lo + kTwoPi, inside);
  } else if (windows > 0) {
    // Runs of consecutive window cells, scanned from a cell outside every
    // window so that no run wraps past the origin.
    std::size_t origin = 0;
    while (window[origin]) ++origin;
    for (std::size_t step = 0; step < m;) {
      const std::size_t k = (origin + step) % m;
      if (!window[k]) {
        ++step;
        continue;
      }
      std::size_t len = 0;
      while (step + len < m && window[(origin + step + len) % m]) ++len;
      const double lo = r.angles[k] - 0.5 * h;
      const double hi = lo + static_cast<double>(len) * h;
      std::vector<Anchor> inside;
      for (const auto& a : anchors)
        for (double shift : {-kTwoPi, 0.0, kTwoPi})
          if (a.angle + shift > lo && a.angle + shift < hi) inside.push_back({a.angle + shift, a.floor});
      add_between(lo, hi, std::move(inside));
      step += len;
    }
  }
  for (std::size_t k = 0; k < m; ++k)
    if (rough[k]) quad.add_cell(r.angles[k] - 0.5 * h, r.angles[k] + 0.5 * h);
  std::vector<QuadratureNode> extra = quad.run(r.failed_nodes);
  finish_masses(r, refined, std::move(extra));
  return r;
}

std::vector<DetectedAtom> detect_atoms(const CircleMeasure& m1, const CircleMeasure& m2,
                                       const RadialSchedule& schedule, const SolverOptions& solver,
                                       double confirm_tol) {
  const CircleMeasure v1 = validate(m1), v2 = validate(m2);
  const Transform t1(v1), t2(v2);
  return confirm_atoms(t1, t2, expected_atoms(v1, v2), schedule, solver, confirm_tol);
}

RadialLimit density_at(const CircleMeasure& m1, const CircleMeasure& m2, UnitAngle theta,
                       const RadialSchedule& schedule, const SolverOptions& solver) {
  const CircleMeasure v1 = validate(m1);
  const CircleMeasure v2 = validate(m2);
  if (is_point_mass(v1) || is_point_mass(v2)) {
    const CircleMeasure image = rotation_image(v1, v2);
    for (const auto& a : image.atoms)
      if (circular_distance(a.angle, theta) <= kAngleMatchTol)
        return {std::numeric_limits<double>::infinity(), LimitStatus::Divergent, 0.0, 0.0};
    const double d = ac_density(image.ac, theta);
    return {d, LimitStatus::Converged, 0.0, d};
  }
  const Transform t1(v1), t2(v2);
  const auto psi = boundary_psi(t1, t2, theta, schedule, solver);
  return density_from_samples(schedule.radii, psi);
}

Complex result_moment(const ConvolutionResult& result, int n) {
  const auto nd = static_cast<double>(n);
  Complex sum = 0.0;
  for (const auto& q : result.quadrature) sum += std::polar(q.weight, nd * q.angle);
  for (const auto& a : result.atoms) sum += std::polar(a.atom.mass, nd * a.atom.angle.radians());
  return sum;
}

}  // namespace freeconv
