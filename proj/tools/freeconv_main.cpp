#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "freeconv/acceptance.hpp"
#include "freeconv/convolution.hpp"
#include "freeconv/error.hpp"
#include "freeconv/io.hpp"
#include "freeconv/regularity.hpp"
#include "freeconv/series.hpp"

namespace {

using freeconv::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;

struct RunConfig {
  std::size_t grid = 1024;
  int rmax_k = 24;
  double tol = 1e-12;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 7;
  unsigned threads = 0;
  std::size_t order = 8;
  bool confirm = false;
  std::string m1, m2;
};

freeconv::RadialSchedule schedule_for(const RunConfig& cfg) {
  return freeconv::RadialSchedule::geometric(std::max(2, cfg.rmax_k - 14), cfg.rmax_k);
}

freeconv::ConvolutionOptions convolution_options(const RunConfig& cfg) {
  freeconv::ConvolutionOptions o;
  o.grid_size = cfg.grid;
  o.schedule = schedule_for(cfg);
  o.solver.tol = cfg.tol;
  o.threads = cfg.threads;
  return o;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw freeconv::Error("cannot open " + cfg.out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string as_csv(const freeconv::ConvolutionResult& r) {
  std::ostringstream os;
  freeconv::io::write_result_csv(os, r);
  return os.str();
}

Json atoms_json(const std::vector<freeconv::DetectedAtom>& atoms) {
  Json arr = Json::array();
  for (const auto& a : atoms) {
    Json j;
    j["angle"] = a.atom.angle.radians();
    j["angle_over_pi"] = a.atom.angle.radians() / (0.5 * freeconv::kTwoPi);
    j["predicted_mass"] = a.atom.mass;
    j["radial_mass"] = a.radial_mass;
    j["confirmed"] = a.confirmed;
    arr.push_back(j);
  }
  return arr;
}

int run_convolve(const RunConfig& cfg) {
  const auto m1 = freeconv::io::parse_measure_spec(cfg.m1);
  const auto m2 = freeconv::io::parse_measure_spec(cfg.m2);
  const auto r = freeconv::convolve(m1, m2, convolution_options(cfg));
  emit(cfg, cfg.format == "csv" ? as_csv(r) : freeconv::io::dump(freeconv::io::result_to_json(r)));
  return kExitOk;
}

int run_density(const RunConfig& cfg) {
  const auto m1 = freeconv::io::parse_measure_spec(cfg.m1);
  const auto m2 = freeconv::io::parse_measure_spec(cfg.m2);
  const auto r = freeconv::convolve(m1, m2, convolution_options(cfg));
  if (cfg.format == "json") {
    Json j;
    j["density"] = freeconv::io::result_to_json(r)["density"];
    emit(cfg, freeconv::io::dump(j));
  } else {
    emit(cfg, as_csv(r));
  }
  return kExitOk;
}

int run_classify(const RunConfig& cfg) {
  const auto m1 = freeconv::io::parse_measure_spec(cfg.m1);
  const auto m2 = freeconv::io::parse_measure_spec(cfg.m2);
  const auto rep = freeconv::classify(m1, m2);
  Json j = freeconv::io::report_to_json(rep);
  if (cfg.confirm) {
    freeconv::SingularSetOptions so;
    so.solver.tol = cfg.tol;
    j["singular_checks"] = freeconv::io::singular_checks_to_json(freeconv::check_singular_candidates(m1, m2, so));
    Json probes = Json::array();
    for (const auto& p : rep.critical_pairs)
      if (std::abs(p.mass_sum - 1.0) <= freeconv::kPairSumTol)
        probes.push_back(freeconv::io::growth_to_json(freeconv::equality_case_probe(m1, m2, p, schedule_for(cfg))));
    j["equality_probes"] = probes;
  }
  std::cerr << "verdict: " << freeconv::to_string(rep.verdict) << ", max pair sum " << rep.max_pair_sum << ", "
            << rep.predicted_atoms.size() << " predicted atom(s), " << rep.singular_candidates.size()
            << " singular candidate(s)\n";
  emit(cfg, freeconv::io::dump(j));
  return kExitOk;
}

int run_atoms(const RunConfig& cfg) {
  const auto m1 = freeconv::io::parse_measure_spec(cfg.m1);
  const auto m2 = freeconv::io::parse_measure_spec(cfg.m2);
  freeconv::SolverOptions so;
  so.tol = cfg.tol;
  const auto atoms = freeconv::detect_atoms(m1, m2, schedule_for(cfg), so);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "angle,predicted_mass,radial_mass,confirmed\n";
    char line[160];
    for (const auto& a : atoms) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%d\n", a.atom.angle.radians(), a.atom.mass,
                    a.radial_mass, a.confirmed ? 1 : 0);
      os << line;
    }
    emit(cfg, os.str());
  } else {
    Json j;
    j["atoms"] = atoms_json(atoms);
    emit(cfg, freeconv::io::dump(j));
  }
  return kExitOk;
}

int run_moments(const RunConfig& cfg) {
  const auto m1 = freeconv::io::parse_measure_spec(cfg.m1);
  const auto m2 = freeconv::io::parse_measure_spec(cfg.m2);
  const auto oracle = freeconv::boxtimes_moments(m1, m2, cfg.order);
  const auto r = freeconv::convolve(m1, m2, convolution_options(cfg));
  Json computed = Json::array();
  for (std::size_t k = 1; k <= oracle.order(); ++k) {
    const auto m = freeconv::result_moment(r, static_cast<int>(k));
    computed.push_back(Json{{"k", k}, {"re", m.real()}, {"im", m.imag()}});
  }
  Json j;
  j["oracle"] = freeconv::io::moments_to_json(oracle);
  j["computed"] = computed;
  j["max_deviation"] = freeconv::compare_moments(r, oracle);
  emit(cfg, freeconv::io::dump(j));
  return kExitOk;
}

int run_verify(const RunConfig& cfg) {
  freeconv::AcceptanceConfig ac;
  ac.seed = cfg.seed;
  ac.threads = cfg.threads;
  bool all = true;
  Json arr = Json::array();
  freeconv::run_acceptance(ac, [&](const freeconv::CriterionResult& c) {
    all = all && c.passed;
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n" << std::flush;
    Json j;
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["detail"] = c.detail;
    arr.push_back(j);
  });
  if (!cfg.out.empty()) {
    Json j;
    j["criteria"] = arr;
    emit(cfg, freeconv::io::dump(j));
  }
  return all ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free multiplicative convolution of probability measures on the unit circle"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool measures) {
    if (measures) {
      sub->add_option("m1", cfg.m1, "first measure (shorthand or JSON file)")->required();
      sub->add_option("m2", cfg.m2, "second measure (shorthand or JSON file)")->required();
    }
    sub->add_option("--grid", cfg.grid, "grid size (even, at least 16)")
        ->check(CLI::Range(std::size_t{16}, std::size_t{1} << 22))
        ->check(CLI::Validator([](std::string& s) { return std::stoull(s) % 2 == 0 ? "" : "grid must be even"; },
                               "EVEN"));
    sub->add_option("--rmax-k", cfg.rmax_k, "largest radius is 1 - 2^-k")->check(CLI::Range(8, 48));
    sub->add_option("--tol", cfg.tol, "subordination residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "write output to FILE");
    sub->add_option("--seed", cfg.seed, "seed for randomized checks");
    sub->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
  };

  auto* convolve = app.add_subcommand("convolve", "density and atoms of the convolution");
  add_common(convolve, true);
  auto* classify = app.add_subcommand("classify", "regularity report from the atom-pair rule");
  add_common(classify, true);
  classify->add_flag("--confirm", cfg.confirm, "also confirm singular candidates radially");
  auto* atoms = app.add_subcommand("atoms", "predicted atoms with radial confirmation");
  add_common(atoms, true);
  auto* density = app.add_subcommand("density", "theta/density table");
  add_common(density, true);
  auto* moments = app.add_subcommand("moments", "compare computed moments with the series oracle");
  add_common(moments, true);
  moments->add_option("--order", cfg.order, "number of moments")->check(CLI::Range(1, 64));
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }
  if (density->parsed() && density->count("--format") == 0) cfg.format = "csv";

  try {
    if (convolve->parsed()) return run_convolve(cfg);
    if (classify->parsed()) return run_classify(cfg);
    if (atoms->parsed()) return run_atoms(cfg);
    if (density->parsed()) return run_density(cfg);
    if (moments->parsed()) return run_moments(cfg);
    if (verify->parsed()) return run_verify(cfg);
  } catch (const freeconv::SpecParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const freeconv::SolverFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const freeconv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }
  return kExitOk;
}
