#include "freeconv/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "freeconv/error.hpp"

namespace freeconv::io {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw SpecParseError("not a number: '" + std::string(text) + "'");
  return value;
}

// "a", "a/b", "-a/b"
double parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_number(text);
  const double den = parse_number(text.substr(slash + 1));
  if (den == 0.0) throw SpecParseError("zero denominator in '" + std::string(text) + "'");
  return parse_number(text.substr(0, slash)) / den;
}

double pi_multiple_from_json(const Json& j, const char* key) {
  if (!j.contains(key)) throw SpecParseError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_pi_multiple(v.get<std::string>());
  throw SpecParseError(std::string("field '") + key + "' must be a number or a rational string");
}

double number_from_json(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw SpecParseError(std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

CircleMeasure parse_term(std::string_view term) {
  const auto colon = term.find(':');
  const std::string_view kind = trim(term.substr(0, colon));
  const std::string_view args = colon == std::string_view::npos ? std::string_view{} : trim(term.substr(colon + 1));

  if (kind == "haar") return haar();
  if (kind == "point") return point_mass(parse_angle(args));
  if (kind == "bernoulli") {
    const double p = parse_rational(args);
    if (!(p >= 0.0 && p <= 1.0)) throw SpecParseError("bernoulli weight must lie in [0, 1]");
    return bernoulli(p);
  }
  if (kind == "atoms") {
    CircleMeasure m;
    for (auto item : split(args, ',')) {
      const auto at = item.find('@');
      if (at == std::string_view::npos) throw SpecParseError("atom '" + std::string(item) + "' needs ANGLE@MASS");
      m.atoms.push_back({parse_angle(item.substr(0, at)), parse_rational(item.substr(at + 1))});
    }
    return m;
  }
  if (kind == "arc") {
    const auto parts = split(args, ',');
    if (parts.size() < 2 || parts.size() > 3) throw SpecParseError("arc needs START,LENGTH[,MASS]");
    const UnitAngle start = parse_angle(parts[0]);
    double length = 0.0;
    if (parts[1].ends_with("pi")) {
      const std::string_view coef = trim(parts[1].substr(0, parts[1].size() - 2));
      length = (coef.empty() ? 1.0 : parse_rational(coef)) * std::numbers::pi;
    } else {
      length = parse_rational(parts[1]);
    }
    const double mass = parts.size() == 3 ? parse_rational(parts[2]) : 1.0;
    return CircleMeasure{{}, UniformArc{start, length, mass}};
  }
  throw SpecParseError("unknown measure kind '" + std::string(kind) + "'");
}

bool looks_like_shorthand(std::string_view spec) {
  for (std::string_view k : {"haar", "point:", "bernoulli:", "atoms:", "arc:"})
    if (spec.starts_with(k)) return true;
  return false;
}

void write_value(std::string& out, const Json& j, int indent, int depth);

void newline(std::string& out, int indent, int depth) {
  if (indent < 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

void write_float(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  out += s;
}

void write_value(std::string& out, const Json& j, int indent, int depth) {
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        out += Json(key).dump();
        out += indent < 0 ? ":" : ": ";
        write_value(out, value, indent, depth + 1);
      }
      newline(out, indent, depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        write_value(out, value, indent, depth + 1);
      }
      newline(out, indent, depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      write_float(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

Json atom_json(const Atom& a) {
  return Json{{"angle", a.angle.radians()}, {"angle_over_pi", a.angle.radians() / std::numbers::pi}, {"mass", a.mass}};
}

Json angles_json(const std::vector<UnitAngle>& angles) {
  Json arr = Json::array();
  for (UnitAngle a : angles) arr.push_back(a.radians());
  return arr;
}

}  // namespace

double parse_pi_multiple(std::string_view text) { return parse_rational(trim(text)); }

UnitAngle parse_angle(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw SpecParseError("empty angle");
  if (text.ends_with("pi")) {
    std::string_view coef = trim(text.substr(0, text.size() - 2));
    if (coef.empty() || coef == "+") return UnitAngle::from_pi_multiple(1.0);
    if (coef == "-") return UnitAngle::from_pi_multiple(-1.0);
    if (coef.ends_with('*')) coef.remove_suffix(1);
    return UnitAngle::from_pi_multiple(parse_rational(coef));
  }
  // "pi/2" style
  if (text.starts_with("pi/") || text.starts_with("-pi/")) {
    const bool neg = text.front() == '-';
    const double den = parse_number(text.substr(text.find('/') + 1));
    if (den == 0.0) throw SpecParseError("zero denominator in angle");
    return UnitAngle::from_pi_multiple((neg ? -1.0 : 1.0) / den);
  }
  return UnitAngle(parse_rational(text));
}

CircleMeasure parse_measure_spec(std::string_view spec) {
  spec = trim(spec);
  CircleMeasure m;
  try {
    if (looks_like_shorthand(spec)) {
      bool have_ac = false;
      for (auto term : split(spec, '+')) {
        CircleMeasure part = parse_term(term);
        m.atoms.insert(m.atoms.end(), part.atoms.begin(), part.atoms.end());
        if (!std::holds_alternative<NoAC>(part.ac)) {
          if (have_ac) throw SpecParseError("at most one absolutely continuous term is allowed");
          have_ac = true;
          m.ac = part.ac;
        }
      }
    } else {
      std::ifstream in{std::string(spec)};
      if (!in) throw SpecParseError("cannot read measure file '" + std::string(spec) + "'");
      Json j;
      try {
        j = Json::parse(in);
      } catch (const Json::exception& e) {
        throw SpecParseError(std::string("invalid JSON: ") + e.what());
      }
      m = measure_from_json(j);
    }
    return validate(m);
  } catch (const ValidationError& e) {
    throw SpecParseError(std::string("invalid measure '") + std::string(spec) + "': " + e.what());
  }
}

CircleMeasure measure_from_json(const Json& j) {
  if (!j.is_object()) throw SpecParseError("measure JSON must be an object");
  CircleMeasure m;
  if (j.contains("atoms")) {
    for (const auto& a : j.at("atoms"))
      m.atoms.push_back({UnitAngle::from_pi_multiple(pi_multiple_from_json(a, "angle_over_pi")),
                         number_from_json(a, "mass")});
  }
  if (j.contains("ac")) {
    const auto& ac = j.at("ac");
    const std::string kind = ac.value("kind", "none");
    if (kind == "none") {
      m.ac = NoAC{};
    } else if (kind == "haar") {
      m.ac = HaarAC{};
    } else if (kind == "uniform_arc") {
      m.ac = UniformArc{UnitAngle::from_pi_multiple(pi_multiple_from_json(ac, "start_over_pi")),
                        pi_multiple_from_json(ac, "length_over_pi") * std::numbers::pi, number_from_json(ac, "mass")};
    } else if (kind == "grid") {
      DensityGrid g;
      g.start = ac.contains("start_over_pi") ? UnitAngle::from_pi_multiple(pi_multiple_from_json(ac, "start_over_pi"))
                                             : UnitAngle{};
      if (!ac.contains("values") || !ac.at("values").is_array()) throw SpecParseError("grid needs a values array");
      for (const auto& v : ac.at("values")) {
        if (!v.is_number()) throw SpecParseError("grid values must be numbers");
        g.values.push_back(v.get<double>());
      }
      m.ac = std::move(g);
    } else {
      throw SpecParseError("unknown ac kind '" + kind + "'");
    }
  }
  return m;
}

Json measure_to_json(const CircleMeasure& m) {
  Json atoms = Json::array();
  for (const auto& a : m.atoms)
    atoms.push_back(Json{{"angle_over_pi", a.angle.radians() / std::numbers::pi}, {"mass", a.mass}});
  Json ac = std::visit(Overloaded{
                           [](const NoAC&) { return Json{{"kind", "none"}}; },
                           [](const HaarAC&) { return Json{{"kind", "haar"}}; },
                           [](const UniformArc& a) {
                             return Json{{"kind", "uniform_arc"},
                                         {"start_over_pi", a.start.radians() / std::numbers::pi},
                                         {"length_over_pi", a.length / std::numbers::pi},
                                         {"mass", a.mass}};
                           },
                           [](const DensityGrid& g) {
                             return Json{{"kind", "grid"},
                                         {"start_over_pi", g.start.radians() / std::numbers::pi},
                                         {"values", g.values}};
                           },
                       },
                       m.ac);
  return Json{{"atoms", atoms}, {"ac", ac}};
}

Json result_to_json(const ConvolutionResult& r) {
  Json atoms = Json::array();
  for (const auto& a : r.atoms) {
    Json j = atom_json(a.atom);
    j["radial_mass"] = a.radial_mass;
    j["confirmed"] = a.confirmed;
    atoms.push_back(std::move(j));
  }

  Json values = Json::array(), divergent = Json::array(), unconverged = Json::array(), failed = Json::array();
  Json residuals = Json::array(), iterations = Json::array(), eta_abs = Json::array();
  for (std::size_t k = 0; k < r.angles.size(); ++k) {
    values.push_back(std::isfinite(r.density[k]) ? Json(r.density[k]) : Json(nullptr));
    if (r.status[k] == PointStatus::Divergent) divergent.push_back(k);
    if (r.status[k] == PointStatus::Unconverged) unconverged.push_back(k);
    if (r.status[k] == PointStatus::SolverFailed) failed.push_back(k);
    residuals.push_back(r.diagnostics[k].max_residual);
    iterations.push_back(r.diagnostics[k].max_iterations);
    eta_abs.push_back(r.diagnostics[k].eta_abs);
  }

  Json out;
  out["atoms"] = std::move(atoms);
  out["density"] = Json{{"angles", r.angles}, {"values", std::move(values)}, {"divergent", std::move(divergent)}};
  Json qa = Json::array(), qw = Json::array();
  for (const auto& q : r.quadrature) {
    qa.push_back(q.angle);
    qw.push_back(q.weight);
  }
  out["quadrature"] = Json{{"angles", std::move(qa)}, {"weights", std::move(qw)}};
  out["mass_defect"] = r.mass_defect;
  out["diagnostics"] = Json{{"ac_mass", r.ac_mass},
                            {"refined_cells", r.refined_cells},
                            {"failed_nodes", r.failed_nodes},
                            {"min_raw_density", r.min_raw_density},
                            {"rotation", r.rotation},
                            {"unconverged", std::move(unconverged)},
                            {"solver_failed", std::move(failed)},
                            {"max_residual", std::move(residuals)},
                            {"max_iterations", std::move(iterations)},
                            {"eta_abs", std::move(eta_abs)}};
  return out;
}

ConvolutionResult result_from_json(const Json& j) {
  ConvolutionResult r;
  try {
    const auto& d = j.at("density");
    r.angles = d.at("angles").get<std::vector<double>>();
    for (const auto& v : d.at("values")) r.density.push_back(v.is_null() ? std::nan("") : v.get<double>());
    if (r.density.size() != r.angles.size()) throw SpecParseError("density values and angles differ in length");
    r.status.assign(r.angles.size(), PointStatus::Finite);
    for (const auto& k : d.at("divergent")) r.status.at(k.get<std::size_t>()) = PointStatus::Divergent;
    r.diagnostics.assign(r.angles.size(), {});
    if (j.contains("diagnostics")) {
      const auto& diag = j.at("diagnostics");
      for (const auto& k : diag.value("unconverged", Json::array())) r.status.at(k.get<std::size_t>()) = PointStatus::Unconverged;
      for (const auto& k : diag.value("solver_failed", Json::array()))
        r.status.at(k.get<std::size_t>()) = PointStatus::SolverFailed;
      r.ac_mass = diag.value("ac_mass", 0.0);
      r.min_raw_density = diag.value("min_raw_density", 0.0);
      r.rotation = diag.value("rotation", false);
      r.refined_cells = diag.value("refined_cells", std::size_t{0});
      r.failed_nodes = diag.value("failed_nodes", std::size_t{0});
    }
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      const auto qa = q.at("angles").get<std::vector<double>>();
      const auto qw = q.at("weights").get<std::vector<double>>();
      if (qa.size() != qw.size()) throw SpecParseError("quadrature angles and weights differ in length");
      for (std::size_t i = 0; i < qa.size(); ++i) r.quadrature.push_back({qa[i], qw[i]});
    } else {
      const double h = r.spacing();
      for (std::size_t k = 0; k < r.angles.size(); ++k)
        if (r.status[k] != PointStatus::Divergent && r.status[k] != PointStatus::SolverFailed &&
            std::isfinite(r.density[k]))
          r.quadrature.push_back({r.angles[k], r.density[k] * h});
    }
    for (const auto& a : j.at("atoms"))
      r.atoms.push_back({{UnitAngle(a.at("angle").get<double>()), a.at("mass").get<double>()},
                         a.value("radial_mass", a.at("mass").get<double>()),
                         a.value("confirmed", true)});
    r.mass_defect = j.at("mass_defect").get<double>();
  } catch (const Json::exception& e) {
    throw SpecParseError(std::string("malformed result JSON: ") + e.what());
  }
  return r;
}

void write_result_csv(std::ostream& out, const ConvolutionResult& r) {
  out << "theta,density,flag\n";
  char buf[64];
  for (std::size_t k = 0; k < r.angles.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,", r.angles[k]);
    out << buf;
    if (std::isfinite(r.density[k])) {
      std::snprintf(buf, sizeof buf, "%.17g", r.density[k]);
      out << buf;
    }
    out << ',' << to_string(r.status[k]) << '\n';
  }
}

Json report_to_json(const RegularityReport& rep) {
  Json pairs = Json::array();
  for (const auto& p : rep.critical_pairs)
    pairs.push_back(Json{{"alpha1", p.alpha1.radians()},
                         {"alpha2", p.alpha2.radians()},
                         {"mass_sum", p.mass_sum},
                         {"product_angle", p.product_angle.radians()},
                         {"product_angle_over_pi", p.product_angle.radians() / std::numbers::pi}});
  Json atoms = Json::array();
  for (const auto& a : rep.predicted_atoms) atoms.push_back(atom_json(a));
  return Json{{"verdict", to_string(rep.verdict)},
              {"max_pair_sum", rep.max_pair_sum},
              {"singular_part_purely_atomic", rep.singular_part_purely_atomic},
              {"critical_pairs", std::move(pairs)},
              {"predicted_atoms", std::move(atoms)},
              {"singular_candidates", angles_json(rep.singular_candidates)}};
}

Json singular_checks_to_json(const std::vector<SingularCheck>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks)
    arr.push_back(Json{{"angle", c.angle.radians()},
                       {"angle_over_pi", c.angle.radians() / std::numbers::pi},
                       {"status", to_string(c.status)},
                       {"final_gap", c.final_gap}});
  return arr;
}

Json moments_to_json(const MomentSeries& oracle) {
  Json arr = Json::array();
  for (std::size_t k = 1; k <= oracle.order(); ++k)
    arr.push_back(Json{{"k", k}, {"re", oracle(k).real()}, {"im", oracle(k).imag()}});
  return arr;
}

Json growth_to_json(const GrowthReport& g) {
  Json samples = Json::array();
  for (const auto& s : g.samples) {
    const char* status = s.status == LimitStatus::Converged ? "converged"
                         : s.status == LimitStatus::Divergent ? "divergent"
                                                              : "unconverged";
    samples.push_back(Json{{"offset", s.offset}, {"density", s.density}, {"status", status}});
  }
  return Json{{"product_angle", g.product_angle.radians()},
              {"monotone_growth", g.monotone_growth},
              {"exceeds_10_over_2pi", g.exceeds_10},
              {"exceeds_100_over_2pi", g.exceeds_100},
              {"exceeds_1000_over_2pi", g.exceeds_1000},
              {"samples", std::move(samples)}};
}

std::string dump(const Json& j, int indent) {
  std::string out;
  write_value(out, j, indent, 0);
  return out;
}

}  // namespace freeconv::io
