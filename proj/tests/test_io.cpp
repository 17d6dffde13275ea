#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "freeconv/error.hpp"
#include "freeconv/io.hpp"

using namespace freeconv;
using freeconv::io::Json;

namespace {

ConvolutionResult bernoulli_square() {
  ConvolutionOptions o;
  o.grid_size = 128;
  return convolve(bernoulli(0.7), bernoulli(0.7), o);
}

// CDF on [0, 2π) built only from the serialized result, as an external
// consumer would: quadrature nodes plus atoms as jumps.
double cdf_from_json(const Json& j, double theta) {
  double f = 0.0;
  const auto& q = j.at("quadrature");
  for (std::size_t i = 0; i < q.at("angles").size(); ++i)
    if (q.at("angles")[i].get<double>() <= theta) f += q.at("weights")[i].get<double>();
  for (const auto& a : j.at("atoms"))
    if (a.at("angle").get<double>() <= theta) f += a.at("mass").get<double>();
  return f;
}

}  // namespace

TEST_CASE("angles") {
  CHECK(io::parse_angle("pi").radians() == doctest::Approx(std::numbers::pi));
  CHECK(io::parse_angle("0.5pi").radians() == doctest::Approx(std::numbers::pi / 2));
  CHECK(io::parse_angle("1/3pi").radians() == doctest::Approx(std::numbers::pi / 3));
  CHECK(io::parse_angle("-pi/2").radians() == doctest::Approx(1.5 * std::numbers::pi));
  CHECK(io::parse_angle("1.25").radians() == doctest::Approx(1.25));
  CHECK(io::parse_pi_multiple("3/4") == doctest::Approx(0.75));
  CHECK_THROWS_AS(io::parse_angle(""), SpecParseError);
  CHECK_THROWS_AS(io::parse_angle("1/0pi"), SpecParseError);
  CHECK_THROWS_AS(io::parse_angle("abc"), SpecParseError);
}

TEST_CASE("shorthand measures") {
  CHECK(std::holds_alternative<HaarAC>(io::parse_measure_spec("haar").ac));
  const auto p = io::parse_measure_spec("point:0.25pi");
  REQUIRE(p.atoms.size() == 1);
  CHECK(p.atoms[0].angle.radians() == doctest::Approx(std::numbers::pi / 4));

  const auto b = io::parse_measure_spec("bernoulli:0.7");
  CHECK(b.largest_atom() == doctest::Approx(0.7));

  const auto a = io::parse_measure_spec("atoms:0@0.4,0.5pi@0.3,pi@0.3");
  REQUIRE(a.atoms.size() == 3);
  CHECK(a.atoms[1].angle.radians() == doctest::Approx(std::numbers::pi / 2));
  CHECK(a.atoms[2].mass == doctest::Approx(0.3));

  const auto mixed = io::parse_measure_spec("atoms:1@0.4 + arc:3,2,0.6");
  REQUIRE(std::holds_alternative<UniformArc>(mixed.ac));
  CHECK(std::get<UniformArc>(mixed.ac).length == doctest::Approx(2.0));
  CHECK(mixed.total_mass() == doctest::Approx(1.0));

  CHECK(std::get<UniformArc>(io::parse_measure_spec("arc:0,pi").ac).mass == doctest::Approx(1.0));
}

TEST_CASE("bad specs raise SpecParseError") {
  for (const char* spec : {"bernoulli:1.5", "atoms:0@0.5", "atoms:0-0.5", "arc:0", "nosuchfile.json",
                           "haar + arc:0,pi", "bernoulli:x"})
    CHECK_THROWS_AS(io::parse_measure_spec(spec), SpecParseError);
}

TEST_CASE("measure JSON round trip and files") {
  CircleMeasure m = atomic({{UnitAngle::from_pi_multiple(0.5), 0.25}});
  m.ac = sample_density([](double t) { return 2.0 + std::cos(t); }, 0.75, 32);
  m = validate(m);
  const Json j = io::measure_to_json(m);
  const CircleMeasure back = validate(io::measure_from_json(j));
  CHECK(back.atoms[0].angle.radians() == doctest::Approx(m.atoms[0].angle.radians()));
  CHECK(std::get<DensityGrid>(back.ac).values == std::get<DensityGrid>(m.ac).values);
  CHECK(io::dump(io::measure_to_json(back)) == io::dump(j));

  const std::string path = "test_io_measure.json";
  {
    std::ofstream f(path);
    f << io::dump(j);
  }
  CHECK(io::parse_measure_spec(path).total_mass() == doctest::Approx(1.0));
  {
    std::ofstream f(path);
    f << "{ not json";
  }
  CHECK_THROWS_AS(io::parse_measure_spec(path), SpecParseError);
  std::remove(path.c_str());

  CHECK(io::measure_from_json(Json::parse(R"({"atoms":[{"angle_over_pi":"1/2","mass":1}]})")).atoms[0].angle ==
        UnitAngle::from_pi_multiple(0.5));
  CHECK_THROWS_AS(io::measure_from_json(Json::parse(R"({"ac":{"kind":"spiral"}})")), SpecParseError);
}

TEST_CASE("dump is deterministic with 17 significant digits") {
  const Json j = Json{{"b", 0.1}, {"a", 1.0 / 3.0}, {"n", 3}};
  const std::string s = io::dump(j);
  CHECK(s == io::dump(Json::parse(s)));
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(s.find("\"b\"") < s.find("\"a\""));  // insertion order kept

  const auto r1 = bernoulli_square();
  const auto r2 = bernoulli_square();
  CHECK(io::dump(io::result_to_json(r1)) == io::dump(io::result_to_json(r2)));
}

TEST_CASE("result JSON carries what an external verifier needs") {
  const auto r = bernoulli_square();
  const Json j = Json::parse(io::dump(io::result_to_json(r)));
  for (const char* key : {"atoms", "density", "quadrature", "mass_defect", "diagnostics"}) CHECK(j.contains(key));
  CHECK(j.at("density").at("angles").size() == 128);
  REQUIRE(j.at("atoms").size() == 1);
  CHECK(j.at("atoms")[0].at("mass").get<double>() == doctest::Approx(0.4));

  double prev = 0.0;
  for (double t = 0.0; t < kTwoPi; t += 0.05) {
    const double f = cdf_from_json(j, t);
    CHECK(f >= prev - 1e-15);
    prev = f;
  }
  CHECK(cdf_from_json(j, 0.0) >= 0.4 - 1e-12);
  CHECK(std::abs(cdf_from_json(j, kTwoPi) - 1.0) < 1e-4);
}

TEST_CASE("result JSON round trip") {
  const auto r = bernoulli_square();
  const auto back = io::result_from_json(io::result_to_json(r));
  CHECK(back.angles == r.angles);
  CHECK(back.status == r.status);
  CHECK(back.quadrature.size() == r.quadrature.size());
  REQUIRE(back.atoms.size() == 1);
  CHECK(back.atoms[0].confirmed);
  CHECK(std::abs(result_moment(back, 3) - result_moment(r, 3)) < 1e-15);
  CHECK(io::dump(io::result_to_json(back)).size() > 0);

  // Without quadrature the grid is used as a trapezoid rule.
  Json j = io::result_to_json(r);
  j.erase("quadrature");
  const auto coarse = io::result_from_json(j);
  CHECK(coarse.quadrature.size() == r.angles.size() - r.count(PointStatus::Divergent) - r.count(PointStatus::SolverFailed));

  CHECK_THROWS_AS(io::result_from_json(Json::parse(R"({"density":{}})")), SpecParseError);
  Json bad = io::result_to_json(r);
  bad["density"]["values"].erase(0);
  CHECK_THROWS_AS(io::result_from_json(bad), SpecParseError);
}

TEST_CASE("CSV has one row per grid point") {
  const auto r = bernoulli_square();
  std::ostringstream os;
  io::write_result_csv(os, r);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta,density,flag");
  std::size_t rows = 0, divergent = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.ends_with(",divergent")) {
      ++divergent;
      CHECK(line.find(",,") != std::string::npos);
    }
  }
  CHECK(rows == r.angles.size());
  CHECK(divergent == r.count(PointStatus::Divergent));
  CHECK(divergent >= 1);
}

TEST_CASE("reports serialize") {
  const auto rep = classify(bernoulli(0.7), bernoulli(0.7));
  const Json j = io::report_to_json(rep);
  CHECK(j.at("verdict") == "HasAtoms");
  CHECK(j.at("predicted_atoms").size() == 1);
  const auto mj = io::moments_to_json(boxtimes_moments(bernoulli(0.7), bernoulli(0.6), 3));
  REQUIRE(mj.size() == 3);
  CHECK(mj[0].at("re").get<double>() == doctest::Approx(0.4 * 0.2));
}
