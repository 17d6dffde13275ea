#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

#include "freeconv/convolution.hpp"
#include "freeconv/regularity.hpp"
#include "freeconv/series.hpp"

namespace freeconv::io {

using Json = nlohmann::ordered_json;

/// Parses "1.5", "0.25pi", "pi", "-pi/2", "1/3pi" to radians.
/// Plain numbers are radians; a trailing "pi" multiplies by π.
UnitAngle parse_angle(std::string_view text);

/// Parses a rational-or-float multiple of π ("1/3", "0.5", or a JSON number).
double parse_pi_multiple(std::string_view text);

/// Shorthand forms:
///   haar
///   point:ANGLE
///   bernoulli:P                 P·δ_1 + (1 − P)·δ_{−1}
///   atoms:ANGLE@MASS,ANGLE@MASS,...
///   arc:START,LENGTH[,MASS]    uniform arc (remaining mass must be atoms; omit for mass 1)
/// Anything else is read as a path to a measure JSON file.
/// Throws SpecParseError; the result is validated.
CircleMeasure parse_measure_spec(std::string_view spec);

CircleMeasure measure_from_json(const Json& j);
Json measure_to_json(const CircleMeasure& m);

Json result_to_json(const ConvolutionResult& r);
ConvolutionResult result_from_json(const Json& j);
void write_result_csv(std::ostream& out, const ConvolutionResult& r);

Json report_to_json(const RegularityReport& rep);
Json singular_checks_to_json(const std::vector<SingularCheck>& checks);
Json moments_to_json(const MomentSeries& oracle);
Json growth_to_json(const GrowthReport& g);

/// Serialises with fixed key order and every float at 17 significant digits,
/// so equal inputs give byte-identical text.
std::string dump(const Json& j, int indent = 2);

}  // namespace freeconv::io
