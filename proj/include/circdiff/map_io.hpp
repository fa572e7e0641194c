#pragma once

#include "circdiff/circle_map.hpp"
#include "circdiff/denjoy.hpp"
#include "circdiff/pipeline.hpp"
#include "circdiff/rotation_combinatorics.hpp"

#include <nlohmann/json.hpp>

namespace circdiff {

using json = nlohmann::ordered_json;

// Reals travel as decimal strings to keep full precision; plain JSON numbers
// are accepted on input.
Real real_from_json(const json& j);
json real_to_json(const Real& v);

// Map-spec schema: {"type": "rotation" | "closed_form" | "pw_affine" |
// "blended" | "composed" | "denjoy" | "pw_quad", ...}. "pw_quad" is the
// serialization of built piecewise maps (node list) so constructed maps can
// round-trip.
CircleDiffeo map_from_json(const json& j);
json map_to_json(const CircleDiffeo& m);  // throws for non-serializable nodes

json schedule_to_json(const CharacteristicSchedule& s);
json analysis_to_json(long n, const AnalyzeResult& res);
json cert_to_json(const CertReport& c);
json smoothing_to_json(const SmoothingReport& s);
json plan_to_json(const PerturbationPlan& p);
json pipeline_report_to_json(const PipelineReport& r);
json reduction_to_json(const ReductionResult& r);
json denjoy_build_to_json(const DenjoyBuild& b);

}  // namespace circdiff
