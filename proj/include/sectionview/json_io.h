#ifndef SECTIONVIEW_JSON_IO_H_
#define SECTIONVIEW_JSON_IO_H_

// JSON encodings shared by the snapshot format and the HTTP service.

#include <json.hpp>

#include <string>

#include "sectionview/dataset.h"
#include "sectionview/distance.h"
#include "sectionview/layout.h"
#include "sectionview/models.h"
#include "sectionview/section.h"

namespace sectionview {

using Json = nlohmann::json;

// Compact serialization with sorted object keys and every floating-point
// number written with 17 significant digits (non-finite values become
// null). Identical documents always produce identical bytes.
std::string canonical_dump(const Json& doc);

Json value_to_json(const Value& v);
// Numbers decode as doubles, strings as labels; anything else throws
// ValidationError.
Value value_from_json(const Json& j);

Json distance_to_json(const DistanceConfig& cfg);
DistanceConfig distance_from_json(const Json& j);

Json spec_to_json(const SectionSpec& spec);
SectionSpec spec_from_json(const Json& j);

Json response_to_json(const ResponseInfo& r);
ResponseInfo response_from_json(const Json& j);

Json prediction_to_json(const Prediction& p);
Prediction prediction_from_json(const Json& j);

Json grid_to_json(const Grid& g);
Grid grid_from_json(const Json& j);

Json nearby_to_json(const std::vector<NearbyObservation>& nearby);
std::vector<NearbyObservation> nearby_from_json(const Json& j);

Json summary_to_json(const SummaryPlotData& s);
Json layout_to_json(const SelectorLayout& layout);

// Body of a section result: version, spec, grid, predictions, nearby and
// the result-describing part of meta (response, display kind, missing
// count).
Json section_to_json(const SectionResult& r);
SectionResult section_from_json(const Json& doc);

}  // namespace sectionview

#endif  // SECTIONVIEW_JSON_IO_H_
