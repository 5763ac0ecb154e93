#pragma once

#include <json.hpp>

#include "chartlens/geometry.hpp"
#include "chartlens/markset.hpp"

namespace chartlens {

using Json = nlohmann::ordered_json;

/// {"kind","geometry":{"type":"box"|"polygon"|"mask_rle",...},"label"}
Json region_to_json(const Region& r);
/// Throws InputError on schema violations.
Region region_from_json(const Json& j);

Json markset_to_json(const MarkSet& m);
MarkSet markset_from_json(const Json& j);

}  // namespace chartlens
