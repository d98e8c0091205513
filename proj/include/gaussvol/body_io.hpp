#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "gaussvol/geometry.hpp"

namespace gaussvol {

/// Body documents:
///   {"dim": n, "type": "halfspace", "a": [...], "b": x}
///   {"dim": n, "type": "polytope", "A": [[...], ...], "b": [...]}
///   {"dim": n, "type": "ball", "center": [...], "radius": r}   (center defaults to 0)
///   {"dim": n, "type": "box", "lower": [...], "upper": [...]}
///   {"dim": n, "type": "intersection", "members": [ {...}, ... ]}
/// "dim" is optional on members of an intersection. Throws InputError.
BodySpec body_from_json(const nlohmann::json& doc);
BodySpec parse_body(std::string_view text);
BodySpec load_body(const std::filesystem::path& path);

nlohmann::json body_to_json(const BodySpec& body);

}  // namespace gaussvol
