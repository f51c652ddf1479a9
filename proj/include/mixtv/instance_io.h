#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mixtv/model.h"

namespace mixtv {

/// A pair of mixtures over the same [q]^n.
struct Instance {
  Mixture p;
  Mixture q;
};

/// Reads {"q": int, "n": int, "p": {...}, "q_dist": {...}} where each side is
/// {"weights": [k reals], "components": [k][n][q reals]}. Unknown keys are
/// ignored. Throws kParseError on malformed JSON or missing fields, and the
/// validate_mixture() errors otherwise.
Instance parse_instance(const nlohmann::json& doc);
Instance parse_instance_text(const std::string& text);
/// Whole file as JSON; kParseError if unreadable or malformed.
nlohmann::json load_json(const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

nlohmann::json to_json(const Instance& instance);

/// Hex SHA-256 of the canonical dump of an instance document (sorted keys,
/// no whitespace), so formatting differences do not change it.
std::string instance_digest(const nlohmann::json& doc);

}  // namespace mixtv
