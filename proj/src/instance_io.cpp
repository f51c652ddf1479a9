#include "mixtv/instance_io.h"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "mixtv/error.h"

namespace mixtv {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorKind::kParseError, std::string("instance is missing field \"") + key + "\"");
  }
  return obj.at(key);
}

RawMixture parse_side(const json& side) {
  RawMixture raw;
  try {
    raw.weights = require(side, "weights").get<std::vector<double>>();
    raw.components = require(side, "components").get<std::vector<std::vector<std::vector<double>>>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("malformed mixture: ") + e.what());
  }
  return raw;
}

int parse_dim(const json& doc, const char* key) {
  const json& v = require(doc, key);
  if (!v.is_number_integer()) throw Error(ErrorKind::kParseError, std::string("\"") + key + "\" must be an integer");
  return v.get<int>();
}

json side_to_json(const Mixture& m) {
  RawMixture raw = m.to_raw();
  return json{{"weights", raw.weights}, {"components", raw.components}};
}

}  // namespace

Instance parse_instance(const json& doc) {
  const int q = parse_dim(doc, "q");
  const int n = parse_dim(doc, "n");
  Mixture p = validate_mixture(q, n, parse_side(require(doc, "p")));
  Mixture qd = validate_mixture(q, n, parse_side(require(doc, "q_dist")));
  return Instance{std::move(p), std::move(qd)};
}

Instance parse_instance_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
  return parse_instance(doc);
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
}

Instance load_instance(const std::filesystem::path& path) { return parse_instance(load_json(path)); }

json to_json(const Instance& instance) {
  return json{{"q", instance.p.q()},
              {"n", instance.p.n()},
              {"p", side_to_json(instance.p)},
              {"q_dist", side_to_json(instance.q)}};
}

std::string instance_digest(const json& doc) {
  const std::string canonical = doc.dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(canonical.data(), canonical.size(), md.data(), &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char byte[3];
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

}  // namespace mixtv
