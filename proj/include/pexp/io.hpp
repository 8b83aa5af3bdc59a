#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pexp/fan.hpp"
#include "pexp/ktheory.hpp"
#include "pexp/laurent.hpp"
#include "pexp/pexp.hpp"

namespace pexp::io {

// Keys keep insertion order so that emitted documents are byte-stable.
using Json = nlohmann::ordered_json;

// Integers that fit in 64 bits are JSON numbers; larger ones are decimal
// strings. Both forms are accepted on input.
Json to_json(const Integer& x);
Integer integer_from_json(const Json& j);

template <class Tag>
Json to_json(const LatticeVector<Tag>& v) {
  Json a = Json::array();
  for (const auto& c : v.coords()) a.push_back(to_json(c));
  return a;
}
LatticePoint point_from_json(const Json& j, std::size_t rank);
Character character_from_json(const Json& j, std::size_t rank);

Json to_json(const RaySet& s);
RaySet rayset_from_json(const Json& j);

// {"rank": n, "terms": [{"coeff": c, "exp": [..]}, ...]}
Json to_json(const LaurentPoly& p);
LaurentPoly laurent_from_json(const Json& j);

// {"rank": n, "rays": [[..], ..], "max_cones": [[..], ..]}
Json to_json(const Fan& f);
Fan fan_from_json(const Json& j);

// Looks up a fan named by a string inside a document (a file path for the
// command-line tool).
using FanResolver = std::function<FanPtr(const std::string&)>;

// {"fan": <fan object or reference>, "values": [...]}. When `fan` is given
// it must agree with any embedded fan; a bare array of values is accepted.
Json to_json(const PExpFun& f);
Json values_to_json(const std::vector<LaurentPoly>& values);
std::vector<LaurentPoly> values_from_json(const Json& j);
FanPtr fan_of_document(const Json& j, FanPtr fan, const FanResolver& resolve = {});
PExpFun pexp_from_json(const Json& j, FanPtr fan = nullptr, const FanResolver& resolve = {});
// A list of functions: an array, or {"functions": [...]}.
std::vector<PExpFun> pexp_list_from_json(const Json& j, FanPtr fan = nullptr, const FanResolver& resolve = {});

// {"m": [[..], ..]}
Json to_json(const CartierData& d);
CartierData cartier_from_json(const Json& j, std::size_t rank);

// {"fine": <fan>, "coarse": <fan>, "assignment": [..]}
Json to_json(const SubdivisionMap& s);
SubdivisionMap subdivision_from_json(const Json& j);

// {"rows": [..], "columns": [[..], ..], "entries": [[<LaurentPoly>, ..], ..]}
Json to_json(const PairingMatrix& m);
PairingMatrix pairing_matrix_from_json(const Json& j);

Json parse(const std::string& text);
Json read_file(const std::string& path);
// Two-space indentation with a trailing newline.
std::string dump(const Json& j);

}  // namespace pexp::io
