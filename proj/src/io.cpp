#include "pexp/io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "pexp/error.hpp"

namespace pexp::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object()) fail(std::string(what) + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string(what) + " is missing \"" + key + "\"");
  return *it;
}

const Json& array_field(const Json& j, const char* key, const char* what) {
  const Json& a = field(j, key, what);
  if (!a.is_array()) fail(std::string(what) + ": \"" + key + "\" must be an array");
  return a;
}

std::size_t size_from_json(const Json& j, const char* what) {
  if (!j.is_number_integer()) fail(std::string(what) + " must be a nonnegative integer");
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  const auto v = j.get<std::int64_t>();
  if (v < 0) fail(std::string(what) + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

template <class Tag>
LatticeVector<Tag> vector_from_json(const Json& j, std::size_t rank, const char* what) {
  if (!j.is_array()) fail(std::string(what) + " must be an integer array");
  if (j.size() != rank)
    fail(std::string(what) + " has " + std::to_string(j.size()) + " entries, expected " + std::to_string(rank));
  std::vector<Integer> c;
  for (const auto& x : j) c.push_back(integer_from_json(x));
  return LatticeVector<Tag>(std::move(c));
}

}  // namespace

Json to_json(const Integer& x) {
  if (x.fits_slong_p()) {
    const long v = x.get_si();
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
      return Json(static_cast<std::int64_t>(v));
  }
  return Json(x.get_str());
}

Integer integer_from_json(const Json& j) {
  if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
  if (j.is_number_integer()) return Integer(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    Integer x;
    if (s.empty() || x.set_str(s, 10) != 0) fail("\"" + s + "\" is not a decimal integer");
    return x;
  }
  fail("expected an integer, got " + j.dump());
}

LatticePoint point_from_json(const Json& j, std::size_t rank) {
  return vector_from_json<CocharacterTag>(j, rank, "lattice point");
}

Character character_from_json(const Json& j, std::size_t rank) {
  return vector_from_json<CharacterTag>(j, rank, "character");
}

Json to_json(const RaySet& s) {
  Json a = Json::array();
  for (std::size_t r : s) a.push_back(r);
  return a;
}

RaySet rayset_from_json(const Json& j) {
  if (!j.is_array()) fail("a cone must be an array of ray indices");
  RaySet s;
  for (const auto& x : j) s.push_back(size_from_json(x, "ray index"));
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) fail("cone " + j.dump() + " repeats a ray");
  return s;
}

Json to_json(const LaurentPoly& p) {
  Json terms = Json::array();
  for (const auto& [u, c] : p.terms()) {
    Json t;
    t["coeff"] = to_json(c);
    t["exp"] = to_json(u);
    terms.push_back(std::move(t));
  }
  Json j;
  j["rank"] = p.rank();
  j["terms"] = std::move(terms);
  return j;
}

LaurentPoly laurent_from_json(const Json& j) {
  const std::size_t rank = size_from_json(field(j, "rank", "Laurent polynomial"), "rank");
  std::vector<std::pair<Character, Integer>> terms;
  for (const auto& t : array_field(j, "terms", "Laurent polynomial"))
    terms.emplace_back(character_from_json(field(t, "exp", "term"), rank), integer_from_json(field(t, "coeff", "term")));
  return LaurentPoly::from_terms(rank, terms);
}

Json to_json(const Fan& f) {
  Json rays = Json::array();
  for (const auto& r : f.rays()) rays.push_back(to_json(r));
  Json cones = Json::array();
  for (const auto& s : f.maximal_cones()) cones.push_back(to_json(s));
  Json j;
  j["rank"] = f.rank();
  j["rays"] = std::move(rays);
  j["max_cones"] = std::move(cones);
  return j;
}

Fan fan_from_json(const Json& j) {
  const std::size_t rank = size_from_json(field(j, "rank", "fan"), "rank");
  std::vector<LatticePoint> rays;
  for (const auto& r : array_field(j, "rays", "fan")) rays.push_back(point_from_json(r, rank));
  std::vector<RaySet> cones;
  for (const auto& c : array_field(j, "max_cones", "fan")) cones.push_back(rayset_from_json(c));
  return Fan::build(rank, std::move(rays), std::move(cones));
}

Json values_to_json(const std::vector<LaurentPoly>& values) {
  Json a = Json::array();
  for (const auto& v : values) a.push_back(to_json(v));
  return a;
}

Json to_json(const PExpFun& f) {
  Json j;
  j["fan"] = to_json(*f.fan());
  j["values"] = values_to_json(f.values());
  return j;
}

std::vector<LaurentPoly> values_from_json(const Json& j) {
  const Json& a = j.is_array() ? j : array_field(j, "values", "piecewise exponential function");
  std::vector<LaurentPoly> out;
  for (const auto& v : a) out.push_back(laurent_from_json(v));
  return out;
}

FanPtr fan_of_document(const Json& j, FanPtr fan, const FanResolver& resolve) {
  if (!j.is_object() || !j.contains("fan")) {
    if (!fan) fail("document names no fan and none was supplied");
    return fan;
  }
  const Json& f = j["fan"];
  FanPtr named;
  if (f.is_string()) {
    if (!resolve) {
      if (!fan) fail("fan reference \"" + f.get<std::string>() + "\" cannot be resolved here");
      return fan;
    }
    named = resolve(f.get<std::string>());
  } else {
    named = std::make_shared<const Fan>(fan_from_json(f));
  }
  if (fan && !same_fan(fan, named)) throw Error(ErrorKind::FanMismatch, "document's fan differs from the supplied fan");
  return fan ? fan : named;
}

PExpFun pexp_from_json(const Json& j, FanPtr fan, const FanResolver& resolve) {
  FanPtr f = fan_of_document(j, std::move(fan), resolve);
  return make_pexp(std::move(f), values_from_json(j));
}

std::vector<PExpFun> pexp_list_from_json(const Json& j, FanPtr fan, const FanResolver& resolve) {
  const Json* list = &j;
  if (j.is_object()) {
    fan = fan_of_document(j, std::move(fan), resolve);
    list = &array_field(j, "functions", "function list");
  }
  if (!list->is_array()) fail("a function list must be an array");
  std::vector<PExpFun> out;
  for (const auto& item : *list) out.push_back(pexp_from_json(item, fan, resolve));
  return out;
}

Json to_json(const CartierData& d) {
  Json m = Json::array();
  for (const auto& x : d.m) m.push_back(to_json(x));
  Json j;
  j["m"] = std::move(m);
  return j;
}

CartierData cartier_from_json(const Json& j, std::size_t rank) {
  CartierData d;
  for (const auto& x : array_field(j, "m", "Cartier data")) d.m.push_back(character_from_json(x, rank));
  return d;
}

Json to_json(const SubdivisionMap& s) {
  Json j;
  j["fine"] = to_json(*s.fine);
  j["coarse"] = to_json(*s.coarse);
  Json a = Json::array();
  for (std::size_t x : s.assignment) a.push_back(x);
  j["assignment"] = std::move(a);
  return j;
}

SubdivisionMap subdivision_from_json(const Json& j) {
  auto fine = std::make_shared<const Fan>(fan_from_json(field(j, "fine", "subdivision")));
  auto coarse = std::make_shared<const Fan>(fan_from_json(field(j, "coarse", "subdivision")));
  std::vector<std::size_t> a;
  for (const auto& x : array_field(j, "assignment", "subdivision")) a.push_back(size_from_json(x, "assignment"));
  if (a.size() != fine->num_maximal())
    fail("assignment has " + std::to_string(a.size()) + " entries for " + std::to_string(fine->num_maximal()) +
         " fine cones");
  if (fine->rank() != coarse->rank()) throw Error(ErrorKind::RankMismatch, "fine and coarse fans differ in rank");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] >= coarse->num_maximal()) fail("assignment " + std::to_string(a[i]) + " is not a coarse cone");
    for (const auto& g : fine->maximal_cone(i).generators())
      if (!coarse->maximal_cone(a[i]).contains(g))
        throw Error(ErrorKind::InvalidArgument, "fine cone " + std::to_string(i) + " is not inside coarse cone " +
                                                    std::to_string(a[i]));
  }
  return SubdivisionMap{std::move(fine), std::move(coarse), std::move(a)};
}

Json to_json(const PairingMatrix& m) {
  Json j;
  j["rows"] = m.row_labels;
  Json cols = Json::array();
  for (const auto& c : m.columns) cols.push_back(to_json(c));
  j["columns"] = std::move(cols);
  Json entries = Json::array();
  for (const auto& row : m.entries) entries.push_back(values_to_json(row));
  j["entries"] = std::move(entries);
  return j;
}

PairingMatrix pairing_matrix_from_json(const Json& j) {
  PairingMatrix m;
  for (const auto& r : array_field(j, "rows", "pairing matrix")) {
    if (!r.is_string()) fail("row labels must be strings");
    m.row_labels.push_back(r.get<std::string>());
  }
  for (const auto& c : array_field(j, "columns", "pairing matrix")) m.columns.push_back(rayset_from_json(c));
  for (const auto& row : array_field(j, "entries", "pairing matrix")) {
    if (!row.is_array() || row.size() != m.columns.size()) fail("pairing matrix row has the wrong length");
    m.entries.push_back(values_from_json(row));
  }
  if (m.entries.size() != m.row_labels.size()) fail("pairing matrix has the wrong number of rows");
  return m;
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::exception& e) {
    fail(path + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace pexp::io
