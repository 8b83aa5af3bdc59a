#include "pexp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "pexp/error.hpp"
#include "pexp/io.hpp"
#include "pexp/ktheory.hpp"

namespace pexp::cli {

namespace {

using io::Json;

// A result in both renderings: the JSON document and aligned text rows.
struct Report {
  Json json = Json::object();
  std::vector<std::pair<std::string, std::string>> rows;

  void row(std::string key, std::string value) { rows.emplace_back(std::move(key), std::move(value)); }
};

std::string set_text(const RaySet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

void print(const Report& r, bool text, std::ostream& out) {
  if (!text) {
    out << io::dump(r.json);
    return;
  }
  std::size_t width = 0;
  for (const auto& [k, v] : r.rows) width = std::max(width, k.size());
  for (const auto& [k, v] : r.rows) out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
}

bool is_negative(ErrorKind k) {
  switch (k) {
    case ErrorKind::GkmViolation:
    case ErrorKind::NotDescendable:
    case ErrorKind::NotInSpan:
    case ErrorKind::NotIntegral:
    case ErrorKind::DependentBasis:
    case ErrorKind::SingularGram:
      return true;
    default:
      return false;
  }
}

struct Options {
  std::string fan_path;
  std::string pexp_path;
  std::string basis_path;
  std::string subdivision_path;
  std::string cone;
  std::string cones;
  std::string format = "json";
  int epsilon = kDefaultEpsilon;
  std::optional<std::uint64_t> seed;
};

class Loader {
 public:
  FanPtr fan_file(const std::string& path) {
    const std::string key = std::filesystem::weakly_canonical(path).string();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto f = std::make_shared<const Fan>(io::fan_from_json(io::read_file(path)));
    cache_.emplace(key, f);
    return f;
  }

  io::FanResolver resolver_for(const std::string& document) {
    const std::filesystem::path dir = std::filesystem::path(document).parent_path();
    return [this, dir](const std::string& ref) { return fan_file((dir / ref).string()); };
  }

 private:
  std::map<std::string, FanPtr> cache_;
};

LocalizationOptions localization(const Options& o) {
  LocalizationOptions l;
  l.epsilon = o.epsilon;
  l.resolve.seed = o.seed;
  return l;
}

std::vector<RaySet> parse_cones(const std::string& text) {
  Json j = io::parse(text);
  if (!j.is_array()) throw Error(ErrorKind::Parse, "--cones must be a JSON array of ray index arrays");
  std::vector<RaySet> out;
  for (const auto& c : j) out.push_back(io::rayset_from_json(c));
  return out;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorKind::InvalidArgument, std::string("missing ") + flag);
}

FanPtr supplied_fan(const Options& o, Loader& loader) {
  return o.fan_path.empty() ? nullptr : loader.fan_file(o.fan_path);
}

PExpFun load_function(const Options& o, Loader& loader, FanPtr fan) {
  require(o.pexp_path, "--pexp");
  return io::pexp_from_json(io::read_file(o.pexp_path), std::move(fan), loader.resolver_for(o.pexp_path));
}

std::vector<PExpFun> load_basis(const Options& o, Loader& loader, FanPtr fan) {
  require(o.basis_path, "--basis");
  return io::pexp_list_from_json(io::read_file(o.basis_path), std::move(fan), loader.resolver_for(o.basis_path));
}

Report validate_fan(const Options& o, Loader& loader) {
  require(o.fan_path, "--fan");
  const Fan& f = *loader.fan_file(o.fan_path);
  Report r;
  bool simplicial = true;
  Json cones = Json::array();
  for (std::size_t i = 0; i < f.num_maximal(); ++i) {
    const Cone& c = f.maximal_cone(i);
    Json cj;
    cj["rays"] = io::to_json(f.maximal_cones()[i]);
    cj["dim"] = c.dim();
    cj["multiplicity"] = c.is_simplicial() ? io::to_json(c.multiplicity()) : Json(nullptr);
    simplicial = simplicial && c.is_simplicial();
    cones.push_back(std::move(cj));
  }
  const bool complete = is_complete(f);
  r.json["valid"] = true;
  r.json["rank"] = f.rank();
  r.json["rays"] = f.rays().size();
  r.json["complete"] = complete;
  r.json["simplicial"] = simplicial;
  r.json["smooth"] = f.is_smooth();
  r.json["max_cones"] = std::move(cones);
  r.row("valid", "yes");
  r.row("rank", std::to_string(f.rank()));
  r.row("rays", std::to_string(f.rays().size()));
  r.row("complete", complete ? "yes" : "no");
  r.row("simplicial", simplicial ? "yes" : "no");
  r.row("smooth", f.is_smooth() ? "yes" : "no");
  for (std::size_t i = 0; i < f.num_maximal(); ++i) {
    const Cone& c = f.maximal_cone(i);
    r.row("cone " + set_text(f.maximal_cones()[i]),
          "dim " + std::to_string(c.dim()) +
              (c.is_simplicial() ? ", multiplicity " + c.multiplicity().get_str() : ", not simplicial"));
  }
  return r;
}

Report resolve_fan(const Options& o, Loader& loader) {
  require(o.fan_path, "--fan");
  SubdivisionMap s = resolve(loader.fan_file(o.fan_path), ResolveOptions{o.seed});
  Report r;
  r.json = io::to_json(s);
  const Fan& fine = *s.fine;
  for (std::size_t i = 0; i < fine.rays().size(); ++i) r.row("ray " + std::to_string(i), fine.rays()[i].to_string());
  for (std::size_t i = 0; i < fine.num_maximal(); ++i)
    r.row("cone " + set_text(fine.maximal_cones()[i]), "in coarse " + set_text(s.coarse->maximal_cones()[s.assignment[i]]));
  return r;
}

int gkm_check(const Options& o, Loader& loader, std::ostream& out, bool text) {
  require(o.pexp_path, "--pexp");
  Json doc = io::read_file(o.pexp_path);
  FanPtr fan = io::fan_of_document(doc, supplied_fan(o, loader), loader.resolver_for(o.pexp_path));
  GkmReport g = gkm_validate(fan, io::values_from_json(doc));
  Report r;
  r.json["valid"] = g.ok();
  r.row("valid", g.ok() ? "yes" : "no");
  if (!g.ok()) {
    Json vs = Json::array();
    for (const auto& v : g.violations) {
      const RaySet& a = fan->maximal_cones()[v.first];
      const RaySet& b = fan->maximal_cones()[v.second];
      Json vj;
      vj["cones"] = Json::array({io::to_json(a), io::to_json(b)});
      vj["face"] = io::to_json(v.face);
      vj["restrictions"] = Json::array({io::to_json(v.first_restricted), io::to_json(v.second_restricted)});
      vs.push_back(std::move(vj));
      r.row("face " + set_text(v.face), set_text(a) + " gives " + v.first_restricted.to_string() + ", " + set_text(b) +
                                           " gives " + v.second_restricted.to_string());
    }
    r.json["violations"] = std::move(vs);
  }
  print(r, text, out);
  return g.ok() ? kOk : kNegative;
}

Report restrict_cmd(const Options& o, Loader& loader) {
  require(o.cone, "--cone");
  PExpFun f = load_function(o, loader, supplied_fan(o, loader));
  RaySet tau = io::rayset_from_json(io::parse(o.cone));
  LaurentPoly v = restrict(f, tau);
  Report r;
  r.json["cone"] = io::to_json(tau);
  r.json["value"] = io::to_json(v);
  r.row("cone", set_text(tau));
  r.row("value", v.to_string());
  return r;
}

Report chi_cmd(const Options& o, Loader& loader) {
  PExpFun f = load_function(o, loader, supplied_fan(o, loader));
  LaurentPoly v = chi(f, localization(o));
  Report r;
  r.json["chi"] = io::to_json(v);
  r.row("chi", v.to_string());
  return r;
}

Report pair_cmd(const Options& o, Loader& loader) {
  require(o.cone, "--cone");
  PExpFun f = load_function(o, loader, supplied_fan(o, loader));
  RaySet tau = io::rayset_from_json(io::parse(o.cone));
  LaurentPoly v = kronecker_pair(f, tau, localization(o));
  Report r;
  r.json["cone"] = io::to_json(tau);
  r.json["pairing"] = io::to_json(v);
  r.row("cone", set_text(tau));
  r.row("pairing", v.to_string());
  return r;
}

Report gram_cmd(const Options& o, Loader& loader) {
  require(o.cones, "--cones");
  std::vector<PExpFun> basis = load_basis(o, loader, supplied_fan(o, loader));
  FanPtr fan = basis.empty() ? supplied_fan(o, loader) : basis.front().fan();
  if (!fan) throw Error(ErrorKind::InvalidArgument, "an empty basis needs --fan");
  PairingMatrix m = gram_matrix(fan, basis, parse_cones(o.cones), localization(o));
  Report r;
  r.json = io::to_json(m);
  for (std::size_t i = 0; i < m.entries.size(); ++i)
    for (std::size_t j = 0; j < m.columns.size(); ++j)
      r.row(m.row_labels[i] + " " + set_text(m.columns[j]), m.entries[i][j].to_string());
  return r;
}

Report decompose_cmd(const Options& o, Loader& loader) {
  PExpFun f = load_function(o, loader, supplied_fan(o, loader));
  std::vector<PExpFun> basis = load_basis(o, loader, f.fan());
  std::vector<LaurentPoly> c = decompose(f, basis);
  Report r;
  r.json["coefficients"] = io::values_to_json(c);
  for (std::size_t i = 0; i < c.size(); ++i) r.row("c" + std::to_string(i), c[i].to_string());
  return r;
}

Report dual_basis_cmd(const Options& o, Loader& loader) {
  require(o.cones, "--cones");
  std::vector<PExpFun> basis = load_basis(o, loader, supplied_fan(o, loader));
  FanPtr fan = basis.empty() ? supplied_fan(o, loader) : basis.front().fan();
  if (!fan) throw Error(ErrorKind::InvalidArgument, "an empty basis needs --fan");
  std::vector<PExpFun> g = dual_basis_solve(fan, parse_cones(o.cones), basis, localization(o));
  Report r;
  r.json["fan"] = io::to_json(*fan);
  Json fs = Json::array();
  for (std::size_t j = 0; j < g.size(); ++j) {
    Json item;
    item["values"] = io::values_to_json(g[j].values());
    fs.push_back(std::move(item));
    for (std::size_t i = 0; i < g[j].values().size(); ++i)
      r.row("g" + std::to_string(j) + " " + set_text(fan->maximal_cones()[i]), g[j].value(i).to_string());
  }
  r.json["functions"] = std::move(fs);
  return r;
}

int descend_cmd(const Options& o, Loader& loader, std::ostream& out, bool text) {
  require(o.subdivision_path, "--subdivision");
  SubdivisionMap s = io::subdivision_from_json(io::read_file(o.subdivision_path));
  PExpFun g = load_function(o, loader, s.fine);
  Report r;
  try {
    PExpFun f = descend(g, s);
    r.json["descendable"] = true;
    r.json["function"] = io::to_json(f);
    r.row("descendable", "yes");
    for (std::size_t i = 0; i < f.values().size(); ++i)
      r.row("cone " + set_text(s.coarse->maximal_cones()[i]), f.value(i).to_string());
    print(r, text, out);
    return kOk;
  } catch (const NotDescendable& e) {
    r.json["descendable"] = false;
    r.json["coarse_cone"] = io::to_json(s.coarse->maximal_cones()[e.coarse_cone]);
    r.json["fine_cones"] = Json::array(
        {io::to_json(s.fine->maximal_cones()[e.fine_a]), io::to_json(s.fine->maximal_cones()[e.fine_b])});
    r.json["values"] = Json::array({io::to_json(e.value_a), io::to_json(e.value_b)});
    r.row("descendable", "no");
    r.row("coarse cone", set_text(s.coarse->maximal_cones()[e.coarse_cone]));
    r.row("fine " + set_text(s.fine->maximal_cones()[e.fine_a]), e.value_a.to_string());
    r.row("fine " + set_text(s.fine->maximal_cones()[e.fine_b]), e.value_b.to_string());
    print(r, text, out);
    return kNegative;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Integral piecewise exponential functions on fans"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  };
  auto add_fan = [&o](CLI::App* sub) { sub->add_option("--fan", o.fan_path, "Fan JSON file"); };
  auto add_pexp = [&o](CLI::App* sub) { sub->add_option("--pexp", o.pexp_path, "Piecewise exponential function JSON"); };
  auto add_basis = [&o](CLI::App* sub) { sub->add_option("--basis", o.basis_path, "List of functions JSON"); };
  auto add_localization = [&o](CLI::App* sub) {
    sub->add_option("--epsilon", o.epsilon, "Tangent weight sign convention")->check(CLI::IsMember({1, -1}));
    sub->add_option("--seed", o.seed, "Randomize the resolution");
  };

  CLI::App* validate = app.add_subcommand("validate-fan", "Check a fan and report its cones");
  add_fan(validate);
  CLI::App* res = app.add_subcommand("resolve", "Resolve singularities by stellar subdivision");
  add_fan(res);
  res->add_option("--seed", o.seed, "Randomize the subdivision order");
  CLI::App* gkm = app.add_subcommand("gkm-check", "Check face compatibility of cone values");
  add_fan(gkm);
  add_pexp(gkm);
  CLI::App* rst = app.add_subcommand("restrict", "Value of a function on a cone");
  add_fan(rst);
  add_pexp(rst);
  rst->add_option("--cone", o.cone, "Cone as a JSON array of ray indices");
  CLI::App* chi_sub = app.add_subcommand("chi", "Equivariant Euler characteristic");
  add_fan(chi_sub);
  add_pexp(chi_sub);
  add_localization(chi_sub);
  CLI::App* pair = app.add_subcommand("pair", "Pairing with the structure sheaf of an orbit closure");
  add_fan(pair);
  add_pexp(pair);
  pair->add_option("--cone", o.cone, "Cone as a JSON array of ray indices");
  add_localization(pair);
  CLI::App* gram = app.add_subcommand("gram", "Matrix of pairings");
  add_fan(gram);
  add_basis(gram);
  gram->add_option("--cones", o.cones, "JSON array of cones");
  add_localization(gram);
  CLI::App* dec = app.add_subcommand("decompose", "Coefficients of a function in a basis");
  add_fan(dec);
  add_pexp(dec);
  add_basis(dec);
  CLI::App* dual = app.add_subcommand("dual-basis", "Functions dual to a list of orbit closures");
  add_fan(dual);
  add_basis(dual);
  dual->add_option("--cones", o.cones, "JSON array of cones");
  add_localization(dual);
  CLI::App* desc = app.add_subcommand("descend", "Push a function down a subdivision");
  add_pexp(desc);
  desc->add_option("--subdivision", o.subdivision_path, "Subdivision JSON file");
  for (CLI::App* sub : app.get_subcommands({})) add_common(sub);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kStructural;
  }

  const bool text = o.format == "text";
  Loader loader;
  try {
    if (gkm->parsed()) return gkm_check(o, loader, out, text);
    if (desc->parsed()) return descend_cmd(o, loader, out, text);
    Report r;
    if (validate->parsed()) r = validate_fan(o, loader);
    else if (res->parsed()) r = resolve_fan(o, loader);
    else if (rst->parsed()) r = restrict_cmd(o, loader);
    else if (chi_sub->parsed()) r = chi_cmd(o, loader);
    else if (pair->parsed()) r = pair_cmd(o, loader);
    else if (gram->parsed()) r = gram_cmd(o, loader);
    else if (dec->parsed()) r = decompose_cmd(o, loader);
    else if (dual->parsed()) r = dual_basis_cmd(o, loader);
    print(r, text, out);
    return kOk;
  } catch (const Error& e) {
    if (!is_negative(e.kind())) {
      err << "error: " << e.what() << '\n';
      return kStructural;
    }
    Report r;
    r.json["error"] = std::string(to_string(e.kind()));
    r.json["message"] = e.what();
    r.row("error", std::string(to_string(e.kind())));
    r.row("message", e.what());
    print(r, text, out);
    return kNegative;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kStructural;
  }
}

}  // namespace pexp::cli
