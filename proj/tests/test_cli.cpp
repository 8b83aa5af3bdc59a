#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "corpus.hpp"
#include "pexp/cli.hpp"
#include "pexp/io.hpp"

using namespace pexp;
using io::Json;

namespace {

const std::string kData = PEXP_TEST_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "pexp_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("validate-fan") {
  Result r = run({"validate-fan", "--fan", kData + "/p112.json"});
  REQUIRE(r.code == cli::kOk);
  Json j = io::parse(r.out);
  CHECK(j["complete"] == true);
  CHECK(j["smooth"] == false);
  CHECK(j["max_cones"][1]["multiplicity"] == 2);
  Result t = run({"validate-fan", "--fan", kData + "/p112.json", "--format", "text"});
  CHECK(t.out.find("cone {0,2}  dim 2, multiplicity 2") != std::string::npos);

  const std::string bad = write("bad_fan.json", R"({"rank": 2, "rays": [[1, 0], [-1, 0]], "max_cones": [[0, 1]]})");
  Result b = run({"validate-fan", "--fan", bad});
  CHECK(b.code == cli::kStructural);
  CHECK(b.err.find("NotStronglyConvex") != std::string::npos);
  CHECK(b.out.empty());
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kStructural);
  CHECK(run({"frobnicate"}).code == cli::kStructural);
  CHECK(run({"chi", "--pexp", kData + "/xi.json", "--epsilon", "3"}).code == cli::kStructural);
  CHECK(run({"chi"}).code == cli::kStructural);
  CHECK(run({"chi", "--pexp", kData + "/missing.json"}).code == cli::kStructural);
  CHECK(run({"restrict", "--pexp", kData + "/xi.json", "--cone", "[0,1,2]"}).code == cli::kStructural);
  CHECK(run({"restrict", "--pexp", kData + "/xi.json", "--cone", "[0,"}).code == cli::kStructural);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"chi", "--pexp", kData + "/xi.json", "--fan", kData + "/p112.json"}).code == cli::kOk);
  const std::string p2 = write("p2.json", io::dump(io::to_json(*corpus::p2())));
  Result mismatch = run({"chi", "--pexp", kData + "/xi.json", "--fan", p2});
  CHECK(mismatch.code == cli::kStructural);
  CHECK(mismatch.err.find("FanMismatch") != std::string::npos);
}

TEST_CASE("the P(1,1,2) example through the command line") {
  Result c = run({"chi", "--pexp", kData + "/xi.json"});
  REQUIRE(c.code == cli::kOk);
  CHECK(io::laurent_from_json(io::parse(c.out)["chi"]).is_zero());

  Result d = run({"decompose", "--pexp", kData + "/xi.json", "--basis", kData + "/duals.json"});
  REQUIRE(d.code == cli::kOk);
  corpus::P112Example ex;
  CHECK(io::values_from_json(io::parse(d.out)["coefficients"]) == ex.coefficients);

  Result r = run({"restrict", "--pexp", kData + "/xi.json", "--cone", "[2]", "--format", "text"});
  CHECK(r.out == "cone   {2}\nvalue  1*e^[0] + 1*e^[1]\n");

  Result g = run({"gram", "--basis", kData + "/duals.json", "--cones", "[[], [2], [0, 2]]"});
  REQUIRE(g.code == cli::kOk);
  std::ifstream golden(kData + "/example_gram.json");
  std::stringstream ss;
  ss << golden.rdbuf();
  CHECK(g.out == ss.str());
}

TEST_CASE("negative outcomes exit with 2") {
  Result v = run({"gkm-check", "--pexp", kData + "/not_gkm.json"});
  CHECK(v.code == cli::kNegative);
  Json j = io::parse(v.out);
  CHECK(j["valid"] == false);
  CHECK(j["violations"][0]["face"] == Json::array({2}));
  CHECK(run({"gkm-check", "--pexp", kData + "/xi.json"}).code == cli::kOk);

  Result nd = run({"dual-basis", "--basis", kData + "/duals.json", "--cones", "[[], [2], [0, 2]]"});
  CHECK(nd.code == cli::kNegative);
  CHECK(io::parse(nd.out)["error"] == "NotIntegral");
}

TEST_CASE("dual basis output round trips through gram") {
  const std::vector<std::string> args = {"dual-basis", "--basis", kData + "/basis_unimodular.json", "--cones",
                                         "[[], [2], [0, 2]]"};
  Result d = run(args);
  REQUIRE(d.code == cli::kOk);
  CHECK(run(args).out == d.out);
  const std::string path = write("dual.json", d.out);
  Result g = run({"gram", "--basis", path, "--cones", "[[], [2], [0, 2]]"});
  REQUIRE(g.code == cli::kOk);
  PairingMatrix m = io::pairing_matrix_from_json(io::parse(g.out));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(m.entries[i][j] == (i == j ? corpus::one(2) : LaurentPoly(2)));
}

TEST_CASE("resolve and descend") {
  Result r = run({"resolve", "--fan", kData + "/p112.json"});
  REQUIRE(r.code == cli::kOk);
  CHECK(run({"resolve", "--fan", kData + "/p112.json"}).out == r.out);
  const std::string sub = write("p112_resolution.json", r.out);
  SubdivisionMap s = io::subdivision_from_json(io::parse(r.out));

  corpus::P112Example ex;
  PExpFun g = pullback(make_pexp(ex.fan, ex.xi), s);
  const std::string fine = write("xi_fine.json", io::dump(io::to_json(g)));
  Result d = run({"descend", "--subdivision", sub, "--pexp", fine});
  REQUIRE(d.code == cli::kOk);
  CHECK(io::pexp_from_json(io::parse(d.out)["function"]) == make_pexp(ex.fan, ex.xi));

  FanPtr a2 = corpus::make(2, {{1, 0}, {0, 1}}, {{0, 1}});
  SubdivisionMap w = stellar_subdivision(a2, {1, 1});
  const std::string wsub = write("witness_sub.json", io::dump(io::to_json(w)));
  PExpFun wf = make_pexp(w.fine, {corpus::one(2) + corpus::e({1, 2}), corpus::one(2) + corpus::e({2, 1})});
  const std::string wfun = write("witness_fun.json", io::dump(io::to_json(wf)));
  Result n = run({"descend", "--subdivision", wsub, "--pexp", wfun});
  CHECK(n.code == cli::kNegative);
  Json nj = io::parse(n.out);
  CHECK(nj["descendable"] == false);
  CHECK(nj["coarse_cone"] == Json::array({0, 1}));
}

TEST_CASE("pair and epsilon") {
  Result p = run({"pair", "--pexp", kData + "/duals.json", "--cone", "[0,2]"});
  CHECK(p.code == cli::kStructural);  // a list is not a single function
  const std::string ox = write("ox.json", R"({"fan": ")" + kData + R"(/p112.json", "values": [
    {"rank": 2, "terms": [{"coeff": 1, "exp": [0, 0]}]},
    {"rank": 2, "terms": [{"coeff": 1, "exp": [0, 0]}]},
    {"rank": 2, "terms": [{"coeff": 1, "exp": [0, 0]}]}]})");
  for (const char* eps : {"1", "-1"}) {
    Result r = run({"pair", "--pexp", ox, "--cone", "[0,2]", "--epsilon", eps, "--format", "text"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "cone     {0,2}\npairing  1*e^[0,0]\n");
  }
}
