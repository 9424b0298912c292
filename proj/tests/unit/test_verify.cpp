#include "doctest.h"

#include "json.hpp"
#include "verify.hpp"
#include "weilbc/error.hpp"

using namespace weilbc;
using namespace weilbc::verify;

TEST_CASE("pair parsing") {
  CHECK(parse_pair("2:1") == std::pair{2, 1});
  CHECK_THROWS_AS(parse_pair("2"), ConfigInvalid);
  CHECK_THROWS_AS(parse_pair("2:x"), ConfigInvalid);
  CHECK_THROWS_AS(parse_pair("2:1:"), ConfigInvalid);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.p = 9;
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = RunConfig{};
  c.psi_scale = 6;
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = RunConfig{};
  c.pairs = {{2, 1}};  // i must be prime to m
  CHECK_THROWS(c.validate());
}

TEST_CASE("errors are reported, not swallowed") {
  RunConfig c;
  c.p = 4;
  const Report r = run_check("star", c);
  CHECK_FALSE(r.ok());
  CHECK(r.fail == 1);
  CHECK(r.error.rfind("ConfigInvalid", 0) == 0);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["error"].get<std::string>() == r.error);
}

TEST_CASE("report tallies and formats") {
  RunConfig c;
  c.sample = 20;
  const Report r = run_check("star", c);
  REQUIRE(r.ok());
  CHECK(r.pass == 20);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["cases"].size() == 20);
  CHECK(j["summary"]["pass"] == 20);
  CHECK(j["config"]["sample"] == 20);
  const std::string tsv = r.to_tsv();
  CHECK(tsv.rfind("check\tinput\tlhs\trhs\tequal\n", 0) == 0);
  CHECK(tsv.find("# pass=20 fail=0") != std::string::npos);
}

TEST_CASE("all runs the applicable checks") {
  RunConfig c;
  c.sample = 5;
  const Report r = run_check("all", c);
  CHECK(r.ok());
  bool saw_parabolic = false, saw_orthogonal = false;
  for (const auto& k : r.cases) {
    saw_parabolic = saw_parabolic || k.input.rfind("[parabolic]", 0) == 0;
    saw_orthogonal = saw_orthogonal || k.input.rfind("[orthogonal]", 0) == 0;
  }
  CHECK(saw_parabolic);
  CHECK_FALSE(saw_orthogonal);
}
