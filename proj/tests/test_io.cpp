#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "lamplab/io.hpp"
#include "lamplab/parallel.hpp"

using namespace lamplab;

TEST_CASE("csv header round trip", "[io]") {
  std::stringstream ss;
  json cfg = {{"command", "psi"}, {"seed", 42}, {"phi", 1.5}};
  CsvWriter w(ss, cfg, {"phi", "psi"});
  w.cells(1.5, 2.0);
  w.cells(0.25, 1.0625);

  json back = read_csv_config(ss);
  REQUIRE(back["schema"] == kCsvSchema);
  REQUIRE(back["command"] == "psi");
  REQUIRE(back["seed"] == 42);

  std::string line;
  std::getline(ss, line);
  REQUIRE(line == "phi,psi");
  std::getline(ss, line);
  REQUIRE(line == "1.5,2");
  std::getline(ss, line);
  REQUIRE(line == "0.25,1.0625");
}

TEST_CASE("csv arity is checked", "[io]") {
  std::stringstream ss;
  CsvWriter w(ss, json::object(), {"a", "b"});
  REQUIRE_THROWS_AS(w.row({"1"}), std::invalid_argument);
  REQUIRE_THROWS_AS(w.row({"1", "2", "3"}), std::invalid_argument);
}

TEST_CASE("config line required", "[io]") {
  std::stringstream ss("a,b\n1,2\n");
  REQUIRE_THROWS_AS(read_csv_config(ss), std::runtime_error);
}

TEST_CASE("jsonl lines parse back", "[io]") {
  std::stringstream ss;
  write_jsonl(ss, {{"k", 1}});
  write_jsonl(ss, {{"k", 2}, {"v", "x"}});
  std::string line;
  std::getline(ss, line);
  REQUIRE(json::parse(line)["k"] == 1);
  std::getline(ss, line);
  REQUIRE(json::parse(line)["v"] == "x");
}

TEST_CASE("trial farm is order independent", "[io]") {
  auto f = [](std::int64_t t) { return t * t; };
  auto one = run_trials(40, 1, f);
  auto four = run_trials(40, 4, f);
  REQUIRE(one == four);
  REQUIRE(one.size() == 40);
  REQUIRE(one[7] == 49);
  REQUIRE(run_trials(0, 4, f).empty());
}
