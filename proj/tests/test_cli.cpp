#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hormander/cli.hpp"
#include "hormander/io.hpp"
#include "support.hpp"

using namespace hormander;
using hormander::io::Json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

const char* kRotationPi3 = R"({"v": 1, "n": 1,
  "A": [[0.5]], "B": [[-0.8660254037844386]], "C": [[0.8660254037844386]], "D": [[0.5]]})";

ErrorCode code_of(std::string_view text) {
  try {
    io::parse_blocks(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::NonFinite;
}

}  // namespace

TEST_CASE("blocks round trip") {
  const Blocks b = random_return_map(3, 2, 0.5);
  const Json j = io::blocks_to_json(b);
  const Blocks back = io::parse_blocks(j.dump());
  CHECK(back.assemble() == b.assemble());

  Json phi_doc{{"n", 3}, {"Phi", io::matrix_to_json(b.assemble())}};
  CHECK(io::parse_blocks(phi_doc.dump()).assemble() == b.assemble());
}

TEST_CASE("blocks parsing errors") {
  CHECK(code_of("{") == ErrorCode::MalformedInput);
  CHECK(code_of("[1, 2]") == ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n": 1, "A": [[1]], "B": [[0]], "C": [[0]]})") == ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n": 1, "A": [[1]], "B": [[0]], "C": [[0]], "D": [[1]], "E": 1})") ==
        ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n": 0})") == ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n": 1, "A": [[1]], "B": [[0]], "C": [["x"]], "D": [[1]]})") ==
        ErrorCode::MalformedInput);
  CHECK(code_of(R"({"n": 1, "A": [[2]], "B": [[0]], "C": [[0]], "D": [[1]]})") ==
        ErrorCode::InvalidBlocks);

  try {
    io::parse_blocks("{\n  \"n\": 1,\n  \"A\": [[1]] oops\n}");
    FAIL("expected MalformedInput");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    io::parse_blocks(R"({"n": 2, "A": [[1, 0], [0]], "B": [[0, 0], [0, 0]],
                         "C": [[0, 0], [0, 0]], "D": [[1, 0], [0, 1]]})");
    FAIL("expected MalformedInput");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("'A'") != std::string::npos);
    CHECK(msg.find("row 2") != std::string::npos);
  }
}

TEST_CASE("half-integers are emitted in doubled form") {
  CHECK(io::to_json(HalfInteger::from_doubled(-3)).dump() == R"({"doubled":-3})");
  CHECK(io::half_integer_from_json(Json::parse(R"({"doubled": 5})")).doubled == 5);
  CHECK_THROWS_AS(io::half_integer_from_json(Json(0.5)), Error);
}

TEST_CASE("index subcommand on the rotation by pi/3") {
  const Run r = run({"index", "--k-max", "4", "--method", "formula"}, kRotationPi3);
  REQUIRE(r.code == kExitOk);
  const Json doc = Json::parse(r.out);
  CHECK(doc["v"] == 1);
  CHECK(doc["command"] == "index");
  const Json& res = doc["results"];
  REQUIRE(res.size() == 4);
  CHECK(res[0]["s"]["doubled"] == 1);
  CHECK(res[1]["s"]["doubled"] == 1);
  CHECK(res[2]["error"]["code"] == "IterateDegenerate");
  CHECK(res[2]["nondegenerate"] == true);
  CHECK(res[3]["s"]["doubled"] == -1);
  for (const auto& e : res) {
    if (e.contains("s")) CHECK(e["s"].size() == 1);
  }
}

TEST_CASE("index subcommand runs every method") {
  const Run r = run({"index", "--k-max", "2", "--method", "all"}, kRotationPi3);
  REQUIRE(r.code == kExitOk);
  const Json doc = Json::parse(r.out);
  CHECK(doc["results"].size() == 6);
  for (const auto& e : doc["results"]) CHECK(e["s"]["doubled"] == 1);
}

TEST_CASE("input errors exit with status 1") {
  Run r = run({"index"}, "{ not json");
  CHECK(r.code == kExitInputError);
  CHECK(Json::parse(r.out)["error"]["code"] == "MalformedInput");
  CHECK(r.err.find("error:") != std::string::npos);

  CHECK(run({"index", "/nonexistent/blocks.json"}).code == kExitInputError);
  CHECK(run({"frobnicate"}).code == kExitInputError);
  CHECK(run({"cheb", "--k", "2", "--k-max", "3"}).code == kExitInputError);
  CHECK(run({"verify", "--methods", "guess"}).code == kExitInputError);
}

TEST_CASE("cheb subcommand") {
  const Run r = run({"cheb", "--k", "2", "--points", "3"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("# hormander cheb v=1", 0) == 0);
  std::getline(lines, line);
  CHECK(line == "k,x,T,U");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "2,-1,1,3");
  CHECK(rows[1] == "2,0,-1,-1");
  CHECK(rows[2] == "2,1,1,3");
}

TEST_CASE("cheb default grid") {
  const Run r = run({"cheb", "--k", "2"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    int k = 0;
    double x = 0, t = 0, u = 0;
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &k, &x, &t, &u) == 4);
    CHECK(k == 2);
    CHECK(t == doctest::Approx(2 * x * x - 1));
    CHECK(u == doctest::Approx(4 * x * x - 1));
    ++rows;
  }
  CHECK(rows == 21);
}

TEST_CASE("verify is deterministic and agrees") {
  const std::vector<std::string> args = {"verify", "--n", "2", "--trials", "100", "--seed", "7"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  const Json doc = Json::parse(a.out);
  CHECK(doc["disagreements"].empty());
  CHECK(doc["agreements"] == doc["checks"]);
  CHECK(doc["agreements"].get<int>() > 0);

  std::vector<std::string> threaded = args;
  threaded.insert(threaded.end(), {"--threads", "2"});
  CHECK(run(threaded).out == a.out);
}

TEST_CASE("orbit subcommand on the oscillator") {
  const Run r = run({"orbit", "--system", "oscillator:1:1.4142135623730951", "--seed-point",
                     "[1, 0, 0, 0]", "--k-max", "2", "--methods", "formula"});
  REQUIRE(r.code == kExitOk);
  const Json doc = Json::parse(r.out);
  CHECK(doc["orbit"]["residual"].get<double>() <= 1e-10);
  CHECK(doc["blocks"]["n"] == 1);
  CHECK(doc["indices"].size() == 2);

  CHECK(run({"orbit", "--system", "pendulum"}).code == kExitInputError);
  CHECK(run({"orbit", "--system", "oscillator:1:1.4142135623730951", "--seed-point", "[1, 1, 0, 0]"})
            .code == kExitInputError);
}

TEST_CASE("output file option") {
  const std::string path = "cli_test_output.json";
  const Run r = run({"index", "--method", "formula", "--k-max", "1", "-o", path}, kRotationPi3);
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream f(path);
  const Json doc = Json::parse(f);
  CHECK(doc["results"][0]["s"]["doubled"] == 1);
  std::remove(path.c_str());
}
