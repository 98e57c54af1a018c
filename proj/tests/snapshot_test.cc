#include <doctest.h>

#include <json.hpp>

#include "sectionview/errors.h"
#include "sectionview/formula.h"
#include "sectionview/json_io.h"
#include "sectionview/snapshot.h"
#include "support.h"

using namespace sectionview;
using support::cat;
using support::cont;

namespace {

SectionResult sample_result(double sigma = 1.0) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(40), z(40), y(40);
  std::vector<std::string> g(40), c(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x[i] = u(rng) * 3;
    z[i] = u(rng) / 7;
    g[i] = i % 3 ? "a" : "b";
    y[i] = x[i] * 0.1 + z[i] + (g[i] == "b" ? 1.0 / 3 : 0.0) + u(rng) * 1e-3;
    c[i] = x[i] > 1.5 ? "big" : "small";
  }
  const Dataset d({cont("x", x), cont("z", z), cat("g", g), cont("y", y), cat("c", c)});
  auto lm = std::make_shared<LinearModel>(fit_linear(d, parse_formula("y ~ x + z + g")));
  auto knn = std::make_shared<KnnModel>(fit_knn(d, "y", {"x", "z", "g"}, 4));
  SectionSpec spec;
  spec.section_vars = {"x", "g"};
  spec.resolution = 7;
  spec.condition = {{"z", 0.0712}};
  spec.distance.sigma = sigma;
  return evaluate_section({{"lm", lm}, {"knn", knn}}, d, spec);
}

SectionResult class_result() {
  const Dataset d({cont("a", {0, 1, 2, 3, 4, 5}), cont("b", {1, 0, 1, 0, 1, 0}),
                   cat("k", {"u", "u", "u", "v", "v", "v"})});
  auto knn = std::make_shared<KnnModel>(fit_knn(d, "k", {"a", "b"}, 3));
  SectionSpec spec;
  spec.section_vars = {"a", "b"};
  spec.resolution = 3;
  return evaluate_section({{"knn", knn}}, d, spec);
}

}  // namespace

TEST_CASE("canonical dump sorts keys and keeps 17 digits") {
  const Json doc = {{"b", 0.1}, {"a", {{"z", 1}, {"y", 1.0 / 3}}}, {"n", NAN}};
  CHECK(canonical_dump(doc) ==
        R"({"a":{"y":0.33333333333333331,"z":1},"b":0.10000000000000001,"n":null})");
}

TEST_CASE("snapshot layout") {
  const auto r = sample_result();
  const std::string text = snapshot_export(r, {"data.csv", std::nullopt});
  CHECK(text.back() == '\n');
  const auto doc = nlohmann::json::parse(text);
  std::vector<std::string> keys;
  for (const auto& [k, _] : doc.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"grid", "meta", "nearby", "predictions", "spec",
                                         "version"});
  CHECK(doc["version"] == kSnapshotVersion);
  CHECK(doc["meta"]["dataset"] == "data.csv");
  CHECK(doc["meta"]["timestamp"].is_null());
  CHECK(doc["meta"]["body_hash"].get<std::string>().size() == 64);
  CHECK(doc["spec"]["models"] == nlohmann::json::array({"lm", "knn"}));
  CHECK(doc["predictions"]["lm"].size() == r.grid.points.size());
}

TEST_CASE("export is deterministic and round-trips exactly") {
  const auto r = sample_result();
  const std::string a = snapshot_export(r, {"d", std::nullopt});
  CHECK(a == snapshot_export(sample_result(), {"d", std::nullopt}));
  const auto back = snapshot_import(a);
  CHECK(back.result == r);
  CHECK(back.meta == SnapshotMeta{"d", std::nullopt});
  CHECK(snapshot_export(back.result, back.meta) == a);

  const auto c = class_result();
  const auto cs = snapshot_export(c, {"d", std::nullopt});
  CHECK(snapshot_import(cs).result == c);
}

TEST_CASE("timestamp is outside the body hash") {
  const auto r = sample_result();
  const auto a = nlohmann::json::parse(snapshot_export(r, {"d", std::nullopt}));
  const auto b = nlohmann::json::parse(snapshot_export(r, {"d", "2024-01-01T00:00:00Z"}));
  CHECK(a["meta"]["body_hash"] == b["meta"]["body_hash"]);
  CHECK(b["meta"]["timestamp"] == "2024-01-01T00:00:00Z");
  const auto c = nlohmann::json::parse(snapshot_export(r, {"other", std::nullopt}));
  CHECK(a["meta"]["body_hash"] != c["meta"]["body_hash"]);
}

TEST_CASE("empty nearby list") {
  const auto r = sample_result(0.0);
  CHECK(r.nearby.empty());
  const auto text = snapshot_export(r, {"d", std::nullopt});
  CHECK(nlohmann::json::parse(text)["nearby"] == nlohmann::json::array());
  CHECK(snapshot_import(text).result == r);
}

TEST_CASE("tampered or malformed documents are rejected") {
  const auto text = snapshot_export(sample_result(), {"d", std::nullopt});
  auto doc = nlohmann::json::parse(text);
  doc["grid"]["points"][0][0] = 123.0;
  CHECK_THROWS_AS(snapshot_import(doc.dump()), ValidationError);
  CHECK_THROWS_AS(snapshot_import("{"), ValidationError);
  CHECK_THROWS_AS(snapshot_import(R"({"version":1})"), ValidationError);
  auto wrong = nlohmann::json::parse(text);
  wrong["version"] = 2;
  CHECK_THROWS_AS(snapshot_import(wrong.dump()), ValidationError);
}

TEST_CASE("snapshot files") {
  const auto r = sample_result();
  const auto path = (support::temp_dir() / "snap.json").string();
  write_snapshot_file(path, r, {"d", std::nullopt});
  CHECK(support::read_file(path) == snapshot_export(r, {"d", std::nullopt}));
  CHECK_THROWS_AS(write_snapshot_file("/nonexistent/dir/x.json", r, {"d", std::nullopt}), Error);
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
