#include <doctest.h>

#include <json.hpp>

#include <sstream>

#include "sectionview/cli.h"
#include "sectionview/formula.h"
#include "sectionview/snapshot.h"
#include "support.h"

using namespace sectionview;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sectionview");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string cars_csv() {
  static const std::string path = [] {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> u(0, 1);
    std::string text = "mpg,wt,hp,am\n";
    char buf[128];
    for (int i = 0; i < 40; ++i) {
      const double wt = 1.5 + 4 * u(rng);
      const double hp = 50 + 250 * u(rng);
      const int am = u(rng) < 0.4 ? 1 : 0;
      const double mpg = 37 - 3.5 * wt - 0.03 * hp + 2 * am + u(rng);
      std::snprintf(buf, sizeof buf, "%.6f,%.4f,%.1f,%d\n", mpg, wt, hp, am);
      text += buf;
    }
    return support::write_temp("cars.csv", text);
  }();
  return path;
}

}  // namespace

TEST_CASE("model flag grammar") {
  auto f = parse_model_flag("lm:mpg ~ wt + hp");
  CHECK(f.kind == "lm");
  CHECK(f.formula == "mpg ~ wt + hp");
  CHECK(f.options.empty());

  f = parse_model_flag("knn:fev ~ .; k=5");
  CHECK(f.kind == "knn");
  CHECK(f.formula == "fev ~ .");
  CHECK(f.options.at("k") == "5");

  f = parse_model_flag("ext:name=svm;url=http://localhost:9000/predict");
  CHECK(f.kind == "ext");
  CHECK(f.options.at("name") == "svm");
  CHECK(f.options.at("url") == "http://localhost:9000/predict");

  CHECK_THROWS_AS(parse_model_flag("mpg ~ wt"), UsageError);
  CHECK_THROWS_AS(parse_model_flag("lm:"), UsageError);
  CHECK_THROWS_AS(parse_model_flag("knn:y ~ x; k"), UsageError);
  CHECK_THROWS_AS(parse_model_flag("knn:y ~ x; k=1; k=2"), UsageError);
}

TEST_CASE("building models from flags") {
  const Dataset d = load_csv_file(cars_csv());
  const auto models = build_models(d, {"lm:mpg ~ wt + hp", "knn:mpg ~ .; k=3", "lm:mpg ~ wt",
                                       "ext:name=svm;url=http://localhost:9000/predict"});
  REQUIRE(models.size() == 4);
  CHECK(models[0].name == "lm");
  CHECK(models[1].name == "knn");
  CHECK(models[1].model->predictors() == std::vector<std::string>{"wt", "hp", "am"});
  CHECK(static_cast<const KnnModel&>(*models[1].model).k() == 3);
  CHECK(models[2].name == "lm_2");
  CHECK(models[3].name == "svm");
  CHECK(models[3].model->kind() == "ext");
  CHECK(models[3].model->response().name == "mpg");
  CHECK(models[3].model->predictors() == std::vector<std::string>{"wt", "hp", "am"});

  CHECK_THROWS_AS(build_models(d, {"svm:mpg ~ wt"}), UsageError);
  CHECK_THROWS_AS(build_models(d, {"knn:mpg ~ wt*hp"}), UsageError);
  CHECK_THROWS_AS(build_models(d, {"knn:mpg ~ wt; k=zero"}), UsageError);
  CHECK_THROWS_AS(build_models(d, {"lm:mpg ~ wt; k=3"}), UsageError);
  CHECK_THROWS_AS(build_models(d, {"lm:mpg ~ wt; name=a", "lm:mpg ~ hp; name=a"}), UsageError);
  CHECK_THROWS_AS(build_models(d, {"ext:name=e"}), UsageError);
  CHECK_THROWS_AS(build_models(d, {"lm:mpg ~ nope"}), UnknownVariable);
}

TEST_CASE("condition parsing") {
  const Dataset d = load_csv_file(cars_csv());
  const auto p = parse_condition(d, "wt=3.2, am=1");
  CHECK(std::get<double>(p.at("wt")) == 3.2);
  CHECK(std::get<std::string>(p.at("am")) == "1");
  CHECK(parse_condition(d, "").empty());
  CHECK_THROWS_AS(parse_condition(d, "wt"), UsageError);
  CHECK_THROWS_AS(parse_condition(d, "zz=1"), UsageError);
  CHECK_THROWS_AS(parse_condition(d, "wt=heavy"), UsageError);
  CHECK_THROWS_AS(parse_condition(d, "am=2"), UsageError);
  CHECK_THROWS_AS(parse_condition(d, "wt=1,wt=2"), UsageError);
}

TEST_CASE("section command writes a snapshot") {
  const auto out = (support::temp_dir() / "s.json").string();
  const auto r = run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt + hp",
                      "--section", "hp", "--at", "wt=3.2", "--out", out});
  CHECK(r.code == kExitOk);
  CHECK(r.err.empty());
  const auto snap = snapshot_import(support::read_file(out));
  CHECK(snap.result.grid.points.size() == 41);
  CHECK(snap.meta.dataset == "cars.csv");
  CHECK(std::get<double>(snap.result.spec.condition.at("wt")) == 3.2);
}

TEST_CASE("distance flags reach the snapshot") {
  const auto r = run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt + hp + am",
                      "--section", "hp", "--at", "wt=3.2,am=0", "--sigma", "0.5", "--norm",
                      "maxnorm", "--lambda", "1", "--resolution", "11"});
  REQUIRE(r.code == kExitOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["spec"]["distance"]["sigma"] == 0.5);
  CHECK(doc["spec"]["distance"]["norm"] == "maxnorm");
  CHECK(doc["spec"]["distance"]["lambda"] == 1.0);
  CHECK(doc["grid"]["points"].size() == 11);

  const auto fe = run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt + hp + am",
                       "--section", "hp", "--at", "wt=3.2,am=0", "--factor-exact"});
  REQUIRE(fe.code == kExitOk);
  CHECK(json::parse(fe.out)["spec"]["distance"]["sigma"].is_null());
}

TEST_CASE("usage errors exit with 2") {
  const auto missing = run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt + hp",
                            "--section", "hp"});
  CHECK(missing.code == kExitUsage);
  CHECK(missing.err.find("wt") != std::string::npos);

  CHECK(run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt + hp", "--section",
             "hp", "--at", "wt=3,am=1"})
            .code == kExitUsage);
  CHECK(run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt +", "--section", "wt"})
            .code == kExitUsage);
  CHECK(run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt", "--section", "hp"})
            .code == kExitUsage);
  CHECK(run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt", "--section", "wt",
             "--norm", "l1"})
            .code == kExitUsage);
  CHECK(run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt", "--section", "wt",
             "--sigma", "1", "--factor-exact"})
            .code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("runtime errors exit with 1") {
  const auto r = run({"section", "--data", "/nonexistent.csv", "--model", "lm:y ~ x",
                      "--section", "x"});
  CHECK(r.code == kExitRuntime);
  CHECK_FALSE(r.err.empty());
  const auto bad_dir = run({"section", "--data", cars_csv(), "--model", "lm:mpg ~ wt",
                            "--section", "wt", "--out", "/nonexistent/dir/s.json"});
  CHECK(bad_dir.code == kExitRuntime);
}

TEST_CASE("layout command") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  std::string text = "a,b,c,y\n";
  char buf[128];
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng);
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", a, a + 0.01 * u(rng), u(rng), u(rng));
    text += buf;
  }
  const auto csv = support::write_temp("diag.csv", text);

  const auto paired = run({"layout", "--data", csv, "--vars", "a,b,c"});
  REQUIRE(paired.code == kExitOk);
  CHECK(paired.out.find("selectors: 2\n  scatter a,b\n  histogram c\n") == 0);
  CHECK(paired.out.find("pairs: 3\n  a,b ratio=0.0") != std::string::npos);

  const auto ordered = run({"layout", "--data", csv, "--vars", "a,b,c", "--order", "c,a,b"});
  REQUIRE(ordered.code == kExitOk);
  CHECK(ordered.out == "selectors: 3\n  histogram c\n  histogram a\n  histogram b\n");

  const auto empty = run({"layout", "--data", csv, "--vars", ""});
  CHECK(empty.code == kExitOk);
  CHECK(empty.out == "selectors: 0\n");

  const auto from_model = run({"layout", "--data", csv, "--model", "lm:y ~ a + c",
                               "--section", "c"});
  REQUIRE(from_model.code == kExitOk);
  CHECK(from_model.out == "selectors: 1\n  histogram a\n");

  CHECK(run({"layout", "--data", csv, "--vars", "a,zz"}).code == kExitRuntime);
}
