#ifndef SECTIONVIEW_TESTS_SUPPORT_H_
#define SECTIONVIEW_TESTS_SUPPORT_H_

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "sectionview/dataset.h"

namespace support {

using sectionview::Column;
using sectionview::Dataset;

// Categorical column from labels; levels sorted, "" marks a missing cell.
inline Column cat(std::string name, const std::vector<std::string>& labels) {
  std::set<std::string> distinct;
  for (const auto& l : labels) {
    if (!l.empty()) distinct.insert(l);
  }
  std::vector<std::string> levels(distinct.begin(), distinct.end());
  std::vector<std::int32_t> codes;
  for (const auto& l : labels) {
    if (l.empty()) {
      codes.push_back(Column::kMissingCode);
    } else {
      codes.push_back(static_cast<std::int32_t>(
          std::lower_bound(levels.begin(), levels.end(), l) - levels.begin()));
    }
  }
  return Column::categorical(std::move(name), std::move(codes), std::move(levels));
}

inline Column cont(std::string name, std::vector<double> values) {
  return Column::continuous(std::move(name), std::move(values));
}

inline std::filesystem::path temp_dir() {
  static const std::filesystem::path dir = [] {
    std::random_device rd;
    auto p = std::filesystem::temp_directory_path() /
             ("sectionview_tests_" + std::to_string(rd()));
    std::filesystem::create_directories(p);
    return p;
  }();
  return dir;
}

inline std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = temp_dir() / name;
  std::ofstream(path, std::ios::binary) << content;
  return path.string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes a dataset as CSV with every double at full precision.
inline std::string to_csv(const Dataset& d) {
  std::string out;
  const auto names = d.names();
  for (std::size_t j = 0; j < names.size(); ++j) out += (j ? "," : "") + names[j];
  out += "\n";
  char buf[64];
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j) out += ",";
      const Column& c = d.columns()[j];
      if (c.is_missing(i)) continue;
      if (c.is_continuous()) {
        std::snprintf(buf, sizeof buf, "%.17g", c.number(i));
        out += buf;
      } else {
        out += c.levels()[static_cast<std::size_t>(c.code(i))];
      }
    }
    out += "\n";
  }
  return out;
}

// The function served by the stub predict endpoint.
inline double stub_function(double x1, double x2) { return 1.0 + 2.0 * x1 - 0.5 * x2; }

// In-process predict-protocol server. /predict answers stub_function of
// x1 and x2; the other routes misbehave in one specific way each.
class StubModelServer {
 public:
  StubModelServer() {
    using nlohmann::json;
    auto rows_of = [](const httplib::Request& req) {
      return json::parse(req.body).at("rows");
    };
    server_.Post("/predict", [this, rows_of](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      json preds = json::array();
      for (const auto& r : rows_of(req)) {
        preds.push_back(stub_function(r.at("x1").get<double>(), r.at("x2").get<double>()));
      }
      res.set_content(json{{"predictions", preds}}.dump(), "application/json");
    });
    server_.Post("/class", [=](const httplib::Request& req, httplib::Response& res) {
      json preds = json::array(), probs = json::array();
      for (const auto& r : rows_of(req)) {
        const double f = stub_function(r.at("x1").get<double>(), r.at("x2").get<double>());
        const double p_hi = 1.0 / (1.0 + std::exp(-f));
        preds.push_back(p_hi >= 0.5 ? "hi" : "lo");
        probs.push_back(json{{"hi", p_hi}, {"lo", 1.0 - p_hi}});
      }
      res.set_content(json{{"predictions", preds}, {"probabilities", probs}}.dump(),
                      "application/json");
    });
    server_.Post("/short", [=](const httplib::Request& req, httplib::Response& res) {
      json preds = json::array();
      const auto rows = rows_of(req);
      for (std::size_t i = 1; i < rows.size(); ++i) preds.push_back(0.0);
      res.set_content(json{{"predictions", preds}}.dump(), "application/json");
    });
    server_.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("this is not json", "application/json");
    });
    server_.Post("/error", [](const httplib::Request&, httplib::Response& res) {
      res.status = 500;
      res.set_content(R"({"message":"model crashed"})", "application/json");
    });
    server_.Post("/badtype", [=](const httplib::Request& req, httplib::Response& res) {
      json preds = json::array();
      for (std::size_t i = 0; i < rows_of(req).size(); ++i) preds.push_back("seven");
      res.set_content(json{{"predictions", preds}}.dump(), "application/json");
    });
    server_.Post("/badprob", [=](const httplib::Request& req, httplib::Response& res) {
      json preds = json::array(), probs = json::array();
      for (std::size_t i = 0; i < rows_of(req).size(); ++i) {
        preds.push_back("hi");
        probs.push_back(json{{"hi", 0.5}, {"lo", 0.4}});
      }
      res.set_content(json{{"predictions", preds}, {"probabilities", probs}}.dump(),
                      "application/json");
    });
    server_.Post("/unknown_level", [=](const httplib::Request& req, httplib::Response& res) {
      json preds = json::array();
      for (std::size_t i = 0; i < rows_of(req).size(); ++i) preds.push_back("zzz");
      res.set_content(json{{"predictions", preds}}.dump(), "application/json");
    });
    server_.Post("/no_predictions", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"preds":[]})", "application/json");
    });
    server_.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(1500));
      res.set_content(R"({"predictions":[]})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubModelServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  int requests() const { return requests_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  std::atomic<int> requests_{0};
};

}  // namespace support

#endif  // SECTIONVIEW_TESTS_SUPPORT_H_
