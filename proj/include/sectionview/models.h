#ifndef SECTIONVIEW_MODELS_H_
#define SECTIONVIEW_MODELS_H_

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sectionview/dataset.h"
#include "sectionview/distance.h"
#include "sectionview/formula.h"

namespace sectionview {

enum class ResponseType { kNumeric, kClass };

struct ResponseInfo {
  // Dataset column holding observed responses; empty when unknown.
  std::string name;
  ResponseType type = ResponseType::kNumeric;
  // Class labels, for kClass.
  std::vector<std::string> levels;
  bool operator==(const ResponseInfo&) const = default;
};

using ClassProbabilities = std::map<std::string, double>;

struct Prediction {
  Value value;  // number for numeric responses, label for classes
  std::optional<ClassProbabilities> probabilities;
  bool operator==(const Prediction&) const = default;
};

// A fitted predictive model. Implementations are immutable after
// construction, so `predict` may be called concurrently.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string_view kind() const = 0;
  virtual const std::vector<std::string>& predictors() const = 0;
  virtual const ResponseInfo& response() const = 0;
  // One prediction per row, in row order. Every row must assign each
  // predictor.
  virtual std::vector<Prediction> predict(std::span<const Row> rows) const = 0;
};

using ModelPtr = std::shared_ptr<const Model>;

struct NamedModel {
  std::string name;
  ModelPtr model;
};

// --- Ordinary least squares --------------------------------------------------

// Type and level list of a predictor as seen at fit time.
struct PredictorInfo {
  ColumnKind kind = ColumnKind::kContinuous;
  std::vector<std::string> levels;
};

class LinearModel final : public Model {
 public:
  std::string_view kind() const override { return "lm"; }
  const std::vector<std::string>& predictors() const override {
    return predictors_;
  }
  const ResponseInfo& response() const override { return response_; }
  std::vector<Prediction> predict(std::span<const Row> rows) const override;

  const FormulaSpec& formula() const { return formula_; }
  // "(Intercept)" followed by one entry per design column.
  const std::vector<std::string>& coefficient_names() const { return names_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double coefficient(std::string_view name) const;

  // Design row (without intercept) for a predictor assignment.
  std::vector<double> design_row(const Row& row) const;

 private:
  friend LinearModel fit_linear(const Dataset& d, const FormulaSpec& f);
  LinearModel() = default;

  FormulaSpec formula_;
  std::vector<std::string> predictors_;
  std::map<std::string, PredictorInfo, std::less<>> info_;
  ResponseInfo response_;
  std::vector<std::string> names_;
  std::vector<double> coefficients_;
};

// Dummy coding uses the first level as reference. Rows missing the response
// or any predictor are dropped. Throws TypeError for a categorical response
// or powers of categorical variables, FitError on rank deficiency (naming
// the collinear design columns).
LinearModel fit_linear(const Dataset& d, const FormulaSpec& f);

// --- k nearest neighbours ----------------------------------------------------

enum class KnnTask { kRegression, kClassification };

class KnnModel final : public Model {
 public:
  std::string_view kind() const override { return "knn"; }
  const std::vector<std::string>& predictors() const override {
    return predictors_;
  }
  const ResponseInfo& response() const override { return response_; }
  std::vector<Prediction> predict(std::span<const Row> rows) const override;

  std::size_t k() const { return k_; }
  KnnTask task() const { return task_; }
  std::size_t training_rows() const { return targets_.size(); }

 private:
  friend KnnModel fit_knn(const Dataset& d, const std::string& response,
                          const std::vector<std::string>& predictors,
                          std::size_t k);
  explicit KnnModel(std::vector<ColumnKind> kinds)
      : metric_(std::move(kinds), Norm::kEuclidean, 1.0) {}

  ConditionCoords encode(const Row& row) const;

  std::size_t k_ = 1;
  KnnTask task_ = KnnTask::kRegression;
  std::vector<std::string> predictors_;
  std::vector<PredictorInfo> info_;
  std::vector<ColumnScale> scales_;
  ResponseInfo response_;
  MixedMetric metric_;
  // Row-major training coordinates, predictors_.size() per row.
  std::vector<double> coords_;
  // Response values; level indices for classification.
  std::vector<double> targets_;
};

// Standardization comes from the full dataset at fit time; distances are
// euclidean with unit mismatch weight. Rows missing the response or a
// predictor are dropped. Throws FitError when k is 0 or exceeds the
// remaining rows.
KnnModel fit_knn(const Dataset& d, const std::string& response,
                 const std::vector<std::string>& predictors, std::size_t k);

// --- External model over HTTP ------------------------------------------------

inline constexpr std::chrono::milliseconds kExternalTimeout{10000};

// Client for a model served over the JSON predict protocol:
//   POST {"rows":[{"var":number|string,...},...]}
//   200  {"predictions":[...], "probabilities":[{"level":p,...},...]?}
class ExternalModel final : public Model {
 public:
  // `endpoint` is an http:// URL. Throws ValidationError if it cannot be
  // parsed.
  ExternalModel(std::string endpoint, std::vector<std::string> predictors,
                ResponseInfo response,
                std::chrono::milliseconds timeout = kExternalTimeout);

  std::string_view kind() const override { return "ext"; }
  const std::vector<std::string>& predictors() const override {
    return predictors_;
  }
  const ResponseInfo& response() const override { return response_; }
  // Throws ExternalModelError on transport failure, timeout, non-2xx status
  // or a malformed body.
  std::vector<Prediction> predict(std::span<const Row> rows) const override;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::vector<std::string> predictors_;
  ResponseInfo response_;
  std::chrono::milliseconds timeout_;
};

// Parses a predict-protocol response body for `expected_rows` rows.
// Throws ExternalModelError (with `endpoint` and `status`) on malformed
// content.
std::vector<Prediction> parse_predict_response(const std::string& body,
                                               std::size_t expected_rows,
                                               const ResponseInfo& response,
                                               const std::string& endpoint,
                                               int status);

std::string render_predict_request(std::span<const Row> rows,
                                   const std::vector<std::string>& predictors);

}  // namespace sectionview

#endif  // SECTIONVIEW_MODELS_H_
