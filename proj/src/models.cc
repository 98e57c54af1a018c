#include "sectionview/models.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sectionview/errors.h"

namespace sectionview {

namespace {

// A predictor value resolved against its fit-time type.
struct Encoded {
  double number = 0;
  std::int32_t code = 0;
};

Encoded encode_value(const std::string& var, const PredictorInfo& info,
                     const Row& row) {
  auto it = row.find(var);
  if (it == row.end()) {
    throw ValidationError("row does not assign predictor '" + var + "'");
  }
  Encoded e;
  if (info.kind == ColumnKind::kContinuous) {
    const auto* x = std::get_if<double>(&it->second);
    if (x == nullptr || !std::isfinite(*x)) {
      throw ValidationError("predictor '" + var + "' needs a finite number");
    }
    e.number = *x;
    return e;
  }
  const auto* label = std::get_if<std::string>(&it->second);
  if (label != nullptr) {
    auto pos = std::find(info.levels.begin(), info.levels.end(), *label);
    if (pos != info.levels.end()) {
      e.code = static_cast<std::int32_t>(pos - info.levels.begin());
      return e;
    }
  }
  throw ValidationError("unknown level '" + format_value(it->second) +
                        "' for predictor '" + var + "'");
}

PredictorInfo info_of(const Column& c) {
  return PredictorInfo{c.kind(), c.levels()};
}

// Design columns contributed by a single variable.
std::vector<double> var_columns(const PredictorInfo& info, const Encoded& e) {
  if (info.kind == ColumnKind::kContinuous) return {e.number};
  std::vector<double> out(info.levels.empty() ? 0 : info.levels.size() - 1, 0.0);
  if (e.code > 0) out[static_cast<std::size_t>(e.code - 1)] = 1.0;
  return out;
}

std::vector<std::string> var_column_names(const std::string& var,
                                          const PredictorInfo& info) {
  if (info.kind == ColumnKind::kContinuous) return {var};
  std::vector<std::string> out;
  for (std::size_t l = 1; l < info.levels.size(); ++l) {
    out.push_back(var + "[" + info.levels[l] + "]");
  }
  return out;
}

}  // namespace

// --- LinearModel -------------------------------------------------------------

std::vector<double> LinearModel::design_row(const Row& row) const {
  std::map<std::string_view, Encoded> enc;
  for (const auto& p : predictors_) {
    enc.emplace(p, encode_value(p, info_.find(p)->second, row));
  }
  std::vector<double> out;
  out.reserve(names_.size());
  for (const auto& t : formula_.terms) {
    if (const auto* m = std::get_if<MainTerm>(&t)) {
      const auto cols = var_columns(info_.find(m->var)->second, enc.at(m->var));
      out.insert(out.end(), cols.begin(), cols.end());
    } else if (const auto* i = std::get_if<InteractionTerm>(&t)) {
      const auto a = var_columns(info_.find(i->a)->second, enc.at(i->a));
      const auto b = var_columns(info_.find(i->b)->second, enc.at(i->b));
      for (double x : a) {
        for (double y : b) out.push_back(x * y);
      }
    } else {
      const auto& p = std::get<PowerTerm>(t);
      out.push_back(std::pow(enc.at(p.var).number, p.exponent));
    }
  }
  return out;
}

std::vector<Prediction> LinearModel::predict(std::span<const Row> rows) const {
  std::vector<Prediction> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const auto x = design_row(row);
    double y = coefficients_[0];
    for (std::size_t j = 0; j < x.size(); ++j) y += coefficients_[j + 1] * x[j];
    out.push_back(Prediction{y, std::nullopt});
  }
  return out;
}

double LinearModel::coefficient(std::string_view name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return coefficients_[j];
  }
  throw UnknownVariable(std::string(name));
}

LinearModel fit_linear(const Dataset& d, const FormulaSpec& f) {
  const FormulaSpec formula = expand_dot(f, d);
  if (formula.terms.empty()) throw FitError("formula has no terms");
  const Column& response = d.column(formula.response);
  if (!response.is_continuous()) {
    throw TypeError("linear model response '" + formula.response +
                    "' must be continuous");
  }

  LinearModel m;
  m.formula_ = formula;
  m.predictors_ = formula.predictors();
  m.response_ = ResponseInfo{formula.response, ResponseType::kNumeric, {}};
  for (const auto& p : m.predictors_) m.info_.emplace(p, info_of(d.column(p)));

  m.names_ = {"(Intercept)"};
  for (const auto& t : formula.terms) {
    if (const auto* mt = std::get_if<MainTerm>(&t)) {
      for (auto& n : var_column_names(mt->var, m.info_.at(mt->var))) {
        m.names_.push_back(std::move(n));
      }
    } else if (const auto* it = std::get_if<InteractionTerm>(&t)) {
      for (const auto& a : var_column_names(it->a, m.info_.at(it->a))) {
        for (const auto& b : var_column_names(it->b, m.info_.at(it->b))) {
          m.names_.push_back(a + ":" + b);
        }
      }
    } else {
      const auto& pt = std::get<PowerTerm>(t);
      if (m.info_.at(pt.var).kind != ColumnKind::kContinuous) {
        throw TypeError("power of categorical variable '" + pt.var + "'");
      }
      m.names_.push_back(render(t));
    }
  }

  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    bool complete = !response.is_missing(i);
    for (const auto& p : m.predictors_) {
      complete = complete && !d.column(p).is_missing(i);
    }
    if (complete) used.push_back(i);
  }

  const auto n = static_cast<Eigen::Index>(used.size());
  const auto cols = static_cast<Eigen::Index>(m.names_.size());
  Eigen::MatrixXd X(n, cols);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t i = used[static_cast<std::size_t>(r)];
    Row row;
    for (const auto& p : m.predictors_) row.emplace(p, *d.column(p).value(i));
    const auto x = m.design_row(row);
    X(r, 0) = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      X(r, static_cast<Eigen::Index>(j + 1)) = x[j];
    }
    y(r) = response.number(i);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) {
    std::vector<std::string> collinear;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < cols; ++j) {
      collinear.push_back(m.names_[static_cast<std::size_t>(perm(j))]);
    }
    std::string list;
    for (const auto& c : collinear) list += (list.empty() ? "" : ", ") + c;
    throw FitError("design matrix is rank deficient (" +
                       std::to_string(qr.rank()) + " of " +
                       std::to_string(cols) + " columns from " +
                       std::to_string(n) + " rows); collinear: " + list,
                   std::move(collinear));
  }
  const Eigen::VectorXd beta = qr.solve(y);
  m.coefficients_.assign(beta.data(), beta.data() + beta.size());
  return m;
}

// --- KnnModel ----------------------------------------------------------------

ConditionCoords KnnModel::encode(const Row& row) const {
  ConditionCoords out(predictors_.size());
  for (std::size_t j = 0; j < predictors_.size(); ++j) {
    const auto e = encode_value(predictors_[j], info_[j], row);
    out[j] = info_[j].kind == ColumnKind::kContinuous
                 ? scales_[j].standardize(e.number)
                 : static_cast<double>(e.code);
  }
  return out;
}

std::vector<Prediction> KnnModel::predict(std::span<const Row> rows) const {
  const std::size_t p = predictors_.size();
  const std::size_t n = targets_.size();
  std::vector<Prediction> out;
  out.reserve(rows.size());
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (const auto& row : rows) {
    const auto query = encode(row);
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = {metric_.between(query, std::span(coords_).subspan(i * p, p)), i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_),
                      dist.end());
    if (task_ == KnnTask::kRegression) {
      double sum = 0;
      for (std::size_t r = 0; r < k_; ++r) sum += targets_[dist[r].second];
      out.push_back(Prediction{sum / static_cast<double>(k_), std::nullopt});
      continue;
    }
    std::vector<std::size_t> votes(response_.levels.size(), 0);
    for (std::size_t r = 0; r < k_; ++r) {
      ++votes[static_cast<std::size_t>(targets_[dist[r].second])];
    }
    // max_element returns the first maximum, i.e. the lowest level index.
    const auto best = static_cast<std::size_t>(
        std::max_element(votes.begin(), votes.end()) - votes.begin());
    ClassProbabilities probs;
    for (std::size_t l = 0; l < votes.size(); ++l) {
      probs[response_.levels[l]] =
          static_cast<double>(votes[l]) / static_cast<double>(k_);
    }
    out.push_back(Prediction{response_.levels[best], std::move(probs)});
  }
  return out;
}

KnnModel fit_knn(const Dataset& d, const std::string& response,
                 const std::vector<std::string>& predictors, std::size_t k) {
  if (predictors.empty()) throw FitError("k-NN needs at least one predictor");
  if (k == 0) throw FitError("k must be positive");
  const Column& resp = d.column(response);
  std::vector<ColumnKind> kinds;
  for (const auto& p : predictors) {
    if (p == response) {
      throw ValidationError("response '" + p + "' used as a predictor");
    }
    kinds.push_back(d.column(p).kind());
  }
  for (std::size_t a = 0; a < predictors.size(); ++a) {
    for (std::size_t b = a + 1; b < predictors.size(); ++b) {
      if (predictors[a] == predictors[b]) {
        throw ValidationError("predictor '" + predictors[a] + "' listed twice");
      }
    }
  }

  KnnModel m(kinds);
  m.k_ = k;
  m.predictors_ = predictors;
  m.task_ = resp.is_continuous() ? KnnTask::kRegression
                                 : KnnTask::kClassification;
  m.response_ = ResponseInfo{
      response,
      resp.is_continuous() ? ResponseType::kNumeric : ResponseType::kClass,
      resp.levels()};
  const auto stats = standardization_stats(d);
  for (const auto& p : predictors) {
    const Column& c = d.column(p);
    m.info_.push_back(info_of(c));
    m.scales_.push_back(c.is_continuous() ? stats.at(p) : ColumnScale{});
  }

  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (resp.is_missing(i)) continue;
    bool complete = true;
    for (const auto& p : predictors) complete = complete && !d.column(p).is_missing(i);
    if (!complete) continue;
    for (std::size_t j = 0; j < predictors.size(); ++j) {
      const Column& c = d.column(predictors[j]);
      m.coords_.push_back(c.is_continuous()
                              ? m.scales_[j].standardize(c.number(i))
                              : static_cast<double>(c.code(i)));
    }
    m.targets_.push_back(resp.is_continuous() ? resp.number(i)
                                              : static_cast<double>(resp.code(i)));
  }
  if (k > m.targets_.size()) {
    throw FitError("k = " + std::to_string(k) + " exceeds the " +
                   std::to_string(m.targets_.size()) + " usable training rows");
  }
  return m;
}

}  // namespace sectionview
