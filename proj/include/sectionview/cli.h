#ifndef SECTIONVIEW_CLI_H_
#define SECTIONVIEW_CLI_H_

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sectionview/dataset.h"
#include "sectionview/distance.h"
#include "sectionview/errors.h"
#include "sectionview/models.h"

namespace sectionview {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error("usage_error", message) {}
};

// `kind:spec[;opt=val]*`, e.g. "lm:mpg ~ wt + hp", "knn:fev ~ .; k=5",
// "ext:name=svm;url=http://localhost:9000/predict".
struct ModelFlag {
  std::string kind;
  std::string formula;  // empty for ext
  std::map<std::string, std::string> options;
};

ModelFlag parse_model_flag(std::string_view text);

// Fits or connects every flagged model. Unnamed models take their kind as
// name, with a numeric suffix when it repeats.
std::vector<NamedModel> build_models(const Dataset& d,
                                     const std::vector<std::string>& flags);

// "a=1.5,g=x" into a condition point typed by the dataset columns.
ConditionPoint parse_condition(const Dataset& d, std::string_view text);

// Entry point of the sectionview tool (subcommands serve, section, layout).
// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sectionview

#endif  // SECTIONVIEW_CLI_H_
