#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gibbslab/error.hpp"
#include "gibbslab/pmf.hpp"

namespace gibbslab::cli {

// Malformed family file; field() is a JSON path such as "members[1].p".
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct FamilyFile {
  std::vector<BaseSpec> specs;
  std::size_t repeat = 0;
  double trunc_eps = kDefaultTruncEps;
  std::optional<double> lambda_cap;
};

// {"members":[{"kind":"geometric","p":0.5},{"kind":"weights","w":[1,2,1]}],
//  "repeat":100, "trunc_eps":1e-13, "lambda_cap":1.9}
FamilyFile parse_family(const nlohmann::json& doc);
FamilyFile load_family_file(const std::string& path);

Family build_family(const FamilyFile& file);

nlohmann::ordered_json to_json(const FamilyFile& file);

}  // namespace gibbslab::cli
