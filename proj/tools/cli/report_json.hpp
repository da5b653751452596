#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gibbslab/canonical.hpp"
#include "gibbslab/chains.hpp"
#include "gibbslab/dominance.hpp"
#include "gibbslab/gcp.hpp"
#include "gibbslab/pmf.hpp"
#include "gibbslab/sumstats.hpp"

namespace gibbslab::cli {

using ojson = nlohmann::ordered_json;

// Finite values as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
ojson num(double x);

// %.17g; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double x);

// Indented JSON with a trailing newline.
std::string dump(const ojson& j);

// Writes bytes unchanged; "" or "-" means stdout. I/O errors name the path.
void write_output(const std::string& path, const std::string& content);

ojson to_json(const LogConcavityReport& r);
ojson to_json(const UpSetCertificate& c);
ojson to_json(const DominanceResult& r, const JointTable* box = nullptr);
ojson to_json(const EfronReport& r);
ojson to_json(const ConditionTrend& t);
ojson to_json(const ConvergenceTable& t);
ojson to_json(const SandwichReport& r);
ojson to_json(const CoupledStationary& s);

std::string pmf_csv(const Pmf& pmf, const char* column = "x");
std::string sum_law_csv(const SumLaw& law);
std::string joint_csv(const JointTable& table);
std::string convergence_csv(const ConvergenceTable& t);
std::string coupled_stationary_csv(const CoupledStationary& s);

}  // namespace gibbslab::cli
