#include "cli/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

namespace gibbslab::cli {

ojson num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string format_double(double x) {
  if (std::isfinite(x)) return fmt::format("{:.17g}", x);
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout.write(content.data(), static_cast<std::streamsize>(content.size()));
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::kInvalidInput, "write to '" + path + "' failed");
}

ojson to_json(const LogConcavityReport& r) {
  ojson j;
  j["is_log_concave"] = r.is_log_concave;
  j["has_internal_zero"] = r.has_internal_zero;
  if (r.first_violation) {
    j["first_violation"] = {{"x", r.first_violation->x},
                            {"left_ratio", num(r.first_violation->left_ratio)},
                            {"right_ratio", num(r.first_violation->right_ratio)}};
  } else {
    j["first_violation"] = nullptr;
  }
  return j;
}

ojson to_json(const UpSetCertificate& c) {
  ojson j;
  j["generators"] = c.generators;
  j["member_count"] = c.members.size();
  j["lower_mass"] = num(c.lower_mass);
  j["upper_mass"] = num(c.upper_mass);
  j["gap"] = num(c.lower_mass - c.upper_mass);
  return j;
}

ojson to_json(const DominanceResult& r, const JointTable* box) {
  ojson j;
  j["holds"] = r.holds;
  j["flow"] = num(r.flow);
  j["certificate"] = r.violation_certificate ? to_json(*r.violation_certificate) : ojson(nullptr);
  if (r.witness_coupling && box != nullptr) {
    ojson w = ojson::array();
    for (const auto& e : *r.witness_coupling) {
      w.push_back({{"from", box->config(e.from)}, {"to", box->config(e.to)}, {"mass", num(e.mass)}});
    }
    j["witness"] = std::move(w);
  }
  return j;
}

ojson to_json(const EfronReport& r) {
  ojson j;
  j["n"] = r.n;
  j["k_max"] = r.k_max;
  j["all_log_concave"] = r.all_log_concave;
  j["all_hold"] = r.all_hold;
  j["degraded"] = r.degraded;
  ojson members = ojson::array();
  for (const auto& m : r.member_reports) members.push_back(to_json(m));
  j["members"] = std::move(members);
  ojson pairs = ojson::array();
  for (const auto& p : r.pairs) {
    ojson e;
    e["k"] = p.k;
    e["holds"] = p.holds;
    e["flow"] = num(p.flow);
    e["marginal_only"] = p.marginal_only;
    e["certificate"] = p.certificate ? to_json(*p.certificate) : ojson(nullptr);
    pairs.push_back(std::move(e));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

ojson to_json(const ConditionTrend& t) {
  ojson j;
  j["lambda_star"] = num(t.lambda_star);
  j["eps"] = num(t.eps);
  j["threshold"] = num(t.threshold);
  ojson rows = ojson::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"n", r.n}, {"lower", num(r.lower)}, {"upper", num(r.upper)}});
  }
  j["rows"] = std::move(rows);
  j["slope_lower"] = num(t.slope_lower);
  j["slope_upper"] = num(t.slope_upper);
  j["diverging"] = t.diverging;
  j["note"] = t.note;
  return j;
}

ojson to_json(const ConvergenceTable& t) {
  ojson j;
  j["lambda_star"] = num(t.lambda_star);
  j["ell"] = t.ell;
  j["mode"] = to_string(t.mode);
  j["conditioning_lambda"] = num(t.conditioning_lambda);
  j["hypothesis_override"] = t.hypothesis_override;
  ojson rows = ojson::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"n", r.n},
                    {"r_star", num(r.r_star)},
                    {"event_mass", num(r.event_mass)},
                    {"tv", num(r.tv)}});
  }
  j["rows"] = std::move(rows);
  j["condition"] = t.diagnostic ? to_json(*t.diagnostic) : ojson(nullptr);
  return j;
}

namespace {

ojson bracket_json(const BracketCheck& b) {
  ojson j;
  j["lambda"] = num(b.lambda);
  j["event"] = to_string(b.event);
  j["holds"] = b.holds;
  j["flow"] = num(b.flow);
  j["tv_to_target"] = num(b.tv_to_target);
  j["certificate"] = b.certificate ? to_json(*b.certificate) : ojson(nullptr);
  return j;
}

}  // namespace

ojson to_json(const SandwichReport& r) {
  ojson j;
  j["mode"] = to_string(r.mode);
  j["lambda_star"] = num(r.lambda_star);
  j["ell"] = r.ell;
  j["n"] = r.n;
  j["r_star"] = num(r.r_star);
  j["tv_base"] = num(r.tv_base);
  j["lower"] = bracket_json(r.lower);
  j["upper"] = bracket_json(r.upper);
  j["holds"] = r.holds;
  return j;
}

ojson to_json(const CoupledStationary& s) {
  ojson j;
  j["lo"] = s.lo;
  j["hi"] = s.hi;
  j["reachable_states"] = s.reachable_states;
  j["residual"] = num(s.residual);
  j["unordered_mass"] = num(s.unordered_mass());
  return j;
}

std::string pmf_csv(const Pmf& pmf, const char* column) {
  std::string out = fmt::format("{},prob\n", column);
  for (int x = 0; x <= pmf.support_max(); ++x) {
    out += fmt::format("{},{}\n", x, format_double(pmf.prob(x)));
  }
  return out;
}

std::string sum_law_csv(const SumLaw& law) {
  std::string out = "k,prob\n";
  for (long k = 0; k <= law.k_max(); ++k) {
    out += fmt::format("{},{}\n", k, format_double(law.prob(k)));
  }
  return out;
}

std::string joint_csv(const JointTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.rank(); ++c) out += fmt::format("x_{},", c + 1);
  out += "prob\n";
  for (std::size_t f = 0; f < table.size(); ++f) {
    const double p = table.prob(f);
    if (p == 0.0) continue;
    for (int v : table.config(f)) out += fmt::format("{},", v);
    out += format_double(p) + "\n";
  }
  return out;
}

std::string convergence_csv(const ConvergenceTable& t) {
  std::string out = "n,r_star,event_mass,tv\n";
  for (const auto& r : t.rows) {
    out += fmt::format("{},{},{},{}\n", r.n, format_double(r.r_star), format_double(r.event_mass),
                       format_double(r.tv));
  }
  return out;
}

std::string coupled_stationary_csv(const CoupledStationary& s) {
  std::string out = "k,k2,prob\n";
  for (int k = s.lo; k <= s.hi; ++k) {
    for (int k2 = s.lo; k2 <= s.hi; ++k2) {
      const double p = s.prob(k, k2);
      if (p != 0.0) out += fmt::format("{},{},{}\n", k, k2, format_double(p));
    }
  }
  return out;
}

}  // namespace gibbslab::cli
