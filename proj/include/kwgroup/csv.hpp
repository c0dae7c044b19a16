#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "kwgroup/data.hpp"
#include "kwgroup/model.hpp"

namespace kwgroup {

/// Raised when a CSV stream is malformed; the message carries the line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// Shortest decimal form that parses back to exactly the same double;
/// infinities render as "inf"/"-inf".
std::string format_double(double v);
/// Strict full-field parse; accepts "inf"/"-inf". Throws std::invalid_argument.
double parse_double(const std::string& s);

/// Keyword statistics as read from an instance file; the adgroup count is
/// inferred from the header.
struct InstanceData {
  std::vector<KeywordStat> keywords;
  int m = 0;
};

/// Instance table: keyword_id, demand, vps, product_label, hierarchy_label,
/// then ctr_mean_j, ctr_sd_j, cvr_mean_j, cvr_sd_j, cpc_j, cost_mean_j,
/// cost_sd_j for each adgroup j (1-based). Spend moments are always written
/// out, so a round trip re-derives nothing.
void write_instance_csv(std::ostream& os, const std::vector<KeywordStat>& keywords, int m);
InstanceData read_instance_csv(std::istream& is, Diagnostics* diag = nullptr);

/// Adgroup table: adgroup_id, budget, alpha.
void write_adgroups_csv(std::ostream& os, const std::vector<AdGroupSpec>& groups);
std::vector<AdGroupSpec> read_adgroups_csv(std::istream& is);

/// Performance report table: keyword_id, period, impressions, clicks,
/// conversions, cost, revenue, product_label, hierarchy_label.
void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(std::istream& is);

/// Assignment table: keyword_id, adgroup_id ("" = left out). Reading
/// validates ids against the instance.
void write_assignment_csv(std::ostream& os, const ProblemInstance& inst, const Assignment& x);
Assignment read_assignment_csv(std::istream& is, const ProblemInstance& inst);

}  // namespace kwgroup
