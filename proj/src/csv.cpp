#include "kwgroup/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

namespace kwgroup {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

namespace {

long long parse_int(const std::string& s, int line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("not an integer: '" + s + "'", line);
  }
  return v;
}

double parse_num(const std::string& s, int line) {
  try {
    return parse_double(s);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line);
  }
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quoted(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one CSV line; supports double-quoted fields with doubled quotes.
std::vector<std::string> split_line(const std::string& line, int lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t p = 0; p < line.size(); ++p) {
    char c = line[p];
    if (in_quotes) {
      if (c == '"') {
        if (p + 1 < line.size() && line[p + 1] == '"') {
          cur += '"';
          ++p;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!cur.empty()) throw ParseError("stray quote inside field", lineno);
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", lineno);
  out.push_back(std::move(cur));
  return out;
}

struct CsvRow {
  int line = 0;
  std::vector<std::string> fields;
};

// Reads all rows, tolerating CRLF endings and blank lines.
std::vector<CsvRow> read_rows(std::istream& is) {
  std::vector<CsvRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(CsvRow{lineno, split_line(line, lineno)});
  }
  return rows;
}

void expect_header(const std::vector<std::string>& got,
                   const std::vector<std::string>& want) {
  if (got != want) {
    std::string msg = "unexpected header; want ";
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (i) msg += ',';
      msg += want[i];
    }
    throw ParseError(msg, 1);
  }
}

void expect_width(const std::vector<std::string>& row, std::size_t width, int line) {
  if (row.size() != width) {
    throw ParseError("expected " + std::to_string(width) + " fields, got " +
                         std::to_string(row.size()),
                     line);
  }
}

}  // namespace

void write_instance_csv(std::ostream& os, const std::vector<KeywordStat>& keywords, int m) {
  os << "keyword_id,demand,vps,product_label,hierarchy_label";
  for (int j = 1; j <= m; ++j) {
    os << ",ctr_mean_" << j << ",ctr_sd_" << j << ",cvr_mean_" << j << ",cvr_sd_" << j
       << ",cpc_" << j << ",cost_mean_" << j << ",cost_sd_" << j;
  }
  os << "\n";
  for (const auto& k : keywords) {
    os << quoted(k.id) << ',' << format_double(k.demand) << ',' << format_double(k.value_per_sale)
       << ',' << quoted(k.product_label) << ',' << quoted(k.hierarchy_label);
    for (int j = 0; j < m; ++j) {
      os << ',' << format_double(k.ctr[j].mean) << ',' << format_double(k.ctr[j].sd) << ','
         << format_double(k.cvr[j].mean) << ',' << format_double(k.cvr[j].sd) << ','
         << format_double(k.cpc[j]);
      if (!k.cost.empty()) {
        os << ',' << format_double(k.cost[j].mean) << ',' << format_double(k.cost[j].sd);
      } else {
        os << ",,";
      }
    }
    os << "\n";
  }
}

InstanceData read_instance_csv(std::istream& is, Diagnostics* diag) {
  auto rows = read_rows(is);
  if (rows.empty()) throw ParseError("empty instance file", 1);
  const auto& header = rows[0].fields;
  if (header.size() < 12 || (header.size() - 5) % 7 != 0) {
    throw ParseError("instance header must carry 5 base columns plus 7 per adgroup", 1);
  }
  int m = static_cast<int>((header.size() - 5) / 7);
  std::vector<std::string> want = {"keyword_id", "demand", "vps", "product_label",
                                   "hierarchy_label"};
  for (int j = 1; j <= m; ++j) {
    std::string sj = std::to_string(j);
    for (const char* base : {"ctr_mean_", "ctr_sd_", "cvr_mean_", "cvr_sd_", "cpc_",
                             "cost_mean_", "cost_sd_"}) {
      want.push_back(base + sj);
    }
  }
  expect_header(header, want);

  InstanceData out;
  out.m = m;
  int tiny = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    int line = rows[r].line;
    const auto& row = rows[r].fields;
    expect_width(row, header.size(), line);
    KeywordStat k;
    k.id = row[0];
    if (k.id.empty()) throw ParseError("empty keyword_id", line);
    k.demand = parse_num(row[1], line);
    k.value_per_sale = parse_num(row[2], line);
    k.product_label = row[3];
    k.hierarchy_label = row[4];
    k.ctr.resize(m);
    k.cvr.resize(m);
    k.cpc.resize(m);
    bool any_cost = false, all_cost = true;
    std::vector<Moments2> cost(m);
    for (int j = 0; j < m; ++j) {
      std::size_t base = 5 + static_cast<std::size_t>(j) * 7;
      k.ctr[j] = {parse_num(row[base], line), parse_num(row[base + 1], line)};
      k.cvr[j] = {parse_num(row[base + 2], line), parse_num(row[base + 3], line)};
      k.cpc[j] = parse_num(row[base + 4], line);
      const std::string& cm = row[base + 5];
      const std::string& cs = row[base + 6];
      if (cm.empty() != cs.empty()) {
        throw ParseError("spend mean and sd must be given together", line);
      }
      if (!cm.empty()) {
        cost[j] = {parse_num(cm, line), parse_num(cs, line)};
        any_cost = true;
      } else {
        all_cost = false;
      }
    }
    if (any_cost && !all_cost) {
      throw ParseError("spend moments must cover all adgroups or none", line);
    }
    if (any_cost) k.cost = std::move(cost);
    if (k.demand * k.ctr[0].mean < 10.0 || k.demand * (1.0 - k.ctr[0].mean) < 10.0) ++tiny;
    out.keywords.push_back(std::move(k));
  }
  if (diag && tiny > 0) {
    diag->warn(std::to_string(tiny) + " of " + std::to_string(out.keywords.size()) +
               " keywords have too few expected clicks or misses for the normal spend "
               "approximation to be reliable");
  }
  return out;
}

void write_adgroups_csv(std::ostream& os, const std::vector<AdGroupSpec>& groups) {
  os << "adgroup_id,budget,alpha\n";
  for (const auto& g : groups) {
    os << quoted(g.id) << ',' << format_double(g.budget) << ',' << format_double(g.alpha)
       << "\n";
  }
}

std::vector<AdGroupSpec> read_adgroups_csv(std::istream& is) {
  auto rows = read_rows(is);
  if (rows.empty()) throw ParseError("empty adgroup file", 1);
  expect_header(rows[0].fields, {"adgroup_id", "budget", "alpha"});
  std::vector<AdGroupSpec> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    int line = rows[r].line;
    const auto& row = rows[r].fields;
    expect_width(row, 3, line);
    AdGroupSpec g;
    g.id = row[0];
    g.budget = parse_num(row[1], line);
    g.alpha = parse_num(row[2], line);
    out.push_back(std::move(g));
  }
  return out;
}

void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "keyword_id,period,impressions,clicks,conversions,cost,revenue,"
        "product_label,hierarchy_label\n";
  for (const auto& r : rows) {
    os << quoted(r.keyword_id) << ',' << quoted(r.period) << ',' << r.impressions << ','
       << r.clicks << ',' << r.conversions << ',' << format_double(r.cost) << ','
       << format_double(r.revenue) << ',' << quoted(r.product_label) << ','
       << quoted(r.hierarchy_label) << "\n";
  }
}

std::vector<ReportRow> read_report_csv(std::istream& is) {
  auto rows = read_rows(is);
  if (rows.empty()) throw ParseError("empty report file", 1);
  expect_header(rows[0].fields, {"keyword_id", "period", "impressions", "clicks",
                                 "conversions", "cost", "revenue", "product_label",
                                 "hierarchy_label"});
  std::vector<ReportRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    int line = rows[r].line;
    const auto& f = rows[r].fields;
    expect_width(f, 9, line);
    ReportRow row;
    row.keyword_id = f[0];
    row.period = f[1];
    row.impressions = parse_int(f[2], line);
    row.clicks = parse_int(f[3], line);
    row.conversions = parse_int(f[4], line);
    row.cost = parse_num(f[5], line);
    row.revenue = parse_num(f[6], line);
    row.product_label = f[7];
    row.hierarchy_label = f[8];
    out.push_back(std::move(row));
  }
  return out;
}

void write_assignment_csv(std::ostream& os, const ProblemInstance& inst, const Assignment& x) {
  if (x.n() != inst.n() || x.m() != inst.m()) {
    throw std::invalid_argument("write_assignment_csv: shape mismatch");
  }
  os << "keyword_id,adgroup_id\n";
  for (int i = 0; i < inst.n(); ++i) {
    int j = x.column_of(i);
    os << quoted(inst.keyword(i).id) << ',' << (j >= 0 ? quoted(inst.adgroup(j).id) : "")
       << "\n";
  }
}

Assignment read_assignment_csv(std::istream& is, const ProblemInstance& inst) {
  auto rows = read_rows(is);
  if (rows.empty()) throw ParseError("empty assignment file", 1);
  expect_header(rows[0].fields, {"keyword_id", "adgroup_id"});
  std::map<std::string, int> kw_index, grp_index;
  for (int i = 0; i < inst.n(); ++i) kw_index[inst.keyword(i).id] = i;
  for (int j = 0; j < inst.m(); ++j) grp_index[inst.adgroup(j).id] = j;
  Assignment out(inst.n(), inst.m());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    int line = rows[r].line;
    const auto& f = rows[r].fields;
    expect_width(f, 2, line);
    auto ki = kw_index.find(f[0]);
    if (ki == kw_index.end()) {
      throw ParseError("unknown keyword '" + f[0] + "'", line);
    }
    if (f[1].empty()) continue;
    auto gi = grp_index.find(f[1]);
    if (gi == grp_index.end()) {
      throw ParseError("unknown adgroup '" + f[1] + "'", line);
    }
    if (out.column_of(ki->second) != -1) {
      throw ParseError("keyword '" + f[0] + "' assigned twice", line);
    }
    out.assign(ki->second, gi->second);
  }
  return out;
}

}  // namespace kwgroup
