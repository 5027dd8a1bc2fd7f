#include "spatial_exit/tables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "spatial_exit/format.hpp"

namespace spatial_exit {

bool IndustryFilter::matches(const EnterpriseRecord& record) const {
  if (!level) return true;
  return std::string_view(record.industry.at(*level)).starts_with(prefix);
}

std::string IndustryFilter::label() const {
  if (!level) return "all";
  return std::string(to_string(*level)) + ":" + prefix;
}

IndustryFilter IndustryFilter::parse(std::string_view text) {
  if (text == "all") return {};
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(Errc::InvalidArgument, "filter '" + std::string(text) +
                                           "' must be 'all' or '<level>:<code>'");
  const auto level = parse_industry_level(text.substr(0, colon));
  if (!level)
    throw Error(Errc::InvalidArgument,
                "unknown industry level in filter '" + std::string(text) + "'");
  if (colon + 1 == text.size())
    throw Error(Errc::InvalidArgument, "filter '" + std::string(text) + "' has an empty code");
  return IndustryFilter{level, std::string(text.substr(colon + 1))};
}

ExitTable exit_table(const PanelDataset& panel, const IndustryFilter& filter,
                     std::optional<int> first_year, std::optional<int> last_year) {
  std::vector<const EnterpriseRecord*> selected;
  for (const auto& r : panel.records)
    if (filter.matches(r)) selected.push_back(&r);
  if (selected.empty())
    throw Error(Errc::EmptyFilter, "no firm matches filter '" + filter.label() + "'");

  const int from = first_year.value_or(panel.panel_start);
  const int to = last_year.value_or(panel.panel_end);
  ExitTable table{filter, {}};
  for (int year = from; year < to; ++year) {
    ExitRow row{year, 0, 0};
    for (const auto* r : selected) {
      if (!r->active_in(year)) continue;
      ++row.active;
      if (r->exits_after(year)) ++row.exits;
    }
    table.rows.push_back(row);
  }
  return table;
}

NumericSummary describe(std::string label, std::vector<double> values) {
  NumericSummary s{std::move(label), values.size(), 0.0, 0.0, 0.0};
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (values.empty()) {
    s.mean = s.median = s.sd = nan;
    return s;
  }
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : nan;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

SummaryReport summarize(const PanelDataset& panel) {
  if (panel.records.empty()) throw Error(Errc::EmptyFilter, "panel is empty");
  SummaryReport report;
  const std::size_t n = panel.records.size();
  report.firms = n;

  auto share = [&](std::string label, auto pred) {
    const auto count = static_cast<std::size_t>(
        std::count_if(panel.records.begin(), panel.records.end(), pred));
    report.categorical.push_back({std::move(label), count, n});
  };
  share("Foreign-owned", [](const auto& r) { return r.legal_form == LegalForm::ForeignOwned; });
  share("Joint-venture", [](const auto& r) { return r.legal_form == LegalForm::JointVenture; });
  share("U.S. Registered", [](const auto& r) { return r.region == Region::US; });
  share("Tariffed Industry", [](const auto& r) { return r.tariffed; });
  share("Importer/Exporter", [](const auto& r) { return r.importer_exporter; });

  std::vector<double> capital, contribution, jv_contribution;
  for (const auto& r : panel.records) {
    capital.push_back(r.registered_capital);
    contribution.push_back(100.0 * r.foreign_pct);
    if (r.legal_form == LegalForm::JointVenture)
      jv_contribution.push_back(100.0 * r.foreign_pct);
  }
  report.numeric.push_back(describe("Registered Capital", std::move(capital)));
  report.numeric.push_back(describe("Foreign Contribution(%)", std::move(contribution)));
  report.numeric.push_back(
      describe("Foreign Contribution(%) for Joint-venture", std::move(jv_contribution)));
  return report;
}

void write_exit_tables_csv(std::ostream& out, const std::vector<ExitTable>& tables) {
  out << "filter,interval,active,exits,exit_pct\n";
  for (const auto& t : tables) {
    for (const auto& row : t.rows) {
      out << t.filter.label() << ',' << row.year << '-' << row.year + 1 << ','
          << row.active << ',' << row.exits << ','
          << fmt_fixed(100.0 * row.exit_share(), 2) << '\n';
    }
  }
}

void write_categorical_csv(std::ostream& out, const SummaryReport& report) {
  out << "variable,count,total,pct\n";
  for (const auto& c : report.categorical)
    out << csv_quote(c.label) << ',' << c.count << ',' << c.total << ','
        << fmt_fixed(100.0 * c.share(), 2) << '\n';
}

void write_numeric_csv(std::ostream& out, const SummaryReport& report) {
  out << "variable,n,mean,median,sd\n";
  for (const auto& s : report.numeric)
    out << csv_quote(s.label) << ',' << s.n << ',' << fmt_fixed(s.mean, 6) << ','
        << fmt_fixed(s.median, 6) << ',' << fmt_fixed(s.sd, 6) << '\n';
}

namespace {

std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::string with_commas(std::size_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

}  // namespace

void render_tables_text(std::ostream& out, const std::vector<ExitTable>& tables,
                        const SummaryReport& report) {
  constexpr std::size_t kLabel = 44, kCell = 14;
  const std::string rule(kLabel + 2 * kCell * tables.size(), '=');

  out << "Table 1. Yearly exits\n" << rule << '\n' << pad("", kLabel, true);
  for (const auto& t : tables) out << pad(t.filter.label(), 2 * kCell);
  out << '\n' << pad("", kLabel, true);
  for (std::size_t i = 0; i < tables.size(); ++i)
    out << pad("Enterprises", kCell) << pad("Exits", kCell);
  out << '\n' << rule << '\n';
  const std::size_t rows = tables.empty() ? 0 : tables.front().rows.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const int year = tables.front().rows[r].year;
    out << pad(std::to_string(year) + "-" + std::to_string(year + 1), kLabel, true);
    for (const auto& t : tables)
      out << pad(with_commas(t.rows[r].active), kCell) << pad(with_commas(t.rows[r].exits), kCell);
    out << '\n' << pad("", kLabel, true);
    for (const auto& t : tables)
      out << pad("", kCell) << pad("(" + fmt_fixed(100.0 * t.rows[r].exit_share(), 2) + "%)", kCell);
    out << '\n';
  }
  out << rule << "\n\n";

  const std::string rule2(kLabel + kCell, '=');
  out << "Table 2. Categorical variables (n = " << report.firms << ")\n" << rule2 << '\n';
  for (const auto& c : report.categorical)
    out << pad(c.label, kLabel, true) << pad(fmt_fixed(100.0 * c.share(), 2) + "%", kCell) << '\n';
  out << rule2 << "\n\n";

  const std::string rule3(kLabel + 3 * kCell, '=');
  out << "Table 3. Numerical variables\n" << rule3 << '\n' << pad("", kLabel, true)
      << pad("Mean", kCell) << pad("Median", kCell) << pad("St.Dev.", kCell) << '\n'
      << rule3 << '\n';
  for (const auto& s : report.numeric)
    out << pad(s.label, kLabel, true) << pad(fmt_fixed(s.mean, 2), kCell)
        << pad(fmt_fixed(s.median, 2), kCell) << pad(fmt_fixed(s.sd, 2), kCell) << '\n';
  out << rule3 << '\n' << "Note: currencies in $10,000\n";
}

}  // namespace spatial_exit
