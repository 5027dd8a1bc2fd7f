#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spatial_exit/panel.hpp"

namespace spatial_exit {

/// Selects firms whose code at `level` starts with `prefix`; no level means all.
struct IndustryFilter {
  std::optional<IndustryLevel> level;
  std::string prefix;

  bool matches(const EnterpriseRecord& record) const;
  /// "all", or "<level>:<prefix>" such as "division:39".
  std::string label() const;
  static IndustryFilter parse(std::string_view text);
};

/// One [year, year + 1] interval.
///
/// active = established by `year` and not exited by `year`;
/// exits  = exit_year == year + 1;
/// exit share uses `active` as denominator.
struct ExitRow {
  int year = 0;
  std::size_t active = 0;
  std::size_t exits = 0;

  double exit_share() const noexcept {
    return active == 0 ? 0.0 : static_cast<double>(exits) / static_cast<double>(active);
  }
};

struct ExitTable {
  IndustryFilter filter;
  std::vector<ExitRow> rows;
};

/// Rows for every interval from `first_year` (default panel_start) to
/// `last_year` - 1 (default panel_end - 1). Throws EmptyFilter.
ExitTable exit_table(const PanelDataset& panel, const IndustryFilter& filter,
                     std::optional<int> first_year = {},
                     std::optional<int> last_year = {});

struct CategoricalShare {
  std::string label;
  std::size_t count = 0;
  std::size_t total = 0;
  double share() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
  }
};

struct NumericSummary {
  std::string label;
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
};

struct SummaryReport {
  std::size_t firms = 0;
  std::vector<CategoricalShare> categorical;
  std::vector<NumericSummary> numeric;
};

NumericSummary describe(std::string label, std::vector<double> values);

/// Categorical shares and numeric summaries over every record in the panel.
SummaryReport summarize(const PanelDataset& panel);

/// Long format: filter,interval,active,exits,exit_pct
void write_exit_tables_csv(std::ostream& out, const std::vector<ExitTable>& tables);
/// variable,count,total,pct
void write_categorical_csv(std::ostream& out, const SummaryReport& report);
/// variable,n,mean,median,sd
void write_numeric_csv(std::ostream& out, const SummaryReport& report);

/// Plain-text rendering of the three tables side by side with the filters as columns.
void render_tables_text(std::ostream& out, const std::vector<ExitTable>& tables,
                        const SummaryReport& report);

}  // namespace spatial_exit
