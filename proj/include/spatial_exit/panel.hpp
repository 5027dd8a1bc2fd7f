#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spatial_exit/error.hpp"

namespace spatial_exit {

/// The four nested levels of the industrial classification.
enum class IndustryLevel { Section, Division, Group, Class };

std::string_view to_string(IndustryLevel level) noexcept;
std::optional<IndustryLevel> parse_industry_level(std::string_view text) noexcept;

/// Section letter, 2-digit division, 3-digit group, 4-digit class; each code
/// extends the previous one.
struct IndustryCode {
  std::string section;
  std::string division;
  std::string group;
  std::string class_;

  /// Validates the prefix chain; throws Error(BadIndustryCode).
  static IndustryCode make(std::string section, std::string division,
                           std::string group, std::string class_);

  const std::string& at(IndustryLevel level) const noexcept;

  friend bool operator==(const IndustryCode&, const IndustryCode&) = default;
};

enum class Region { HongKong, Taiwan, US, Other };
enum class LegalForm { ForeignOwned, JointVenture, Other };

std::string_view to_string(Region region) noexcept;
std::string_view to_string(LegalForm form) noexcept;
std::optional<Region> parse_region(std::string_view text) noexcept;
std::optional<LegalForm> parse_legal_form(std::string_view text) noexcept;

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
};

struct EnterpriseRecord {
  std::string id;
  GeoPoint location;
  IndustryCode industry;
  int established_year = 0;
  std::optional<int> exit_year;  // empty: still active at panel end
  double registered_capital = 0.0;  // $10,000 units
  double foreign_pct = 0.0;         // fraction in [0, 1]
  Region region = Region::HongKong;
  LegalForm legal_form = LegalForm::ForeignOwned;
  bool tariffed = false;
  bool importer_exporter = false;

  /// Established by `year` and not yet exited in `year`.
  bool active_in(int year) const noexcept {
    return established_year <= year && (!exit_year || *exit_year > year);
  }
  bool exits_after(int year) const noexcept {
    return exit_year && *exit_year == year + 1;
  }
  int years_of_operation(int year) const noexcept {
    return year - established_year;
  }
};

struct PanelDataset {
  std::vector<EnterpriseRecord> records;
  int panel_start = 0;
  int panel_end = 0;
};

/// Column names for each field. The defaults are the canonical header.
struct ColumnSchema {
  std::string id = "id";
  std::string lon = "lon";
  std::string lat = "lat";
  std::string section = "section";
  std::string division = "division";
  std::string group = "group";
  std::string class_ = "class";
  std::string established_year = "established_year";
  std::string exit_year = "exit_year";
  std::string registered_capital = "registered_capital";
  std::string foreign_pct = "foreign_pct";
  std::string region = "region";
  std::string legal_form = "legal_form";
  std::string tariffed = "tariffed";
  std::string imp_exp = "imp_exp";

  std::vector<std::string> header() const;
};

struct LoadOptions {
  ColumnSchema schema;
  std::optional<int> panel_start;  // default: earliest established year
  std::optional<int> panel_end;    // default: latest year seen in the file
  bool strict = false;             // throw on the first rejected row
};

/// A row that failed validation. `line` is the 1-based file line (header = 1).
struct Reject {
  std::size_t line = 0;
  Errc kind = Errc::BadValue;
  std::string message;
  std::string raw;
};

struct LoadResult {
  PanelDataset panel;
  std::vector<Reject> rejects;
};

LoadResult parse_panel(std::istream& in, const LoadOptions& options = {});
LoadResult load_panel(const std::filesystem::path& path,
                      const LoadOptions& options = {});

/// Writes records with the canonical header; output reloads without rejects.
void write_panel_csv(std::ostream& out, const PanelDataset& panel);
void write_rejects_csv(std::ostream& out, const std::vector<Reject>& rejects);

/// "<input>.rejects.csv"
std::filesystem::path rejects_path_for(const std::filesystem::path& input);

/// Splits one CSV line, honouring double quotes.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace spatial_exit
