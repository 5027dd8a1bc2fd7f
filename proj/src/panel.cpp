#include "spatial_exit/panel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "spatial_exit/format.hpp"

namespace spatial_exit {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

struct RowError {
  Errc kind;
  std::string message;
};

std::optional<bool> parse_flag(std::string_view s) {
  s = trim(s);
  if (s == "0") return false;
  if (s == "1") return true;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(IndustryLevel level) noexcept {
  switch (level) {
    case IndustryLevel::Section: return "section";
    case IndustryLevel::Division: return "division";
    case IndustryLevel::Group: return "group";
    case IndustryLevel::Class: return "class";
  }
  return "?";
}

std::optional<IndustryLevel> parse_industry_level(std::string_view text) noexcept {
  if (text == "section") return IndustryLevel::Section;
  if (text == "division") return IndustryLevel::Division;
  if (text == "group") return IndustryLevel::Group;
  if (text == "class") return IndustryLevel::Class;
  return std::nullopt;
}

IndustryCode IndustryCode::make(std::string section, std::string division,
                                std::string group, std::string class_) {
  auto fail = [&](const std::string& why) -> IndustryCode {
    throw Error(Errc::BadIndustryCode,
                "industry code " + section + "/" + division + "/" + group + "/" +
                    class_ + ": " + why);
  };
  if (section.size() != 1 || section[0] < 'A' || section[0] > 'Z')
    return fail("section must be a single capital letter");
  if (division.size() != 2 || !all_digits(division))
    return fail("division must have 2 digits");
  if (group.size() != 3 || !all_digits(group)) return fail("group must have 3 digits");
  if (class_.size() != 4 || !all_digits(class_)) return fail("class must have 4 digits");
  if (group.compare(0, 2, division) != 0) return fail("group does not extend division");
  if (class_.compare(0, 3, group) != 0) return fail("class does not extend group");
  return IndustryCode{std::move(section), std::move(division), std::move(group),
                      std::move(class_)};
}

const std::string& IndustryCode::at(IndustryLevel level) const noexcept {
  switch (level) {
    case IndustryLevel::Section: return section;
    case IndustryLevel::Division: return division;
    case IndustryLevel::Group: return group;
    case IndustryLevel::Class: return class_;
  }
  return class_;
}

std::string_view to_string(Region region) noexcept {
  switch (region) {
    case Region::HongKong: return "HongKong";
    case Region::Taiwan: return "Taiwan";
    case Region::US: return "US";
    case Region::Other: return "Other";
  }
  return "?";
}

std::string_view to_string(LegalForm form) noexcept {
  switch (form) {
    case LegalForm::ForeignOwned: return "ForeignOwned";
    case LegalForm::JointVenture: return "JointVenture";
    case LegalForm::Other: return "Other";
  }
  return "?";
}

std::optional<Region> parse_region(std::string_view text) noexcept {
  text = trim(text);
  if (text == "HongKong") return Region::HongKong;
  if (text == "Taiwan") return Region::Taiwan;
  if (text == "US") return Region::US;
  if (text == "Other") return Region::Other;
  return std::nullopt;
}

std::optional<LegalForm> parse_legal_form(std::string_view text) noexcept {
  text = trim(text);
  if (text == "ForeignOwned") return LegalForm::ForeignOwned;
  if (text == "JointVenture") return LegalForm::JointVenture;
  if (text == "Other") return LegalForm::Other;
  return std::nullopt;
}

std::vector<std::string> ColumnSchema::header() const {
  return {id,          lon,       lat,       section,          division,
          group,       class_,    established_year, exit_year, registered_capital,
          foreign_pct, region,    legal_form, tariffed,        imp_exp};
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

LoadResult parse_panel(std::istream& in, const LoadOptions& options) {
  const ColumnSchema& schema = options.schema;
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::MissingColumn, "empty input: no header row");

  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t, std::less<>> position;
  for (std::size_t i = 0; i < header.size(); ++i)
    position.emplace(std::string(trim(header[i])), i);

  const auto wanted = schema.header();
  std::vector<std::size_t> col(wanted.size());
  for (std::size_t k = 0; k < wanted.size(); ++k) {
    auto it = position.find(wanted[k]);
    if (it == position.end())
      throw Error(Errc::MissingColumn, "missing column '" + wanted[k] + "'");
    col[k] = it->second;
  }
  enum Field { Id, Lon, Lat, Sec, Div, Grp, Cls, Est, Exit, Cap, Fpct, Reg, Legal, Tar, Imp };

  LoadResult result;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 1;
  int min_year = 0, max_year = 0;
  bool any = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);

    auto reject = [&](Errc kind, const std::string& message) {
      Reject r{line_no, kind, "line " + std::to_string(line_no) + ": " + message, line};
      if (!r.raw.empty() && r.raw.back() == '\r') r.raw.pop_back();
      if (options.strict) throw Error(kind, r.message);
      result.rejects.push_back(std::move(r));
    };
    auto field = [&](Field f) -> std::string_view {
      const std::size_t c = col[f];
      return c < fields.size() ? trim(fields[c]) : std::string_view{};
    };

    if (fields.size() < header.size()) {
      reject(Errc::BadValue, "expected " + std::to_string(header.size()) +
                                 " fields, found " + std::to_string(fields.size()));
      continue;
    }

    EnterpriseRecord rec;
    rec.id = std::string(field(Id));
    if (rec.id.empty()) {
      reject(Errc::BadValue, "empty id");
      continue;
    }

    const auto lon = parse_number<double>(field(Lon));
    const auto lat = parse_number<double>(field(Lat));
    if (!lon || !lat || !(*lon >= -180.0 && *lon <= 180.0) ||
        !(*lat >= -90.0 && *lat <= 90.0)) {
      reject(Errc::BadCoordinate, "bad coordinate (lon='" + std::string(field(Lon)) +
                                      "', lat='" + std::string(field(Lat)) + "')");
      continue;
    }
    rec.location = {*lon, *lat};

    try {
      rec.industry = IndustryCode::make(std::string(field(Sec)), std::string(field(Div)),
                                        std::string(field(Grp)), std::string(field(Cls)));
    } catch (const Error& e) {
      reject(Errc::BadIndustryCode, e.what());
      continue;
    }

    const auto est = parse_number<int>(field(Est));
    if (!est) {
      reject(Errc::BadValue, "bad established_year '" + std::string(field(Est)) + "'");
      continue;
    }
    rec.established_year = *est;
    if (!field(Exit).empty()) {
      const auto ex = parse_number<int>(field(Exit));
      if (!ex || *ex < *est) {
        reject(Errc::BadValue, "bad exit_year '" + std::string(field(Exit)) + "'");
        continue;
      }
      rec.exit_year = *ex;
    }

    const auto cap = parse_number<double>(field(Cap));
    if (!cap || !(*cap >= 0.0)) {
      reject(Errc::BadValue, "bad registered_capital '" + std::string(field(Cap)) + "'");
      continue;
    }
    rec.registered_capital = *cap;
    const auto fpct = parse_number<double>(field(Fpct));
    if (!fpct || !(*fpct >= 0.0 && *fpct <= 1.0)) {
      reject(Errc::BadValue, "bad foreign_pct '" + std::string(field(Fpct)) + "'");
      continue;
    }
    rec.foreign_pct = *fpct;

    const auto region = parse_region(field(Reg));
    const auto legal = parse_legal_form(field(Legal));
    if (!region || !legal) {
      reject(Errc::BadValue, "bad region or legal_form");
      continue;
    }
    rec.region = *region;
    rec.legal_form = *legal;

    const auto tar = parse_flag(field(Tar));
    const auto imp = parse_flag(field(Imp));
    if (!tar || !imp) {
      reject(Errc::BadValue, "tariffed and imp_exp must be 0 or 1");
      continue;
    }
    rec.tariffed = *tar;
    rec.importer_exporter = *imp;

    if (!seen.insert(rec.id).second) {
      reject(Errc::DuplicateId, "duplicate id '" + rec.id + "'");
      continue;
    }

    const int last = rec.exit_year.value_or(rec.established_year);
    if (!any) {
      min_year = rec.established_year;
      max_year = last;
      any = true;
    }
    min_year = std::min(min_year, rec.established_year);
    max_year = std::max(max_year, last);
    result.panel.records.push_back(std::move(rec));
  }

  result.panel.panel_start = options.panel_start.value_or(min_year);
  result.panel.panel_end = options.panel_end.value_or(max_year);
  if (result.panel.panel_start > result.panel.panel_end)
    throw Error(Errc::InvalidArgument, "panel_start after panel_end");
  return result;
}

LoadResult load_panel(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  return parse_panel(in, options);
}

void write_panel_csv(std::ostream& out, const PanelDataset& panel) {
  const auto header = ColumnSchema{}.header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : panel.records) {
    out << r.id << ',' << fmt_shortest(r.location.lon) << ','
        << fmt_shortest(r.location.lat) << ',' << r.industry.section << ','
        << r.industry.division << ',' << r.industry.group << ',' << r.industry.class_
        << ',' << r.established_year << ',';
    if (r.exit_year) out << *r.exit_year;
    out << ',' << fmt_shortest(r.registered_capital) << ','
        << fmt_shortest(r.foreign_pct) << ',' << to_string(r.region) << ','
        << to_string(r.legal_form) << ',' << (r.tariffed ? 1 : 0) << ','
        << (r.importer_exporter ? 1 : 0) << '\n';
  }
}

void write_rejects_csv(std::ostream& out, const std::vector<Reject>& rejects) {
  out << "line,reason,message,raw\n";
  for (const auto& r : rejects) {
    out << r.line << ',' << errc_name(r.kind) << ',' << csv_quote(r.message) << ','
        << csv_quote(r.raw) << '\n';
  }
}

std::filesystem::path rejects_path_for(const std::filesystem::path& input) {
  return std::filesystem::path(input.string() + ".rejects.csv");
}

}  // namespace spatial_exit
