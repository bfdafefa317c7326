#pragma once

// Fund record ingestion and the grouped summary / composition reports.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "epifin/errors.hpp"
#include "epifin/io.hpp"

namespace epifin::fundstats {

enum class Province { Gauteng, NCape, WCape, KZN, Limpopo, NorthWest, Mpungalanga, FreeState };
enum class Race { Black, White, Other };
enum class Gender { M, F, Unknown };

inline constexpr std::array<Province, 8> kProvinces{Province::Gauteng,  Province::NCape,     Province::WCape,
                                                    Province::KZN,      Province::Limpopo,   Province::NorthWest,
                                                    Province::Mpungalanga, Province::FreeState};

// Spellings kept verbatim, including "Mpungalanga".
inline std::string_view to_string(Province p) {
  constexpr std::array<std::string_view, 8> names{"Gauteng", "N.Cape",     "W.Cape",      "KZN",
                                                  "Limpopo", "North West", "Mpungalanga", "Free State"};
  return names[static_cast<std::size_t>(p)];
}
inline std::string_view to_string(Race r) {
  constexpr std::array<std::string_view, 3> names{"black", "white", "other/unknown"};
  return names[static_cast<std::size_t>(r)];
}
inline std::string_view to_string(Gender g) {
  constexpr std::array<std::string_view, 3> names{"M", "F", "unknown"};
  return names[static_cast<std::size_t>(g)];
}

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline bool parse_province(std::string_view text, Province& out) {
  for (auto p : kProvinces)
    if (text == to_string(p)) {
      out = p;
      return true;
    }
  return false;
}

inline bool parse_race(std::string_view text, Race& out) {
  const std::string t = lower(text);
  if (t == "black") out = Race::Black;
  else if (t == "white") out = Race::White;
  else if (t == "other/unknown" || t == "other" || t == "unknown") out = Race::Other;
  else return false;
  return true;
}

inline bool parse_gender(std::string_view text, Gender& out) {
  const std::string t = lower(text);
  if (t == "m") out = Gender::M;
  else if (t == "f") out = Gender::F;
  else if (t == "unknown") out = Gender::Unknown;
  else return false;
  return true;
}

}  // namespace detail

struct FundRecord {
  std::string fund_id;
  std::string family;
  Province province = Province::Gauteng;
  std::string category;
  Race manager_race = Race::Other;
  Gender manager_gender = Gender::Unknown;
  double assets = 0.0;
  double performance = 0.0;
};

inline constexpr std::array<std::string_view, 8> kColumns{
    "fund_id", "family", "province", "category", "manager_race", "manager_gender", "assets", "performance"};

/// Parses fund CSV text. The header must name exactly the documented
/// columns in order. Lines starting with '#' and blank lines are ignored.
inline std::vector<FundRecord> parse_csv(std::string_view text) {
  std::vector<FundRecord> records;
  bool have_header = false;
  std::size_t row = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const auto trimmed = io::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    const auto fields = io::split_csv_line(line);
    if (!have_header) {
      for (std::size_t k = 0; k < kColumns.size(); ++k) {
        const std::string_view got = k < fields.size() ? io::trim(fields[k]) : std::string_view{"<missing>"};
        if (got != kColumns[k])
          throw SchemaError("column " + std::to_string(k + 1) + ": expected '" + std::string(kColumns[k]) +
                            "', found '" + std::string(got) + "'");
      }
      if (fields.size() != kColumns.size())
        throw SchemaError("header has " + std::to_string(fields.size()) + " columns, expected 8");
      have_header = true;
      continue;
    }

    ++row;
    const auto fail = [&](const std::string& why) {
      throw RowError("row " + std::to_string(row) + ": " + why, row);
    };
    if (fields.size() != kColumns.size())
      fail("has " + std::to_string(fields.size()) + " fields, expected 8");
    FundRecord rec;
    rec.fund_id = std::string(io::trim(fields[0]));
    rec.family = std::string(io::trim(fields[1]));
    if (!detail::parse_province(io::trim(fields[2]), rec.province))
      fail("unknown province '" + fields[2] + "'");
    rec.category = std::string(io::trim(fields[3]));
    if (!detail::parse_race(io::trim(fields[4]), rec.manager_race)) fail("unknown manager_race '" + fields[4] + "'");
    if (!detail::parse_gender(io::trim(fields[5]), rec.manager_gender))
      fail("unknown manager_gender '" + fields[5] + "'");
    if (!io::parse_double(fields[6], rec.assets) || !std::isfinite(rec.assets)) fail("assets is not a number");
    if (rec.assets < 0.0) fail("assets must be >= 0 (got " + fields[6] + ")");
    if (!io::parse_double(fields[7], rec.performance) || !std::isfinite(rec.performance))
      fail("performance is not a number");
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<FundRecord> ingest_csv(const std::filesystem::path& path) {
  return parse_csv(io::read_file(path));
}

// ---------------------------------------------------------------------------

struct SummaryRow {
  std::string group;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single record
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

inline constexpr std::array<std::string_view, 6> kGroupFields{"fund_id",  "family",       "province",
                                                              "category", "manager_race", "manager_gender"};
inline constexpr std::array<std::string_view, 2> kValueFields{"assets", "performance"};

inline std::string group_key(const FundRecord& r, std::string_view field) {
  if (field == "fund_id") return r.fund_id;
  if (field == "family") return r.family;
  if (field == "province") return std::string(to_string(r.province));
  if (field == "category") return r.category;
  if (field == "manager_race") return std::string(to_string(r.manager_race));
  if (field == "manager_gender") return std::string(to_string(r.manager_gender));
  throw UnknownFieldError("cannot group by '" + std::string(field) + "'");
}

inline double value_of(const FundRecord& r, std::string_view field) {
  if (field == "assets") return r.assets;
  if (field == "performance") return r.performance;
  throw UnknownFieldError("'" + std::string(field) + "' is not a numeric field");
}

/// Streaming (Welford) accumulator.
class RunningStats {
 public:
  void push(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    min_ = n_ == 1 ? x : std::min(min_, x);
    max_ = n_ == 1 ? x : std::max(max_, x);
  }
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double sample_std() const noexcept { return n_ < 2 ? 0.0 : std::sqrt(std::max(m2_, 0.0) / static_cast<double>(n_ - 1)); }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

/// Per-group mean / sample std / min / max / count, ordered by group key.
inline std::vector<SummaryRow> summarize(const std::vector<FundRecord>& records, std::string_view group_by,
                                         std::string_view value) {
  if (std::find(kGroupFields.begin(), kGroupFields.end(), group_by) == kGroupFields.end())
    throw UnknownFieldError("cannot group by '" + std::string(group_by) + "'");
  if (std::find(kValueFields.begin(), kValueFields.end(), value) == kValueFields.end())
    throw UnknownFieldError("'" + std::string(value) + "' is not a numeric field");

  // Welford is order-sensitive in the last bits; feed each group in a
  // canonical value order so shuffled inputs give identical output.
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : records) groups[group_key(r, group_by)].push_back(value_of(r, value));

  std::vector<SummaryRow> out;
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());
    RunningStats st;
    for (double v : values) st.push(v);
    out.push_back({key, std::clamp(st.mean(), st.min(), st.max()), st.sample_std(), st.min(), st.max(), st.count()});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct ProvinceRow {
  Province province = Province::Gauteng;
  std::size_t family_count = 0;
  std::size_t fund_count = 0;
  double pct_of_funds = 0.0;
  double pct_of_assets = 0.0;
};

using ProvinceReport = std::vector<ProvinceRow>;

/// All eight provinces, ranked by distinct fund families (descending), ties
/// in canonical province order.
inline ProvinceReport province_report(const std::vector<FundRecord>& records) {
  std::array<std::set<std::string>, 8> families;
  std::array<std::size_t, 8> funds{};
  std::array<double, 8> assets{};
  double total_assets = 0.0;
  for (const auto& r : records) {
    const auto k = static_cast<std::size_t>(r.province);
    families[k].insert(r.family);
    ++funds[k];
    assets[k] += r.assets;
    total_assets += r.assets;
  }
  ProvinceReport rep;
  for (auto p : kProvinces) {
    const auto k = static_cast<std::size_t>(p);
    ProvinceRow row;
    row.province = p;
    row.family_count = families[k].size();
    row.fund_count = funds[k];
    row.pct_of_funds = records.empty() ? 0.0 : 100.0 * static_cast<double>(funds[k]) / static_cast<double>(records.size());
    row.pct_of_assets = total_assets > 0.0 ? 100.0 * assets[k] / total_assets : 0.0;
    rep.push_back(row);
  }
  std::stable_sort(rep.begin(), rep.end(),
                   [](const ProvinceRow& a, const ProvinceRow& b) { return a.family_count > b.family_count; });
  return rep;
}

struct DemographicCell {
  Race race = Race::Other;
  Gender gender = Gender::Unknown;
  std::size_t fund_count = 0;
  double pct_of_funds = 0.0;
  double pct_of_assets = 0.0;
};

/// Composition by (race, gender); only cells that occur are reported.
inline std::vector<DemographicCell> demographics_report(const std::vector<FundRecord>& records) {
  std::map<std::pair<Race, Gender>, std::pair<std::size_t, double>> cells;
  double total_assets = 0.0;
  for (const auto& r : records) {
    auto& c = cells[{r.manager_race, r.manager_gender}];
    ++c.first;
    c.second += r.assets;
    total_assets += r.assets;
  }
  std::vector<DemographicCell> out;
  for (const auto& [key, v] : cells) {
    DemographicCell cell;
    cell.race = key.first;
    cell.gender = key.second;
    cell.fund_count = v.first;
    cell.pct_of_funds = 100.0 * static_cast<double>(v.first) / static_cast<double>(records.size());
    cell.pct_of_assets = total_assets > 0.0 ? 100.0 * v.second / total_assets : 0.0;
    out.push_back(cell);
  }
  return out;
}

}  // namespace epifin::fundstats
