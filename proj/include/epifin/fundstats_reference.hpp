#pragma once

// Reference summary tables for a 2018 South African fund sample, shipped
// for side-by-side display only. The raw data behind them is not
// available, and the province table is not internally consistent (its
// percentage columns do not follow from its own counts), so none of these
// numbers is ever used as an expected value.

#include <array>
#include <string_view>

namespace epifin::fundstats::reference {

struct CategoryRow {
  std::string_view sub_category;
  double mean, std, min, max;
};

inline constexpr std::array<CategoryRow, 8> kCategorySummary{{
    {"Top 200 stocks, eight provinces", 0.310, 0.750, 0, 200},
    {"Simple specification", 0.209, 0.076, 0, 150},
    {"Excluding large families (20% of a city)", 0.416, 0.509, 1, 135},
    {"Excluding local stocks", 0.227, 0.480, 0, 120},
    {"Extensive margin", 0.311, 0.987, 1, 90},
    {"Intensive margin only", 0.746, 0.452, 1, 70},
    {"Low book-to-market stocks", 0.338, 0.742, 0, 170},
    {"High book-to-market stocks", 0.103, 0.356, 0, 60},
}};

struct ProvinceRow {
  int rank;
  std::string_view province;
  int families, funds;
  double pct_funds, pct_assets;
};

inline constexpr std::array<ProvinceRow, 8> kProvinceComposition{{
    {1, "Gauteng", 106, 211, 17.8, 11.9},
    {2, "N.Cape", 32, 24, 10.8, 9.1},
    {3, "W.Cape", 24, 51, 16.0, 5.4},
    {4, "KZN", 33, 75, 7.8, 7.3},
    {5, "Limpopo", 17, 34, 3.1, 0.3},
    {6, "North West", 46, 61, 5.9, 1.5},
    {7, "Mpungalanga", 18, 53, 3.7, 1.5},
    {8, "Free State", 20, 47, 3.1, 2.8},
}};

struct DemographicRow {
  std::string_view category, race, gender;
  double pct_funds, pct_assets;
};

inline constexpr std::array<DemographicRow, 8> kManagerComposition{{
    {"A", "White", "M", 17.8, 11.9},
    {"B", "White", "M", 10.8, 9.1},
    {"C", "Black", "M", 16.0, 5.4},
    {"D", "White", "F", 7.8, 7.3},
    {"E", "White", "M", 3.1, 0.3},
    {"F", "White", "F", 5.9, 1.5},
    {"G", "Black", "F", 3.7, 1.5},
    {"H", "White", "M", 3.1, 2.8},
}};

}  // namespace epifin::fundstats::reference
