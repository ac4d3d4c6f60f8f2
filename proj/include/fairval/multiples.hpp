#ifndef FAIRVAL_MULTIPLES_HPP
#define FAIRVAL_MULTIPLES_HPP

#include "fairval/core.hpp"
#include "fairval/ingest.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairval {

enum class Metric { RevenueMultiple, NetAssetMultiple };

std::string_view to_string(Metric m);

/// market_cap / revenue; nullopt unless revenue > 0.
std::optional<double> revenue_multiple(double market_cap, double revenue);

/// market_cap / net_assets; nullopt for zero net assets. Negative net assets
/// give a (negative) ratio.
std::optional<double> net_asset_multiple(double market_cap, double net_assets);

struct MultiplePoint {
    Quarter quarter;
    double ratio = 0.0;
    /// Absent for non-positive ratios.
    std::optional<double> log10_ratio;
    bool flagged = false;
};

struct MultipleSeries {
    std::string asset;
    Sector sector = Sector::DEX;
    Metric metric = Metric::RevenueMultiple;
    std::vector<MultiplePoint> points;
    /// Quarters dropped because the denominator was invalid.
    std::vector<std::pair<Quarter, std::string>> omitted;
};

MultipleSeries build_series(const AssetRecord &asset, std::span<const QuarterlyFundamentals> quarters, Metric metric);

struct ComparisonRow {
    Quarter quarter;
    /// One entry per ComparisonTable::assets.
    std::vector<double> ratios;
    std::optional<double> defi_median;
    std::optional<double> tradfi_median;
    /// defi_median / tradfi_median, when both are positive.
    std::optional<double> spread_ratio;
    /// log10(defi_median) - log10(tradfi_median).
    std::optional<double> log_spread;
};

struct ComparisonTable {
    SectorPair pair;
    Metric metric = Metric::RevenueMultiple;
    /// Participating assets, sorted by id.
    std::vector<std::string> assets;
    std::vector<Sector> sectors;
    std::vector<ComparisonRow> rows;
};

/// Joins the series belonging to either side of `pair` on the quarters they
/// all share and summarizes each quarter with per-side medians. Throws
/// DomainError on mixed metrics or an empty shared quarter range.
ComparisonTable compare_sector(std::span<const MultipleSeries> series, SectorPair pair);

double median(std::vector<double> values);

} // namespace fairval

#endif // FAIRVAL_MULTIPLES_HPP
