#ifndef FAIRVAL_FUNDAMENTALS_HPP
#define FAIRVAL_FUNDAMENTALS_HPP

#include "fairval/core.hpp"
#include "fairval/ingest.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairval {

enum class MarketCapSampling { QuarterEnd, QuarterAverage };

/// Rolls daily token metrics up to calendar quarters. Revenue and earnings
/// are the quarter's summed protocol revenue; net assets are the treasury at
/// the last observation; market cap is the last observation (or the mean over
/// the quarter). Amounts are converted to USD millions. Quarters at either
/// edge of the series that lack observations for some days are flagged
/// partial.
std::vector<QuarterlyFundamentals> aggregate_token_quarters(std::span<const DailyTokenMetrics> daily,
                                                            MarketCapSampling sampling = MarketCapSampling::QuarterEnd);

/// curr / prev - 1. Throws DomainError when prev is zero.
double qoq_growth(double prev, double curr);

/// Compound quarterly growth rate (end / start)^(1/q) - 1.
/// Throws DomainError for non-positive endpoints or q < 1.
double cqgr(double start, double end, long quarters);

struct HistoryRow {
    Quarter quarter;
    std::optional<double> earnings;
    std::optional<double> growth;
};

struct EarningsHistory {
    std::string asset;
    std::vector<HistoryRow> rows;
    std::optional<double> cqgr;
    /// Endpoints used for the CQGR, when present.
    std::optional<Quarter> cqgr_start;
    std::optional<Quarter> cqgr_end;
};

/// Lays out one row per quarter from the first to the last input quarter
/// (gaps stay empty), with quarter-over-quarter growth and the CQGR between
/// the first and last quarters carrying nonzero earnings.
EarningsHistory build_history(const AssetRecord &asset, std::span<const QuarterlyFundamentals> quarters);

/// Annualized revenue from the first half of the latest year in the series:
/// 2 x (Q1 + Q2 earnings). Returns nullopt when either quarter is missing.
std::optional<double> annualize_first_half(std::span<const QuarterlyFundamentals> quarters);

} // namespace fairval

#endif // FAIRVAL_FUNDAMENTALS_HPP
