#ifndef FAIRVAL_INGEST_HPP
#define FAIRVAL_INGEST_HPP

#include "fairval/core.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fairval {

/// One day of protocol measures, raw USD.
struct DailyTokenMetrics {
    Date date{};
    double price = 0.0;
    double market_cap = 0.0;
    double tvl = 0.0;
    double protocol_revenue = 0.0;
    double treasury = 0.0;

    bool operator==(const DailyTokenMetrics &) const = default;
};

/// One quarter of fundamentals, USD millions.
///
/// For equities `revenue` is revtq (tcoq for banks) and `earnings` is pre-tax
/// income; for tokens both are the summed daily protocol revenue and
/// `net_assets` is the treasury.
struct QuarterlyFundamentals {
    Quarter quarter;
    double revenue = 0.0;
    double earnings = 0.0;
    std::optional<double> total_assets;
    std::optional<double> total_liabilities;
    double net_assets = 0.0;
    double market_cap = 0.0;
    /// Token quarters only: fewer observations than calendar days at a
    /// series edge.
    bool partial = false;

    bool operator==(const QuarterlyFundamentals &) const = default;
};

struct Diagnostic {
    enum class Severity { Note, Rejected };
    long line = 0;
    Severity severity = Severity::Note;
    std::string reason;
};

struct ParseReport {
    long rows_accepted = 0;
    long rows_rejected = 0;
    std::vector<Diagnostic> diagnostics;

    long rows_total() const { return rows_accepted + rows_rejected; }
};

template <typename Row>
struct Parsed {
    std::vector<Row> rows;
    ParseReport report;
};

/// Parses `date,price,market_cap,tvl,protocol_revenue,treasury` (header
/// required, column order free). Rows come back sorted by date; duplicate
/// dates, bad dates, non-numeric and negative values are rejected per row.
/// Throws ParseError when a mandatory column is missing.
Parsed<DailyTokenMetrics> parse_token_daily(std::istream &in, std::string_view asset);

/// Parses `quarter,revenue,pretax_income,total_assets,total_liabilities,market_cap`
/// with amounts in USD millions. net_assets = total_assets - total_liabilities.
Parsed<QuarterlyFundamentals> parse_firm_quarterly(std::istream &in, std::string_view asset);

void write_token_daily(std::ostream &out, const std::vector<DailyTokenMetrics> &rows);
void write_firm_quarterly(std::ostream &out, const std::vector<QuarterlyFundamentals> &rows);

// ---------------------------------------------------------------------------
// registry

struct RegistryRejection {
    std::string asset;
    long line = 0;
    std::string reason;
};

struct Registry {
    std::vector<AssetRecord> assets;
    Assumptions assumptions;
    /// Asset blocks that failed validation; the remaining assets load.
    std::vector<RegistryRejection> rejected;

    const AssetRecord *find(std::string_view id) const;
};

/// Loads the INI-style registry:
///
///     [assumptions]
///     revenue_growth = 0.05
///     [asset UNI]
///     kind = token
///     ...
///
/// Assumption keys not given keep their defaults. An asset whose resolved
/// discount rate does not exceed the perpetual growth rate, or that carries an
/// unknown kind/sector, lands in `rejected`. Syntax errors throw ParseError.
Registry load_registry(std::istream &in);

/// Writes a registry that load_registry reads back to the same records.
void write_registry(std::ostream &out, const Registry &registry);

} // namespace fairval

#endif // FAIRVAL_INGEST_HPP
