#ifndef FAIRVAL_REPORT_HPP
#define FAIRVAL_REPORT_HPP

#include "fairval/core.hpp"
#include "fairval/dcf.hpp"
#include "fairval/fundamentals.hpp"
#include "fairval/ingest.hpp"
#include "fairval/multiples.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fairval {

enum class Command { Validate, History, Dcf, Multiples, Report };
enum class OutputFormat { Markdown, Csv, Json };

std::optional<Command> parse_command(std::string_view text);
std::optional<OutputFormat> parse_format(std::string_view text);

struct Overrides {
    std::optional<double> revenue_growth;
    std::optional<double> perpetual_growth;
    std::optional<int> horizon_years;
    std::optional<double> verdict_band;
};

struct RunConfig {
    std::filesystem::path registry_path;
    std::filesystem::path data_dir;
    Command command = Command::Report;
    OutputFormat format = OutputFormat::Markdown;
    Overrides overrides;
    /// Empty selects every registry asset.
    std::vector<std::string> assets;
    MarketCapSampling sampling = MarketCapSampling::QuarterEnd;
    /// First quarter shown in history tables.
    Quarter history_from{2020, 4};
};

Assumptions apply_overrides(Assumptions base, const Overrides &o);

// ---------------------------------------------------------------------------
// golden tables

/// One printed DCF table row. Scalar rows (pv_terminal, total_pv,
/// fair_price, market_price) carry a single value.
struct GoldenRow {
    std::string asset;
    std::string row;
    std::vector<double> values;
    std::string note;
};

struct GoldenTables {
    std::vector<GoldenRow> rows;

    const GoldenRow *find(std::string_view asset, std::string_view row) const;
};

/// Reads `asset,row,v0,...,v5,note`. Empty value cells are skipped.
GoldenTables load_golden_tables(std::istream &in);

struct Deviation {
    std::string asset;
    std::string row;
    int column = 0;
    double golden = 0.0;
    double engine = 0.0;
    double tolerance = 0.0;
    bool deviates = false;
};

/// Cell-by-cell comparison of a valuation against its printed table.
std::vector<Deviation> compare_with_golden(const DcfResult &result, AssetKind kind, const GoldenTables &golden);

// ---------------------------------------------------------------------------
// workspace

struct AssetData {
    AssetRecord record;
    std::filesystem::path file;
    std::optional<ParseReport> report;
    std::vector<QuarterlyFundamentals> quarters;
    /// File-level failure (missing file, missing column).
    std::optional<std::string> file_error;
};

/// Registry plus every selected asset's parsed data.
struct Workspace {
    Registry registry;
    Assumptions assumptions;
    std::vector<AssetData> assets;
    std::optional<GoldenTables> golden;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

/// Throws ParseError when the registry itself cannot be read.
Workspace load_workspace(const RunConfig &cfg);

struct CommandOutput {
    std::string text;
    int exit_code = 0;
    /// Long-format plot data (multiples and report commands).
    std::string plot_csv;
    std::vector<std::string> warnings;
};

CommandOutput cmd_validate(const RunConfig &cfg);
CommandOutput cmd_history(const RunConfig &cfg);
CommandOutput cmd_dcf(const RunConfig &cfg);
CommandOutput cmd_multiples(const RunConfig &cfg);
CommandOutput cmd_report(const RunConfig &cfg);
CommandOutput run_command(const RunConfig &cfg);

/// `asset,sector,quarter,metric,ratio,log10_ratio`, one line per valid point.
std::string plot_csv(const std::vector<MultipleSeries> &series);

} // namespace fairval

#endif // FAIRVAL_REPORT_HPP
