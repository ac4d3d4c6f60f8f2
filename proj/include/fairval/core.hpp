#ifndef FAIRVAL_CORE_HPP
#define FAIRVAL_CORE_HPP

#include <chrono>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace fairval {

// ---------------------------------------------------------------------------
// errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside an operation's mathematical domain (zero capital, prev = 0,
/// non-positive CQGR endpoint).
struct DomainError : Error {
    using Error::Error;
};

/// Discount rate does not exceed the perpetual growth rate.
struct DivergenceError : Error {
    using Error::Error;
};

/// File-level parse failure (missing column, malformed registry syntax).
struct ParseError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// calendar

using Date = std::chrono::year_month_day;

/// Parses strict ISO-8601 `YYYY-MM-DD`. Returns nullopt for anything else,
/// including calendar-invalid dates such as 2021-13-01 or 2021-02-30.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date &d);

/// Calendar quarter. Fiscal quarters are taken to be calendar quarters.
class Quarter {
public:
    constexpr Quarter() = default;
    constexpr Quarter(int year, int index) : year_(year), index_(index)
    {
        if(index < 1 || index > 4) {
            throw DomainError("quarter index must be 1..4");
        }
    }

    static Quarter of(const Date &d);
    /// `YYYYQn`, case-insensitive on the Q.
    static std::optional<Quarter> parse(std::string_view text);

    constexpr int year() const { return year_; }
    constexpr int index() const { return index_; }

    /// Absolute quarter ordinal; differences give quarter distances.
    constexpr long ordinal() const { return long(year_) * 4 + (index_ - 1); }
    static constexpr Quarter from_ordinal(long n)
    {
        long y = n >= 0 ? n / 4 : (n - 3) / 4;
        return Quarter(int(y), int(n - y * 4) + 1);
    }

    Quarter next() const { return from_ordinal(ordinal() + 1); }
    Date first_day() const;
    Date last_day() const;

    std::string str() const;   // 2021Q3
    std::string label() const; // Q3'21

    friend constexpr auto operator<=>(const Quarter &, const Quarter &) = default;

private:
    int year_ = 1970;
    int index_ = 1;
};

/// Number of quarters from `start` to `end` (end - start).
constexpr long quarters_between(const Quarter &start, const Quarter &end)
{
    return end.ordinal() - start.ordinal();
}

// ---------------------------------------------------------------------------
// money

/// Explicit USD scale conversions. Fundamentals are carried in USD millions,
/// prices and per-unit values in raw USD.
constexpr double usd_to_millions(double usd) { return usd / 1e6; }
constexpr double millions_to_usd(double millions) { return millions * 1e6; }

// ---------------------------------------------------------------------------
// assets

enum class AssetKind { Token, Equity };
enum class Sector { DEX, PLF, YieldAggregator, Exchange, Bank, AssetManager };

std::string_view to_string(AssetKind k);
std::string_view to_string(Sector s);
std::optional<AssetKind> parse_kind(std::string_view text);
std::optional<Sector> parse_sector(std::string_view text);

/// Token sectors are DEX, PLF and yield aggregators; the rest are equities.
AssetKind kind_of(Sector s);

/// DeFi sector and its TradFi analogue.
struct SectorPair {
    Sector defi;
    Sector tradfi;
};
SectorPair pair_of(Sector s);

struct FixedRate {
    double rate = 0.25;
};

struct WaccInputs {
    double beta = 1.0;
    double market_return = 0.10;
    double cost_of_debt = 0.0;
    double tax_rate = 0.0;
    double equity = 1.0;
    double debt = 0.0;
};

using DiscountConfig = std::variant<FixedRate, WaccInputs>;

/// Throws DomainError when the configuration violates its own invariants.
void validate(const DiscountConfig &cfg);

/// Annual discount rate: the fixed rate as given, or the weighted average
/// cost of capital with cost of equity = beta * market return.
double resolve_discount_rate(const DiscountConfig &cfg);

struct Assumptions {
    double revenue_growth = 0.05;
    double perpetual_growth = 0.0239;
    int horizon_years = 6;
    double market_return = 0.10;
    /// Half-width of the Fair band around market/fair = 1.
    double verdict_band = 0.10;
};

void validate(const Assumptions &a);

constexpr double default_workforce_share(AssetKind k)
{
    return k == AssetKind::Token ? 0.20 : 0.30;
}

struct AssetRecord {
    std::string id;
    std::string name;
    AssetKind kind = AssetKind::Token;
    Sector sector = Sector::DEX;
    double supply = 1.0;
    double spot_price = 0.0;
    Date spot_date{};
    DiscountConfig discounting = FixedRate{};
    double workforce_share = 0.20;
    /// First projection year revenue in USD millions. When absent the
    /// valuation annualizes the latest first half-year of earnings.
    std::optional<double> base_revenue;
    /// Data file name relative to the data directory; empty means the
    /// `<id>.daily.csv` / `<id>.quarterly.csv` convention.
    std::string data_file;
};

/// Throws DomainError naming the broken invariant.
void validate(const AssetRecord &a);

std::string default_data_file(const AssetRecord &a);

} // namespace fairval

#endif // FAIRVAL_CORE_HPP
