#include "fairval/core.hpp"
#include "fairval/dcf.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace fairval {

namespace {

bool parse_int(std::string_view s, int &out)
{
    if(s.empty()) {
        return false;
    }
    for(char c : s) {
        if(c < '0' || c > '9') {
            return false;
        }
    }
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x < 1.0; }

} // namespace

std::optional<Date> parse_date(std::string_view text)
{
    if(text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int y = 0, m = 0, d = 0;
    if(!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m)
       || !parse_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    Date date{std::chrono::year(y), std::chrono::month(unsigned(m)), std::chrono::day(unsigned(d))};
    if(!date.ok()) {
        return std::nullopt;
    }
    return date;
}

std::string format_date(const Date &d)
{
    return fmt::format("{:04d}-{:02d}-{:02d}", int(d.year()), unsigned(d.month()), unsigned(d.day()));
}

Quarter Quarter::of(const Date &d)
{
    return Quarter(int(d.year()), int((unsigned(d.month()) - 1) / 3 + 1));
}

std::optional<Quarter> Quarter::parse(std::string_view text)
{
    if(text.size() != 6 || (text[4] != 'Q' && text[4] != 'q')) {
        return std::nullopt;
    }
    int y = 0, q = 0;
    if(!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 1), q) || q < 1 || q > 4) {
        return std::nullopt;
    }
    return Quarter(y, q);
}

Date Quarter::first_day() const
{
    return Date{std::chrono::year(year_), std::chrono::month(unsigned(3 * index_ - 2)), std::chrono::day(1)};
}

Date Quarter::last_day() const
{
    return Date{std::chrono::year_month_day_last{
        std::chrono::year(year_), std::chrono::month_day_last{std::chrono::month(unsigned(3 * index_))}}};
}

std::string Quarter::str() const { return fmt::format("{}Q{}", year_, index_); }

std::string Quarter::label() const { return fmt::format("Q{}'{:02d}", index_, ((year_ % 100) + 100) % 100); }

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<Sector, std::string_view>, 6> sector_names{{
    {Sector::DEX, "DEX"},
    {Sector::PLF, "PLF"},
    {Sector::YieldAggregator, "YieldAggregator"},
    {Sector::Exchange, "Exchange"},
    {Sector::Bank, "Bank"},
    {Sector::AssetManager, "AssetManager"},
}};

bool iequals(std::string_view a, std::string_view b)
{
    if(a.size() != b.size()) {
        return false;
    }
    for(size_t i = 0; i < a.size(); ++i) {
        auto lower = [](char c) { return c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c; };
        if(lower(a[i]) != lower(b[i])) {
            return false;
        }
    }
    return true;
}

} // namespace

std::string_view to_string(AssetKind k) { return k == AssetKind::Token ? "Token" : "Equity"; }

std::string_view to_string(Sector s)
{
    for(const auto &[sector, name] : sector_names) {
        if(sector == s) {
            return name;
        }
    }
    return "?";
}

std::optional<AssetKind> parse_kind(std::string_view text)
{
    if(iequals(text, "token")) {
        return AssetKind::Token;
    }
    if(iequals(text, "equity")) {
        return AssetKind::Equity;
    }
    return std::nullopt;
}

std::optional<Sector> parse_sector(std::string_view text)
{
    for(const auto &[sector, name] : sector_names) {
        if(iequals(text, name)) {
            return sector;
        }
    }
    return std::nullopt;
}

AssetKind kind_of(Sector s)
{
    switch(s) {
    case Sector::DEX:
    case Sector::PLF:
    case Sector::YieldAggregator:
        return AssetKind::Token;
    default:
        return AssetKind::Equity;
    }
}

SectorPair pair_of(Sector s)
{
    switch(s) {
    case Sector::DEX:
    case Sector::Exchange:
        return {Sector::DEX, Sector::Exchange};
    case Sector::PLF:
    case Sector::Bank:
        return {Sector::PLF, Sector::Bank};
    default:
        return {Sector::YieldAggregator, Sector::AssetManager};
    }
}

// ---------------------------------------------------------------------------

void validate(const DiscountConfig &cfg)
{
    if(const auto *f = std::get_if<FixedRate>(&cfg)) {
        if(!(std::isfinite(f->rate) && f->rate > 0.0 && f->rate < 1.0)) {
            throw DomainError(fmt::format("fixed discount rate {} outside (0, 1)", f->rate));
        }
        return;
    }
    const auto &w = std::get<WaccInputs>(cfg);
    if(!(std::isfinite(w.beta) && w.beta >= 0.0)) {
        throw DomainError("beta must be non-negative");
    }
    if(!in_unit_interval(w.market_return) || !in_unit_interval(w.cost_of_debt)
       || !in_unit_interval(w.tax_rate)) {
        throw DomainError("market return, cost of debt and tax rate must lie in [0, 1)");
    }
    if(!(w.equity >= 0.0 && w.debt >= 0.0 && w.equity + w.debt > 0.0)) {
        throw DomainError("equity and debt must be non-negative with a positive sum");
    }
}

double resolve_discount_rate(const DiscountConfig &cfg)
{
    validate(cfg);
    if(const auto *f = std::get_if<FixedRate>(&cfg)) {
        return f->rate;
    }
    const auto &w = std::get<WaccInputs>(cfg);
    return wacc(w.equity, w.debt, cost_of_equity(w.beta, w.market_return), w.cost_of_debt, w.tax_rate);
}

void validate(const Assumptions &a)
{
    if(!(std::isfinite(a.revenue_growth) && a.revenue_growth > -1.0)) {
        throw DomainError("revenue growth must exceed -1");
    }
    if(!(std::isfinite(a.perpetual_growth) && a.perpetual_growth >= 0.0 && a.perpetual_growth < 1.0)) {
        throw DomainError("perpetual growth must lie in [0, 1)");
    }
    if(a.horizon_years < 1) {
        throw DomainError("horizon must be at least one year");
    }
    if(!in_unit_interval(a.market_return)) {
        throw DomainError("market return must lie in [0, 1)");
    }
    if(!in_unit_interval(a.verdict_band)) {
        throw DomainError("verdict band must lie in [0, 1)");
    }
}

void validate(const AssetRecord &a)
{
    if(a.id.empty()) {
        throw DomainError("asset id is empty");
    }
    if(!(std::isfinite(a.supply) && a.supply > 0.0)) {
        throw DomainError("supply must be strictly positive");
    }
    if(!(std::isfinite(a.spot_price) && a.spot_price >= 0.0)) {
        throw DomainError("spot price must be non-negative");
    }
    if(kind_of(a.sector) != a.kind) {
        throw DomainError(fmt::format("sector {} does not match kind {}", to_string(a.sector), to_string(a.kind)));
    }
    if(!in_unit_interval(a.workforce_share)) {
        throw DomainError("workforce share must lie in [0, 1)");
    }
    if(a.base_revenue && !(std::isfinite(*a.base_revenue) && *a.base_revenue >= 0.0)) {
        throw DomainError("base revenue must be non-negative");
    }
    validate(a.discounting);
}

std::string default_data_file(const AssetRecord &a)
{
    if(!a.data_file.empty()) {
        return a.data_file;
    }
    return a.id + (a.kind == AssetKind::Token ? ".daily.csv" : ".quarterly.csv");
}

} // namespace fairval
