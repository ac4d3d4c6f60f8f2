#include "fairval/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "text.hpp"

namespace fairval {

namespace {

/// Header-driven CSV reader shared by both file kinds.
class CsvTable {
public:
    CsvTable(std::istream &in, std::string_view what, std::span<const std::string_view> required)
        : in_(in)
    {
        std::string line;
        while(std::getline(in_, line)) {
            ++line_no_;
            auto t = detail::trim(line);
            if(t.empty() || t.front() == '#') {
                continue;
            }
            auto names = detail::split(t, ',');
            for(size_t i = 0; i < names.size(); ++i) {
                columns_[detail::lower(detail::trim(names[i]))] = i;
            }
            width_ = names.size();
            break;
        }
        if(width_ == 0) {
            throw ParseError(fmt::format("{}: missing header row", what));
        }
        for(auto name : required) {
            if(!columns_.contains(std::string(name))) {
                throw ParseError(fmt::format("{}: missing mandatory column '{}'", what, name));
            }
        }
    }

    /// Next non-blank data row; false at end of stream.
    bool next(std::vector<std::string_view> &fields, long &line_no)
    {
        while(std::getline(in_, current_)) {
            ++line_no_;
            auto t = detail::trim(current_);
            if(t.empty() || t.front() == '#') {
                continue;
            }
            fields = detail::split(t, ',');
            for(auto &f : fields) {
                f = detail::trim(f);
            }
            line_no = line_no_;
            return true;
        }
        return false;
    }

    size_t width() const { return width_; }
    size_t at(std::string_view name) const { return columns_.at(std::string(name)); }

private:
    std::istream &in_;
    std::string current_;
    std::map<std::string, size_t> columns_;
    size_t width_ = 0;
    long line_no_ = 0;
};

std::optional<double> to_number(std::string_view s)
{
    if(s.empty()) {
        return std::nullopt;
    }
    if(s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if(ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

void reject(ParseReport &report, long line, std::string reason)
{
    ++report.rows_rejected;
    report.diagnostics.push_back({line, Diagnostic::Severity::Rejected, std::move(reason)});
}

void note(ParseReport &report, long line, std::string reason)
{
    report.diagnostics.push_back({line, Diagnostic::Severity::Note, std::move(reason)});
}

void sort_diagnostics(ParseReport &report)
{
    std::stable_sort(report.diagnostics.begin(), report.diagnostics.end(),
                     [](const Diagnostic &a, const Diagnostic &b) { return a.line < b.line; });
}

constexpr std::array<std::string_view, 6> token_columns{"date", "price", "market_cap", "tvl", "protocol_revenue",
                                                       "treasury"};
constexpr std::array<std::string_view, 6> firm_columns{"quarter", "revenue", "pretax_income", "total_assets",
                                                      "total_liabilities", "market_cap"};

} // namespace

Parsed<DailyTokenMetrics> parse_token_daily(std::istream &in, std::string_view asset)
{
    CsvTable table(in, asset, token_columns);
    std::array<size_t, 6> col{};
    for(size_t i = 0; i < col.size(); ++i) {
        col[i] = table.at(token_columns[i]);
    }

    Parsed<DailyTokenMetrics> out;
    std::map<Date, long> seen;
    std::vector<std::pair<DailyTokenMetrics, long>> rows;
    std::vector<std::string_view> f;
    long line = 0;
    while(table.next(f, line)) {
        if(f.size() != table.width()) {
            reject(out.report, line, fmt::format("expected {} fields, found {}", table.width(), f.size()));
            continue;
        }
        auto date = parse_date(f[col[0]]);
        if(!date) {
            reject(out.report, line, fmt::format("invalid date '{}'", f[col[0]]));
            continue;
        }
        std::array<double, 5> v{};
        bool ok = true;
        for(size_t i = 1; i < col.size(); ++i) {
            auto x = to_number(f[col[i]]);
            if(!x) {
                reject(out.report, line, fmt::format("non-numeric {} '{}'", token_columns[i], f[col[i]]));
                ok = false;
                break;
            }
            if(*x < 0.0) {
                reject(out.report, line, fmt::format("negative {}", token_columns[i]));
                ok = false;
                break;
            }
            v[i - 1] = *x;
        }
        if(!ok) {
            continue;
        }
        if(auto it = seen.find(*date); it != seen.end()) {
            reject(out.report, line, fmt::format("duplicate date {} (first on line {})", format_date(*date), it->second));
            continue;
        }
        seen.emplace(*date, line);
        rows.push_back({DailyTokenMetrics{*date, v[0], v[1], v[2], v[3], v[4]}, line});
        ++out.report.rows_accepted;
    }

    std::stable_sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) { return a.first.date < b.first.date; });
    out.rows.reserve(rows.size());
    for(size_t i = 0; i < rows.size(); ++i) {
        if(i > 0) {
            auto gap = (std::chrono::sys_days(rows[i].first.date) - std::chrono::sys_days(rows[i - 1].first.date)).count();
            if(gap > 1) {
                note(out.report, rows[i].second,
                     fmt::format("gap of {} missing day(s) before {}", gap - 1, format_date(rows[i].first.date)));
            }
        }
        out.rows.push_back(rows[i].first);
    }
    sort_diagnostics(out.report);
    return out;
}

Parsed<QuarterlyFundamentals> parse_firm_quarterly(std::istream &in, std::string_view asset)
{
    CsvTable table(in, asset, firm_columns);
    std::array<size_t, 6> col{};
    for(size_t i = 0; i < col.size(); ++i) {
        col[i] = table.at(firm_columns[i]);
    }

    Parsed<QuarterlyFundamentals> out;
    std::set<Quarter> seen;
    std::vector<std::string_view> f;
    long line = 0;
    while(table.next(f, line)) {
        if(f.size() != table.width()) {
            reject(out.report, line, fmt::format("expected {} fields, found {}", table.width(), f.size()));
            continue;
        }
        auto q = Quarter::parse(f[col[0]]);
        if(!q) {
            reject(out.report, line, fmt::format("invalid quarter '{}'", f[col[0]]));
            continue;
        }
        std::array<double, 5> v{};
        bool ok = true;
        for(size_t i = 1; i < col.size(); ++i) {
            auto x = to_number(f[col[i]]);
            if(!x) {
                reject(out.report, line, fmt::format("non-numeric {} '{}'", firm_columns[i], f[col[i]]));
                ok = false;
                break;
            }
            // pre-tax income is the only column allowed to go negative
            if(*x < 0.0 && firm_columns[i] != "pretax_income") {
                reject(out.report, line, fmt::format("negative {}", firm_columns[i]));
                ok = false;
                break;
            }
            v[i - 1] = *x;
        }
        if(!ok) {
            continue;
        }
        if(!seen.insert(*q).second) {
            reject(out.report, line, fmt::format("duplicate quarter {}", q->str()));
            continue;
        }
        QuarterlyFundamentals row;
        row.quarter = *q;
        row.revenue = v[0];
        row.earnings = v[1];
        row.total_assets = v[2];
        row.total_liabilities = v[3];
        row.net_assets = v[2] - v[3];
        row.market_cap = v[4];
        if(row.net_assets < 0.0) {
            note(out.report, line, fmt::format("{}: total liabilities exceed total assets", q->str()));
        }
        out.rows.push_back(row);
        ++out.report.rows_accepted;
    }
    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [](const auto &a, const auto &b) { return a.quarter < b.quarter; });
    sort_diagnostics(out.report);
    return out;
}

void write_token_daily(std::ostream &out, const std::vector<DailyTokenMetrics> &rows)
{
    out << "date,price,market_cap,tvl,protocol_revenue,treasury\n";
    for(const auto &r : rows) {
        out << fmt::format("{},{},{},{},{},{}\n", format_date(r.date), r.price, r.market_cap, r.tvl,
                           r.protocol_revenue, r.treasury);
    }
}

void write_firm_quarterly(std::ostream &out, const std::vector<QuarterlyFundamentals> &rows)
{
    out << "quarter,revenue,pretax_income,total_assets,total_liabilities,market_cap\n";
    for(const auto &r : rows) {
        double assets = r.total_assets.value_or(r.net_assets);
        double liabilities = r.total_liabilities.value_or(0.0);
        out << fmt::format("{},{},{},{},{},{}\n", r.quarter.str(), r.revenue, r.earnings, assets, liabilities,
                           r.market_cap);
    }
}

} // namespace fairval
