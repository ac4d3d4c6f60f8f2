#include "fairval/fundamentals.hpp"

#include <cmath>

#include <fmt/format.h>

namespace fairval {

std::vector<QuarterlyFundamentals> aggregate_token_quarters(std::span<const DailyTokenMetrics> daily,
                                                            MarketCapSampling sampling)
{
    std::vector<QuarterlyFundamentals> out;
    size_t i = 0;
    while(i < daily.size()) {
        const Quarter q = Quarter::of(daily[i].date);
        double revenue = 0.0;
        double cap_sum = 0.0;
        size_t n = 0;
        size_t last = i;
        for(; i < daily.size() && Quarter::of(daily[i].date) == q; ++i) {
            revenue += daily[i].protocol_revenue;
            cap_sum += daily[i].market_cap;
            last = i;
            ++n;
        }
        QuarterlyFundamentals row;
        row.quarter = q;
        row.revenue = usd_to_millions(revenue);
        row.earnings = row.revenue;
        row.net_assets = usd_to_millions(daily[last].treasury);
        row.market_cap = usd_to_millions(sampling == MarketCapSampling::QuarterEnd ? daily[last].market_cap
                                                                                   : cap_sum / double(n));
        const bool first_edge = out.empty() && daily[last - n + 1].date != q.first_day();
        const bool last_edge = i == daily.size() && daily[last].date != q.last_day();
        row.partial = first_edge || last_edge;
        out.push_back(row);
    }
    return out;
}

double qoq_growth(double prev, double curr)
{
    if(prev == 0.0) {
        throw DomainError("growth undefined for a zero previous value");
    }
    return curr / prev - 1.0;
}

double cqgr(double start, double end, long quarters)
{
    if(!(start > 0.0) || !(end > 0.0)) {
        throw DomainError(fmt::format("CQGR needs positive endpoints, got {} and {}", start, end));
    }
    if(quarters < 1) {
        throw DomainError("CQGR needs at least one quarter between endpoints");
    }
    return std::pow(end / start, 1.0 / double(quarters)) - 1.0;
}

EarningsHistory build_history(const AssetRecord &asset, std::span<const QuarterlyFundamentals> quarters)
{
    EarningsHistory h;
    h.asset = asset.id;
    if(quarters.empty()) {
        return h;
    }
    const long first = quarters.front().quarter.ordinal();
    const long last = quarters.back().quarter.ordinal();
    h.rows.reserve(size_t(last - first + 1));
    for(long n = first; n <= last; ++n) {
        h.rows.push_back(HistoryRow{Quarter::from_ordinal(n), std::nullopt, std::nullopt});
    }
    for(const auto &q : quarters) {
        h.rows[size_t(q.quarter.ordinal() - first)].earnings = q.earnings;
    }
    for(size_t i = 1; i < h.rows.size(); ++i) {
        const auto &prev = h.rows[i - 1].earnings;
        const auto &curr = h.rows[i].earnings;
        if(prev && curr && *prev != 0.0) {
            h.rows[i].growth = qoq_growth(*prev, *curr);
        }
    }

    const HistoryRow *start = nullptr;
    const HistoryRow *end = nullptr;
    for(const auto &r : h.rows) {
        if(r.earnings && *r.earnings != 0.0) {
            if(!start) {
                start = &r;
            }
            end = &r;
        }
    }
    if(start && end != start && *start->earnings > 0.0 && *end->earnings > 0.0) {
        h.cqgr = cqgr(*start->earnings, *end->earnings, quarters_between(start->quarter, end->quarter));
        h.cqgr_start = start->quarter;
        h.cqgr_end = end->quarter;
    }
    return h;
}

std::optional<double> annualize_first_half(std::span<const QuarterlyFundamentals> quarters)
{
    if(quarters.empty()) {
        return std::nullopt;
    }
    const int year = quarters.back().quarter.year();
    std::optional<double> q1, q2;
    for(const auto &q : quarters) {
        if(q.quarter == Quarter(year, 1)) {
            q1 = q.earnings;
        } else if(q.quarter == Quarter(year, 2)) {
            q2 = q.earnings;
        }
    }
    if(!q1 || !q2) {
        return std::nullopt;
    }
    return 2.0 * (*q1 + *q2);
}

} // namespace fairval
