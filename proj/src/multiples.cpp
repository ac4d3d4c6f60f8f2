#include "fairval/multiples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace fairval {

std::string_view to_string(Metric m)
{
    return m == Metric::RevenueMultiple ? "market_cap_to_revenue" : "market_cap_to_net_assets";
}

std::optional<double> revenue_multiple(double market_cap, double revenue)
{
    if(!(revenue > 0.0)) {
        return std::nullopt;
    }
    return market_cap / revenue;
}

std::optional<double> net_asset_multiple(double market_cap, double net_assets)
{
    if(net_assets == 0.0 || !std::isfinite(net_assets)) {
        return std::nullopt;
    }
    return market_cap / net_assets;
}

MultipleSeries build_series(const AssetRecord &asset, std::span<const QuarterlyFundamentals> quarters, Metric metric)
{
    MultipleSeries s;
    s.asset = asset.id;
    s.sector = asset.sector;
    s.metric = metric;
    for(const auto &q : quarters) {
        const auto ratio = metric == Metric::RevenueMultiple ? revenue_multiple(q.market_cap, q.revenue)
                                                             : net_asset_multiple(q.market_cap, q.net_assets);
        if(!ratio) {
            s.omitted.emplace_back(q.quarter, metric == Metric::RevenueMultiple ? "non-positive revenue"
                                                                                : "zero net assets");
            continue;
        }
        MultiplePoint p;
        p.quarter = q.quarter;
        p.ratio = *ratio;
        if(*ratio > 0.0) {
            p.log10_ratio = std::log10(*ratio);
        } else {
            p.flagged = true;
        }
        s.points.push_back(p);
    }
    std::sort(s.points.begin(), s.points.end(), [](const auto &a, const auto &b) { return a.quarter < b.quarter; });
    return s;
}

double median(std::vector<double> values)
{
    if(values.empty()) {
        throw DomainError("median of an empty set");
    }
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ComparisonTable compare_sector(std::span<const MultipleSeries> series, SectorPair pair)
{
    std::vector<const MultipleSeries *> members;
    for(const auto &s : series) {
        if(s.sector == pair.defi || s.sector == pair.tradfi) {
            members.push_back(&s);
        }
    }
    if(members.empty()) {
        throw DomainError(fmt::format("no series for {} / {}", to_string(pair.defi), to_string(pair.tradfi)));
    }
    for(const auto *s : members) {
        if(s->metric != members.front()->metric) {
            throw DomainError("compare_sector needs series of a single metric");
        }
    }
    std::sort(members.begin(), members.end(), [](const auto *a, const auto *b) { return a->asset < b->asset; });

    std::set<Quarter> shared;
    for(const auto &p : members.front()->points) {
        shared.insert(p.quarter);
    }
    for(const auto *s : members) {
        std::set<Quarter> mine;
        for(const auto &p : s->points) {
            mine.insert(p.quarter);
        }
        std::set<Quarter> keep;
        std::set_intersection(shared.begin(), shared.end(), mine.begin(), mine.end(),
                              std::inserter(keep, keep.begin()));
        shared = std::move(keep);
    }
    if(shared.empty()) {
        throw DomainError(fmt::format("{} / {}: series share no quarter", to_string(pair.defi),
                                      to_string(pair.tradfi)));
    }

    ComparisonTable t;
    t.pair = pair;
    t.metric = members.front()->metric;
    for(const auto *s : members) {
        t.assets.push_back(s->asset);
        t.sectors.push_back(s->sector);
    }
    for(const auto &q : shared) {
        ComparisonRow row;
        row.quarter = q;
        std::vector<double> defi, tradfi;
        for(const auto *s : members) {
            auto it = std::find_if(s->points.begin(), s->points.end(), [&](const auto &p) { return p.quarter == q; });
            row.ratios.push_back(it->ratio);
            (s->sector == pair.defi ? defi : tradfi).push_back(it->ratio);
        }
        if(!defi.empty()) {
            row.defi_median = median(defi);
        }
        if(!tradfi.empty()) {
            row.tradfi_median = median(tradfi);
        }
        if(row.defi_median && row.tradfi_median && *row.defi_median > 0.0 && *row.tradfi_median > 0.0) {
            row.spread_ratio = *row.defi_median / *row.tradfi_median;
            row.log_spread = std::log10(*row.defi_median) - std::log10(*row.tradfi_median);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace fairval
