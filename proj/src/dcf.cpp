#include "fairval/dcf.hpp"

#include <cmath>

#include <fmt/format.h>

namespace fairval {

double wacc(double equity, double debt, double cost_of_equity, double cost_of_debt, double tax_rate)
{
    const double capital = equity + debt;
    if(!(capital != 0.0) || !std::isfinite(capital)) {
        throw DomainError("WACC undefined for zero total capital");
    }
    return equity / capital * cost_of_equity + debt / capital * cost_of_debt * (1.0 - tax_rate);
}

double cost_of_equity(double beta, double market_return) { return beta * market_return; }

std::vector<ProjectionRow> project_cashflows(double base_revenue, double growth, double workforce_share, int years)
{
    std::vector<ProjectionRow> rows;
    rows.reserve(size_t(std::max(years, 0)));
    for(int t = 0; t < years; ++t) {
        ProjectionRow r;
        r.year_offset = t;
        r.revenue = base_revenue * std::pow(1.0 + growth, t);
        r.workforce_expenses = workforce_share * r.revenue;
        r.net_income = r.revenue - r.workforce_expenses;
        rows.push_back(r);
    }
    return rows;
}

std::vector<ProjectionRow> discount_rows(std::vector<ProjectionRow> rows, double rate)
{
    if(!(rate > -1.0)) {
        throw DomainError("discount rate must exceed -1");
    }
    for(auto &r : rows) {
        r.pv = r.net_income / std::pow(1.0 + rate, r.year_offset);
    }
    return rows;
}

double terminal_value(double final_cash, double growth, double rate)
{
    if(!(rate > growth)) {
        throw DivergenceError(
            fmt::format("discount rate must exceed perpetual growth ({} <= {})", rate, growth));
    }
    return final_cash * (1.0 + growth) / (rate - growth);
}

std::string_view to_string(Verdict v)
{
    switch(v) {
    case Verdict::Overvalued:
        return "Overvalued";
    case Verdict::Undervalued:
        return "Undervalued";
    default:
        return "Fair";
    }
}

Verdict verdict(double fair_price, double market_price, double band)
{
    if(!(fair_price > 0.0)) {
        return market_price > 0.0 ? Verdict::Overvalued : Verdict::Fair;
    }
    const double ratio = market_price / fair_price;
    if(ratio > 1.0 + band) {
        return Verdict::Overvalued;
    }
    if(ratio < 1.0 - band) {
        return Verdict::Undervalued;
    }
    return Verdict::Fair;
}

DcfResult value_asset(const AssetRecord &asset, double base_revenue, const Assumptions &assumptions)
{
    if(!(asset.supply > 0.0)) {
        throw DomainError(fmt::format("{}: supply must be positive", asset.id));
    }
    if(!(base_revenue >= 0.0)) {
        throw DomainError(fmt::format("{}: base revenue must be non-negative", asset.id));
    }
    validate(assumptions);

    DcfResult res;
    res.asset = asset.id;
    res.base_year = int(asset.spot_date.year());
    res.discount_rate = resolve_discount_rate(asset.discounting);
    res.perpetual_growth = assumptions.perpetual_growth;
    if(!(res.discount_rate > res.perpetual_growth)) {
        throw DivergenceError(fmt::format("{}: discount rate must exceed perpetual growth ({} <= {})", asset.id,
                                          res.discount_rate, res.perpetual_growth));
    }

    const int n = assumptions.horizon_years;
    res.rows = discount_rows(
        project_cashflows(base_revenue, assumptions.revenue_growth, asset.workforce_share, n), res.discount_rate);
    res.terminal_value_undiscounted =
        terminal_value(res.rows.back().net_income, res.perpetual_growth, res.discount_rate);
    res.pv_terminal = res.terminal_value_undiscounted / std::pow(1.0 + res.discount_rate, n);

    double sum = 0.0;
    for(const auto &r : res.rows) {
        sum += r.pv;
    }
    res.total_pv = sum + res.pv_terminal;
    res.supply = asset.supply;
    res.fair_price = millions_to_usd(res.total_pv) / asset.supply;
    res.market_price = asset.spot_price;
    res.verdict = verdict(res.fair_price, res.market_price, assumptions.verdict_band);
    res.verdict_flagged = !(res.fair_price > 0.0);
    return res;
}

} // namespace fairval
