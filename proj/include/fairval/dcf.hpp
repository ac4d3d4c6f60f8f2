#ifndef FAIRVAL_DCF_HPP
#define FAIRVAL_DCF_HPP

#include "fairval/core.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace fairval {

/// Weighted average cost of capital:
///   E/(E+D) * R_e + D/(E+D) * R_d * (1 - tax).
/// Throws DomainError when E + D is zero.
double wacc(double equity, double debt, double cost_of_equity, double cost_of_debt, double tax_rate);

/// Cost of equity as beta times the market return (no risk-free leg).
double cost_of_equity(double beta, double market_return);

/// One projected year, USD millions.
struct ProjectionRow {
    int year_offset = 0;
    double revenue = 0.0;
    double workforce_expenses = 0.0;
    double net_income = 0.0;
    double pv = 0.0;
};

/// Revenue compounding at `growth` from `base_revenue` for `years` rows
/// (t = 0 .. years-1), with workforce expenses taken as a share of revenue.
/// `pv` is left at zero.
std::vector<ProjectionRow> project_cashflows(double base_revenue, double growth, double workforce_share, int years);

/// Fills pv_t = net_income_t / (1+r)^t. The first row (t = 0) is undiscounted.
std::vector<ProjectionRow> discount_rows(std::vector<ProjectionRow> rows, double rate);

/// Gordon perpetuity on the final cash flow: C (1+g) / (r-g), undiscounted.
/// Throws DivergenceError unless r > g.
double terminal_value(double final_cash, double growth, double rate);

enum class Verdict { Overvalued, Fair, Undervalued };

std::string_view to_string(Verdict v);

/// Compares market/fair against 1 +- band. A non-positive fair price with a
/// positive market price is Overvalued by convention.
Verdict verdict(double fair_price, double market_price, double band = 0.10);

struct DcfResult {
    std::string asset;
    int base_year = 0;
    std::vector<ProjectionRow> rows;
    double terminal_value_undiscounted = 0.0;
    double pv_terminal = 0.0;
    double total_pv = 0.0;
    double fair_price = 0.0;
    double market_price = 0.0;
    double supply = 0.0;
    Verdict verdict = Verdict::Fair;
    /// Verdict came from the non-positive fair price convention.
    bool verdict_flagged = false;
    double discount_rate = 0.0;
    double perpetual_growth = 0.0;
};

/// Full valuation: projection, per-year discounting and a terminal value
/// discounted by (1+r)^n, one period after the last projected year.
/// fair_price = total_pv [USD millions] * 1e6 / supply.
DcfResult value_asset(const AssetRecord &asset, double base_revenue, const Assumptions &assumptions);

} // namespace fairval

#endif // FAIRVAL_DCF_HPP
