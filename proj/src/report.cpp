#include "fairval/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "text.hpp"

namespace fairval {

using json = nlohmann::ordered_json;

std::optional<Command> parse_command(std::string_view text)
{
    if(text == "validate") return Command::Validate;
    if(text == "history") return Command::History;
    if(text == "dcf") return Command::Dcf;
    if(text == "multiples") return Command::Multiples;
    if(text == "report") return Command::Report;
    return std::nullopt;
}

std::optional<OutputFormat> parse_format(std::string_view text)
{
    if(text == "markdown" || text == "md") return OutputFormat::Markdown;
    if(text == "csv") return OutputFormat::Csv;
    if(text == "json") return OutputFormat::Json;
    return std::nullopt;
}

Assumptions apply_overrides(Assumptions base, const Overrides &o)
{
    if(o.revenue_growth) base.revenue_growth = *o.revenue_growth;
    if(o.perpetual_growth) base.perpetual_growth = *o.perpetual_growth;
    if(o.horizon_years) base.horizon_years = *o.horizon_years;
    if(o.verdict_band) base.verdict_band = *o.verdict_band;
    validate(base);
    return base;
}

// ---------------------------------------------------------------------------
// golden tables

const GoldenRow *GoldenTables::find(std::string_view asset, std::string_view row) const
{
    for(const auto &r : rows) {
        if(r.asset == asset && r.row == row) {
            return &r;
        }
    }
    return nullptr;
}

GoldenTables load_golden_tables(std::istream &in)
{
    GoldenTables g;
    std::string line;
    long line_no = 0;
    bool header = true;
    while(std::getline(in, line)) {
        ++line_no;
        auto t = detail::trim(line);
        if(t.empty() || t.front() == '#') {
            continue;
        }
        if(header) {
            header = false;
            continue;
        }
        auto f = detail::split(t, ',');
        if(f.size() < 3) {
            throw ParseError(fmt::format("golden tables line {}: too few fields", line_no));
        }
        GoldenRow row;
        row.asset = std::string(detail::trim(f[0]));
        row.row = std::string(detail::trim(f[1]));
        size_t i = 2;
        for(; i < f.size() && i < 8; ++i) {
            auto cell = detail::trim(f[i]);
            if(cell.empty()) {
                continue;
            }
            double v = 0.0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if(ec != std::errc() || p != cell.data() + cell.size()) {
                throw ParseError(fmt::format("golden tables line {}: bad number '{}'", line_no, cell));
            }
            row.values.push_back(v);
        }
        for(; i < f.size(); ++i) {
            if(!row.note.empty()) {
                row.note += ',';
            }
            row.note += std::string(f[i]);
        }
        row.note = std::string(detail::trim(row.note));
        g.rows.push_back(std::move(row));
    }
    return g;
}

namespace {

double row_tolerance(std::string_view row, AssetKind kind)
{
    if(kind == AssetKind::Token) {
        return 0.01;
    }
    if(row == "revenue" || row == "workforce_expenses" || row == "net_income") {
        return 0.1;
    }
    if(row == "fair_price" || row == "market_price") {
        return 0.01;
    }
    return 0.5;
}

std::vector<double> engine_row(const DcfResult &r, std::string_view row)
{
    std::vector<double> v;
    for(const auto &p : r.rows) {
        if(row == "revenue") v.push_back(p.revenue);
        else if(row == "workforce_expenses") v.push_back(p.workforce_expenses);
        else if(row == "net_income") v.push_back(p.net_income);
        else if(row == "pv") v.push_back(p.pv);
    }
    if(row == "pv_terminal") v.push_back(r.pv_terminal);
    else if(row == "total_pv") v.push_back(r.total_pv);
    else if(row == "fair_price") v.push_back(r.fair_price);
    else if(row == "market_price") v.push_back(r.market_price);
    return v;
}

} // namespace

std::vector<Deviation> compare_with_golden(const DcfResult &result, AssetKind kind, const GoldenTables &golden)
{
    std::vector<Deviation> out;
    for(const auto &g : golden.rows) {
        if(g.asset != result.asset) {
            continue;
        }
        const auto engine = engine_row(result, g.row);
        const double tol = row_tolerance(g.row, kind);
        for(size_t i = 0; i < g.values.size() && i < engine.size(); ++i) {
            Deviation d{g.asset, g.row, int(i), g.values[i], engine[i], tol, false};
            d.deviates = std::abs(d.engine - d.golden) > tol + 1e-9;
            out.push_back(d);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// workspace

namespace {

std::vector<std::string> split_assets(const std::vector<std::string> &ids)
{
    std::vector<std::string> out;
    for(const auto &id : ids) {
        for(auto part : detail::split(id, ',')) {
            auto t = detail::trim(part);
            if(!t.empty()) {
                out.emplace_back(t);
            }
        }
    }
    return out;
}

void load_asset_data(AssetData &d, const std::filesystem::path &dir, MarketCapSampling sampling)
{
    d.file = dir / default_data_file(d.record);
    std::ifstream in(d.file);
    if(!in) {
        d.file_error = fmt::format("cannot open {}", d.file.string());
        return;
    }
    try {
        if(d.record.kind == AssetKind::Token) {
            auto parsed = parse_token_daily(in, d.record.id);
            d.report = std::move(parsed.report);
            d.quarters = aggregate_token_quarters(parsed.rows, sampling);
        } else {
            auto parsed = parse_firm_quarterly(in, d.record.id);
            d.report = std::move(parsed.report);
            d.quarters = std::move(parsed.rows);
        }
    } catch(const ParseError &e) {
        d.file_error = fmt::format("{}: {}", d.file.string(), e.what());
    }
}

} // namespace

Workspace load_workspace(const RunConfig &cfg)
{
    Workspace ws;
    std::ifstream reg(cfg.registry_path);
    if(!reg) {
        throw ParseError(fmt::format("cannot open registry {}", cfg.registry_path.string()));
    }
    ws.registry = load_registry(reg);
    ws.assumptions = apply_overrides(ws.registry.assumptions, cfg.overrides);
    for(const auto &r : ws.registry.rejected) {
        ws.errors.push_back(fmt::format("registry: asset {} (line {}) rejected: {}", r.asset, r.line, r.reason));
    }

    const auto wanted = split_assets(cfg.assets);
    for(const auto &id : wanted) {
        if(!ws.registry.find(id)) {
            bool rejected = std::any_of(ws.registry.rejected.begin(), ws.registry.rejected.end(),
                                        [&](const auto &r) { return r.asset == id; });
            if(!rejected) {
                ws.errors.push_back(fmt::format("unknown asset {}", id));
            }
        }
    }
    for(const auto &rec : ws.registry.assets) {
        if(!wanted.empty() && std::find(wanted.begin(), wanted.end(), rec.id) == wanted.end()) {
            continue;
        }
        AssetData d;
        d.record = rec;
        load_asset_data(d, cfg.data_dir, cfg.sampling);
        if(d.file_error) {
            ws.errors.push_back(*d.file_error);
        }
        ws.assets.push_back(std::move(d));
    }

    std::ifstream golden(cfg.data_dir / "golden_npv.csv");
    if(golden) {
        ws.golden = load_golden_tables(golden);
    }
    return ws;
}

// ---------------------------------------------------------------------------
// analysis

namespace {

struct DcfOutcome {
    const AssetData *asset = nullptr;
    std::optional<DcfResult> result;
    std::string error;
    std::string base_revenue_source;
};

struct Analysis {
    std::vector<std::pair<const AssetData *, EarningsHistory>> histories;
    std::vector<DcfOutcome> valuations;
    std::vector<MultipleSeries> series;
    std::vector<ComparisonTable> comparisons;
    std::vector<Deviation> deviations;
    std::set<std::string> failed;
};

void run_history(const Workspace &ws, Analysis &a, std::vector<std::string> &warnings)
{
    for(const auto &d : ws.assets) {
        if(d.quarters.empty()) {
            warnings.push_back(fmt::format("{}: no quarterly data, omitted from history", d.record.id));
            a.failed.insert(d.record.id);
            continue;
        }
        a.histories.emplace_back(&d, build_history(d.record, d.quarters));
    }
}

void run_dcf(const Workspace &ws, Analysis &a, std::vector<std::string> &warnings)
{
    for(const auto &d : ws.assets) {
        DcfOutcome o;
        o.asset = &d;
        try {
            double base = 0.0;
            if(d.record.base_revenue) {
                base = *d.record.base_revenue;
                o.base_revenue_source = "registry";
            } else if(auto annual = annualize_first_half(d.quarters)) {
                base = *annual;
                o.base_revenue_source = "2 x first-half earnings";
            } else {
                throw DomainError("no base revenue in registry and no first-half earnings to annualize");
            }
            o.result = value_asset(d.record, base, ws.assumptions);
        } catch(const Error &e) {
            o.error = e.what();
            warnings.push_back(fmt::format("{}: valuation failed: {}", d.record.id, e.what()));
            a.failed.insert(d.record.id);
        }
        if(o.result && ws.golden) {
            auto dev = compare_with_golden(*o.result, d.record.kind, *ws.golden);
            a.deviations.insert(a.deviations.end(), dev.begin(), dev.end());
        }
        a.valuations.push_back(std::move(o));
    }
}

void run_multiples(const Workspace &ws, Analysis &a, std::vector<std::string> &warnings)
{
    for(Metric metric : {Metric::RevenueMultiple, Metric::NetAssetMultiple}) {
        for(const auto &d : ws.assets) {
            auto s = build_series(d.record, d.quarters, metric);
            for(const auto &[q, why] : s.omitted) {
                warnings.push_back(fmt::format("{}: {} {} omitted ({})", d.record.id, to_string(metric), q.str(), why));
            }
            if(s.points.empty()) {
                warnings.push_back(fmt::format("{}: no valid {} points, omitted", d.record.id, to_string(metric)));
                continue;
            }
            a.series.push_back(std::move(s));
        }
    }
    for(const auto &d : ws.assets) {
        bool any = std::any_of(a.series.begin(), a.series.end(), [&](const auto &s) { return s.asset == d.record.id; });
        if(!any) {
            a.failed.insert(d.record.id);
        }
    }
    const SectorPair pairs[] = {{Sector::DEX, Sector::Exchange},
                                {Sector::PLF, Sector::Bank},
                                {Sector::YieldAggregator, Sector::AssetManager}};
    for(Metric metric : {Metric::RevenueMultiple, Metric::NetAssetMultiple}) {
        std::vector<MultipleSeries> same;
        for(const auto &s : a.series) {
            if(s.metric == metric) {
                same.push_back(s);
            }
        }
        for(const auto &p : pairs) {
            bool has = std::any_of(same.begin(), same.end(),
                                   [&](const auto &s) { return s.sector == p.defi || s.sector == p.tradfi; });
            if(!has) {
                continue;
            }
            try {
                a.comparisons.push_back(compare_sector(same, p));
            } catch(const DomainError &e) {
                warnings.push_back(fmt::format("{}: {}", to_string(metric), e.what()));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// formatting

std::string money(double v)
{
    auto s = fmt::format("{:.2f}", v);
    return s == "-0.00" ? "0.00" : s;
}

std::string percent(double fraction) { return money(100.0 * fraction) + "%"; }

std::string opt_money(const std::optional<double> &v) { return v ? money(*v) : "NA"; }
std::string opt_percent(const std::optional<double> &v) { return v ? percent(*v) : "NA"; }

std::string pair_name(const SectorPair &p) { return fmt::format("{} vs {}", to_string(p.defi), to_string(p.tradfi)); }

json opt_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

/// Plain table shared by the markdown and csv renderers.
struct Table {
    std::string title;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
};

std::string csv_cell(const std::string &s)
{
    if(s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for(char c : s) {
        if(c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

void render_markdown(std::ostream &out, const Table &t)
{
    out << "### " << t.title << "\n\n|";
    for(const auto &h : t.headers) {
        out << ' ' << h << " |";
    }
    out << "\n|";
    for(size_t i = 0; i < t.headers.size(); ++i) {
        out << (i == 0 ? "---|" : "---:|");
    }
    out << '\n';
    for(const auto &r : t.rows) {
        out << '|';
        for(const auto &c : r) {
            out << ' ' << c << " |";
        }
        out << '\n';
    }
    out << '\n';
}

void render_csv(std::ostream &out, const Table &t)
{
    out << "# " << t.title << '\n';
    for(size_t i = 0; i < t.headers.size(); ++i) {
        out << (i ? "," : "") << csv_cell(t.headers[i]);
    }
    out << '\n';
    for(const auto &r : t.rows) {
        for(size_t i = 0; i < r.size(); ++i) {
            out << (i ? "," : "") << csv_cell(r[i]);
        }
        out << '\n';
    }
    out << '\n';
}

// --- assumptions

Table assumptions_table(const Workspace &ws)
{
    const auto &a = ws.assumptions;
    Table t{"Assumptions", {"Assumption", "Value"}, {}};
    t.rows.push_back({"Revenue growth", percent(a.revenue_growth)});
    t.rows.push_back({"Perpetual growth", percent(a.perpetual_growth)});
    t.rows.push_back({"Horizon (years)", std::to_string(a.horizon_years)});
    t.rows.push_back({"Market return", percent(a.market_return)});
    t.rows.push_back({"Verdict band", "+/-" + percent(a.verdict_band)});
    t.rows.push_back({"Workforce share (tokens)", percent(default_workforce_share(AssetKind::Token))});
    t.rows.push_back({"Workforce share (equities)", percent(default_workforce_share(AssetKind::Equity))});
    return t;
}

json assumptions_json(const Workspace &ws)
{
    const auto &a = ws.assumptions;
    return json{{"revenue_growth", a.revenue_growth},
                {"perpetual_growth", a.perpetual_growth},
                {"horizon_years", a.horizon_years},
                {"market_return", a.market_return},
                {"verdict_band", a.verdict_band}};
}

// --- history

std::vector<Quarter> history_window(const Analysis &a, Quarter from)
{
    std::optional<Quarter> last;
    for(const auto &[d, h] : a.histories) {
        if(!h.rows.empty() && (!last || h.rows.back().quarter > *last)) {
            last = h.rows.back().quarter;
        }
    }
    std::vector<Quarter> out;
    if(!last) {
        return out;
    }
    for(long n = from.ordinal(); n <= last->ordinal(); ++n) {
        out.push_back(Quarter::from_ordinal(n));
    }
    return out;
}

Table history_table(const Analysis &a, Quarter from)
{
    const auto window = history_window(a, from);
    Table t{"Historical earnings (USD millions)", {"Asset", "Row"}, {}};
    for(const auto &q : window) {
        t.headers.push_back(q.label());
    }
    t.headers.push_back("CQGR");
    for(const auto &[d, h] : a.histories) {
        std::vector<std::string> earnings{d->record.name, "Earnings ($M)"};
        std::vector<std::string> growth{d->record.name, "% growth"};
        for(const auto &q : window) {
            auto it = std::find_if(h.rows.begin(), h.rows.end(), [&](const auto &r) { return r.quarter == q; });
            earnings.push_back(it == h.rows.end() ? "NA" : opt_money(it->earnings));
            growth.push_back(it == h.rows.end() ? "NA" : opt_percent(it->growth));
        }
        earnings.push_back(opt_percent(h.cqgr));
        growth.push_back("");
        t.rows.push_back(std::move(earnings));
        t.rows.push_back(std::move(growth));
    }
    return t;
}

json history_json(const Analysis &a)
{
    json arr = json::array();
    for(const auto &[d, h] : a.histories) {
        json rows = json::array();
        for(const auto &r : h.rows) {
            rows.push_back({{"quarter", r.quarter.str()}, {"earnings", opt_json(r.earnings)}, {"growth", opt_json(r.growth)}});
        }
        arr.push_back({{"asset", d->record.id},
                       {"name", d->record.name},
                       {"cqgr", opt_json(h.cqgr)},
                       {"cqgr_start", h.cqgr_start ? json(h.cqgr_start->str()) : json(nullptr)},
                       {"cqgr_end", h.cqgr_end ? json(h.cqgr_end->str()) : json(nullptr)},
                       {"rows", rows}});
    }
    return arr;
}

// --- dcf

Table dcf_table(const AssetData &d, const DcfResult &r)
{
    Table t{fmt::format("{} ({}) DCF valuation", d.record.name, d.record.id), {"Item"}, {}};
    for(const auto &row : r.rows) {
        t.headers.push_back(std::to_string(r.base_year + row.year_offset));
    }
    const size_t n = r.rows.size();
    auto line = [&](std::string label, auto get) {
        std::vector<std::string> cells{std::move(label)};
        for(const auto &row : r.rows) {
            cells.push_back(money(get(row)));
        }
        t.rows.push_back(std::move(cells));
    };
    auto scalar = [&](std::string label, std::string value, bool at_end) {
        std::vector<std::string> cells{std::move(label)};
        for(size_t i = 0; i < n; ++i) {
            bool here = at_end ? i + 1 == n : i == 0;
            cells.push_back(here ? value : "");
        }
        t.rows.push_back(std::move(cells));
    };
    line("Revenue ($M)", [](const auto &p) { return p.revenue; });
    line("Workforce expenses ($M)", [](const auto &p) { return p.workforce_expenses; });
    line("Net income ($M)", [](const auto &p) { return p.net_income; });
    line("PV cashflows ($M)", [](const auto &p) { return p.pv; });
    scalar("PV terminal value ($M)", money(r.pv_terminal), true);
    scalar("Total PV ($M)", money(r.total_pv), false);
    scalar(fmt::format("Total PV / {} supply ($)", d.record.id), money(r.fair_price), false);
    scalar(fmt::format("{} market price ($)", d.record.id), money(r.market_price), false);
    scalar("Discount rate", percent(r.discount_rate), false);
    scalar("Verdict", std::string(to_string(r.verdict)) + (r.verdict_flagged ? " (flagged)" : ""), false);
    return t;
}

Table dcf_summary_table(const Analysis &a)
{
    Table t{"Valuation summary",
            {"Asset", "Discount rate", "Base revenue ($M)", "Total PV ($M)", "Fair price ($)", "Market price ($)",
             "Market / fair", "Verdict"},
            {}};
    for(const auto &o : a.valuations) {
        if(!o.result) {
            t.rows.push_back({o.asset->record.id, "", "", "", "", "", "", "error: " + o.error});
            continue;
        }
        const auto &r = *o.result;
        std::string ratio = r.fair_price > 0.0 ? money(r.market_price / r.fair_price) : "NA";
        t.rows.push_back({r.asset, percent(r.discount_rate), money(r.rows.front().revenue), money(r.total_pv),
                          money(r.fair_price), money(r.market_price), ratio, std::string(to_string(r.verdict))});
    }
    return t;
}

json dcf_json(const Analysis &a)
{
    json arr = json::array();
    for(const auto &o : a.valuations) {
        json j{{"asset", o.asset->record.id}, {"name", o.asset->record.name}};
        if(!o.result) {
            j["error"] = o.error;
            arr.push_back(j);
            continue;
        }
        const auto &r = *o.result;
        json rows = json::array();
        for(const auto &p : r.rows) {
            rows.push_back({{"year", r.base_year + p.year_offset},
                            {"t", p.year_offset},
                            {"revenue", p.revenue},
                            {"workforce_expenses", p.workforce_expenses},
                            {"net_income", p.net_income},
                            {"pv", p.pv}});
        }
        j["base_revenue_source"] = o.base_revenue_source;
        j["discount_rate"] = r.discount_rate;
        j["perpetual_growth"] = r.perpetual_growth;
        j["rows"] = rows;
        j["terminal_value"] = r.terminal_value_undiscounted;
        j["pv_terminal"] = r.pv_terminal;
        j["total_pv"] = r.total_pv;
        j["supply"] = r.supply;
        j["fair_price"] = r.fair_price;
        j["market_price"] = r.market_price;
        j["verdict"] = to_string(r.verdict);
        j["verdict_flagged"] = r.verdict_flagged;
        arr.push_back(j);
    }
    return arr;
}

// --- multiples

std::vector<Table> multiples_tables(const Analysis &a, const Workspace &ws)
{
    std::vector<Table> out;
    for(Metric metric : {Metric::RevenueMultiple, Metric::NetAssetMultiple}) {
        std::set<Quarter> quarters;
        for(const auto &s : a.series) {
            if(s.metric == metric) {
                for(const auto &p : s.points) {
                    quarters.insert(p.quarter);
                }
            }
        }
        if(quarters.empty()) {
            continue;
        }
        Table t{fmt::format("Multiple series: {}", to_string(metric)), {"Asset", "Sector"}, {}};
        for(const auto &q : quarters) {
            t.headers.push_back(q.label());
        }
        for(const auto &d : ws.assets) {
            auto it = std::find_if(a.series.begin(), a.series.end(),
                                   [&](const auto &s) { return s.metric == metric && s.asset == d.record.id; });
            if(it == a.series.end()) {
                continue;
            }
            std::vector<std::string> cells{it->asset, std::string(to_string(it->sector))};
            for(const auto &q : quarters) {
                auto p = std::find_if(it->points.begin(), it->points.end(), [&](const auto &x) { return x.quarter == q; });
                cells.push_back(p == it->points.end() ? "" : money(p->ratio) + (p->flagged ? " (flagged)" : ""));
            }
            t.rows.push_back(std::move(cells));
        }
        out.push_back(std::move(t));
    }
    for(const auto &c : a.comparisons) {
        Table t{fmt::format("Sector comparison: {} ({})", pair_name(c.pair), to_string(c.metric)), {"Quarter"}, {}};
        for(const auto &id : c.assets) {
            t.headers.push_back(id);
        }
        for(const auto *h : {"DeFi median", "TradFi median", "Spread ratio", "Log spread"}) {
            t.headers.emplace_back(h);
        }
        for(const auto &r : c.rows) {
            std::vector<std::string> cells{r.quarter.label()};
            for(double v : r.ratios) {
                cells.push_back(money(v));
            }
            cells.push_back(opt_money(r.defi_median));
            cells.push_back(opt_money(r.tradfi_median));
            cells.push_back(opt_money(r.spread_ratio));
            cells.push_back(r.log_spread ? fmt::format("{:.4f}", *r.log_spread) : "NA");
            t.rows.push_back(std::move(cells));
        }
        out.push_back(std::move(t));
    }
    return out;
}

json multiples_json(const Analysis &a)
{
    json series = json::array();
    for(const auto &s : a.series) {
        json pts = json::array();
        for(const auto &p : s.points) {
            pts.push_back({{"quarter", p.quarter.str()},
                           {"ratio", p.ratio},
                           {"log10_ratio", opt_json(p.log10_ratio)},
                           {"flagged", p.flagged}});
        }
        json omitted = json::array();
        for(const auto &[q, why] : s.omitted) {
            omitted.push_back({{"quarter", q.str()}, {"reason", why}});
        }
        series.push_back({{"asset", s.asset},
                          {"sector", to_string(s.sector)},
                          {"metric", to_string(s.metric)},
                          {"points", pts},
                          {"omitted", omitted}});
    }
    json comps = json::array();
    for(const auto &c : a.comparisons) {
        json rows = json::array();
        for(const auto &r : c.rows) {
            json ratios = json::object();
            for(size_t i = 0; i < c.assets.size(); ++i) {
                ratios[c.assets[i]] = r.ratios[i];
            }
            rows.push_back({{"quarter", r.quarter.str()},
                            {"ratios", ratios},
                            {"defi_median", opt_json(r.defi_median)},
                            {"tradfi_median", opt_json(r.tradfi_median)},
                            {"spread_ratio", opt_json(r.spread_ratio)},
                            {"log_spread", opt_json(r.log_spread)}});
        }
        comps.push_back({{"defi", to_string(c.pair.defi)},
                         {"tradfi", to_string(c.pair.tradfi)},
                         {"metric", to_string(c.metric)},
                         {"assets", c.assets},
                         {"rows", rows}});
    }
    return json{{"series", series}, {"comparisons", comps}};
}

// --- golden

Table errata_table(const Workspace &ws)
{
    Table t{"Errata in the printed tables", {"Asset", "Row", "Note"}, {}};
    if(ws.golden) {
        for(const auto &g : ws.golden->rows) {
            if(!g.note.empty()) {
                t.rows.push_back({g.asset, g.row, g.note});
            }
        }
    }
    return t;
}

std::vector<Table> deviation_tables(const Analysis &a)
{
    Table summary{"Deviation summary vs printed tables",
                  {"Asset", "Cells compared", "Cells deviating", "Max |delta|", "PV terminal printed / engine"},
                  {}};
    Table detail{"Deviating cells", {"Asset", "Row", "Column", "Printed", "Engine", "Delta", "Tolerance", "Status"}, {}};
    std::vector<std::string> order;
    for(const auto &d : a.deviations) {
        if(std::find(order.begin(), order.end(), d.asset) == order.end()) {
            order.push_back(d.asset);
        }
    }
    for(const auto &id : order) {
        size_t n = 0, bad = 0;
        double worst = 0.0;
        std::string ratio = "NA";
        for(const auto &d : a.deviations) {
            if(d.asset != id) {
                continue;
            }
            ++n;
            bad += d.deviates;
            worst = std::max(worst, std::abs(d.engine - d.golden));
            if(d.row == "pv_terminal" && d.engine != 0.0) {
                ratio = fmt::format("{:.4f}", d.golden / d.engine);
            }
            if(d.deviates) {
                detail.rows.push_back({d.asset, d.row, std::to_string(d.column), money(d.golden), money(d.engine),
                                       money(d.engine - d.golden), money(d.tolerance), "DEVIATES"});
            }
        }
        summary.rows.push_back({id, std::to_string(n), std::to_string(bad), money(worst), ratio});
    }
    return {summary, detail};
}

json deviations_json(const Analysis &a)
{
    json arr = json::array();
    for(const auto &d : a.deviations) {
        arr.push_back({{"asset", d.asset},
                       {"row", d.row},
                       {"column", d.column},
                       {"printed", d.golden},
                       {"engine", d.engine},
                       {"delta", d.engine - d.golden},
                       {"tolerance", d.tolerance},
                       {"deviates", d.deviates}});
    }
    return arr;
}

json errata_json(const Workspace &ws)
{
    json arr = json::array();
    if(ws.golden) {
        for(const auto &g : ws.golden->rows) {
            if(!g.note.empty()) {
                arr.push_back({{"asset", g.asset}, {"row", g.row}, {"note", g.note}});
            }
        }
    }
    return arr;
}

// --- assembly

std::string render_tables(OutputFormat fmt, const std::string &heading, const std::vector<Table> &tables)
{
    std::ostringstream out;
    if(fmt == OutputFormat::Markdown && !heading.empty()) {
        out << "## " << heading << "\n\n";
    }
    for(const auto &t : tables) {
        if(fmt == OutputFormat::Markdown) {
            render_markdown(out, t);
        } else {
            render_csv(out, t);
        }
    }
    return out.str();
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

int exit_code(const Workspace &ws, const Analysis &a)
{
    return ws.errors.empty() && a.failed.empty() ? 0 : 1;
}

CommandOutput finish(const Workspace &ws, const Analysis &a, std::vector<std::string> warnings, std::string text)
{
    CommandOutput out;
    out.text = std::move(text);
    out.exit_code = exit_code(ws, a);
    out.warnings = ws.warnings;
    out.warnings.insert(out.warnings.end(), ws.errors.begin(), ws.errors.end());
    out.warnings.insert(out.warnings.end(), warnings.begin(), warnings.end());
    return out;
}

std::vector<Table> dcf_tables(const Analysis &a)
{
    std::vector<Table> tables{dcf_summary_table(a)};
    for(const auto &o : a.valuations) {
        if(o.result) {
            tables.push_back(dcf_table(*o.asset, *o.result));
        }
    }
    return tables;
}

} // namespace

std::string plot_csv(const std::vector<MultipleSeries> &series)
{
    std::ostringstream out;
    out << "asset,sector,quarter,metric,ratio,log10_ratio\n";
    for(const auto &s : series) {
        for(const auto &p : s.points) {
            out << fmt::format("{},{},{},{},{},{}\n", csv_cell(s.asset), to_string(s.sector), p.quarter.str(),
                               to_string(s.metric), p.ratio, p.log10_ratio ? fmt::format("{}", *p.log10_ratio) : "");
        }
    }
    return out.str();
}

CommandOutput cmd_validate(const RunConfig &cfg)
{
    Workspace ws;
    try {
        ws = load_workspace(cfg);
    } catch(const Error &e) {
        CommandOutput out;
        out.text = fmt::format("registry error: {}\n", e.what());
        out.exit_code = 1;
        return out;
    }
    const size_t errors = ws.errors.size();
    const size_t total_assets = ws.assets.size() + ws.registry.rejected.size();
    std::ostringstream text;
    if(cfg.format == OutputFormat::Json) {
        json files = json::array();
        for(const auto &d : ws.assets) {
            json diags = json::array();
            if(d.report) {
                for(const auto &g : d.report->diagnostics) {
                    diags.push_back({{"line", g.line},
                                     {"severity", g.severity == Diagnostic::Severity::Rejected ? "rejected" : "note"},
                                     {"reason", g.reason}});
                }
            }
            files.push_back({{"asset", d.record.id},
                             {"file", d.file.string()},
                             {"error", d.file_error ? json(*d.file_error) : json(nullptr)},
                             {"rows_accepted", d.report ? d.report->rows_accepted : 0},
                             {"rows_rejected", d.report ? d.report->rows_rejected : 0},
                             {"diagnostics", diags}});
        }
        text << dump(json{{"assets", total_assets}, {"errors", ws.errors}, {"files", files}});
    } else {
        text << fmt::format("{} assets, {} errors\n", total_assets, errors);
        for(const auto &e : ws.errors) {
            text << "error: " << e << '\n';
        }
        for(const auto &d : ws.assets) {
            if(d.file_error) {
                continue;
            }
            text << fmt::format("{}: {} accepted, {} rejected\n", d.file.string(), d.report->rows_accepted,
                                d.report->rows_rejected);
            for(const auto &g : d.report->diagnostics) {
                text << fmt::format("  line {}: {}: {}\n", g.line,
                                    g.severity == Diagnostic::Severity::Rejected ? "rejected" : "note", g.reason);
            }
        }
    }
    CommandOutput out;
    out.text = text.str();
    out.exit_code = errors == 0 ? 0 : 1;
    return out;
}

CommandOutput cmd_history(const RunConfig &cfg)
{
    const auto ws = load_workspace(cfg);
    Analysis a;
    std::vector<std::string> warnings;
    run_history(ws, a, warnings);
    std::string text = cfg.format == OutputFormat::Json
                           ? dump(json{{"history", history_json(a)}})
                           : render_tables(cfg.format, "", {history_table(a, cfg.history_from)});
    return finish(ws, a, std::move(warnings), std::move(text));
}

CommandOutput cmd_dcf(const RunConfig &cfg)
{
    const auto ws = load_workspace(cfg);
    Analysis a;
    std::vector<std::string> warnings;
    run_dcf(ws, a, warnings);
    std::string text = cfg.format == OutputFormat::Json ? dump(json{{"dcf", dcf_json(a)}})
                                                        : render_tables(cfg.format, "", dcf_tables(a));
    return finish(ws, a, std::move(warnings), std::move(text));
}

CommandOutput cmd_multiples(const RunConfig &cfg)
{
    const auto ws = load_workspace(cfg);
    Analysis a;
    std::vector<std::string> warnings;
    run_multiples(ws, a, warnings);
    std::string text;
    if(cfg.format == OutputFormat::Json) {
        text = dump(multiples_json(a));
    } else if(cfg.format == OutputFormat::Csv) {
        text = plot_csv(a.series);
        std::vector<Table> comps;
        auto all = multiples_tables(a, ws);
        for(auto &t : all) {
            if(t.title.starts_with("Sector comparison")) {
                comps.push_back(std::move(t));
            }
        }
        text += "\n" + render_tables(cfg.format, "", comps);
    } else {
        text = render_tables(cfg.format, "", multiples_tables(a, ws));
    }
    auto out = finish(ws, a, std::move(warnings), std::move(text));
    out.plot_csv = plot_csv(a.series);
    return out;
}

CommandOutput cmd_report(const RunConfig &cfg)
{
    const auto ws = load_workspace(cfg);
    Analysis a;
    std::vector<std::string> warnings;
    run_history(ws, a, warnings);
    run_dcf(ws, a, warnings);
    run_multiples(ws, a, warnings);

    std::string text;
    if(cfg.format == OutputFormat::Json) {
        json errors = ws.errors;
        for(const auto &o : a.valuations) {
            if(!o.result) {
                errors.push_back(fmt::format("{}: {}", o.asset->record.id, o.error));
            }
        }
        text = dump(json{{"assumptions", assumptions_json(ws)},
                         {"history", history_json(a)},
                         {"dcf", dcf_json(a)},
                         {"multiples", multiples_json(a)},
                         {"errata", errata_json(ws)},
                         {"deviations", deviations_json(a)},
                         {"errors", errors}});
    } else {
        std::ostringstream out;
        if(cfg.format == OutputFormat::Markdown) {
            out << "# Fundamentals valuation report\n\n";
        }
        out << render_tables(cfg.format, "Assumptions", {assumptions_table(ws)});
        out << render_tables(cfg.format, "Historical earnings", {history_table(a, cfg.history_from)});
        out << render_tables(cfg.format, "DCF valuations", dcf_tables(a));
        out << render_tables(cfg.format, "Valuation multiples", multiples_tables(a, ws));
        if(ws.golden) {
            out << render_tables(cfg.format, "Comparison with printed tables",
                                 {errata_table(ws), deviation_tables(a)[0], deviation_tables(a)[1]});
        }
        if(!ws.errors.empty() || !a.failed.empty()) {
            Table t{"Errors", {"Message"}, {}};
            for(const auto &e : ws.errors) {
                t.rows.push_back({e});
            }
            for(const auto &o : a.valuations) {
                if(!o.result) {
                    t.rows.push_back({fmt::format("{}: {}", o.asset->record.id, o.error)});
                }
            }
            out << render_tables(cfg.format, "Errors", {t});
        }
        text = out.str();
    }
    auto out = finish(ws, a, std::move(warnings), std::move(text));
    out.plot_csv = plot_csv(a.series);
    return out;
}

CommandOutput run_command(const RunConfig &cfg)
{
    switch(cfg.command) {
    case Command::Validate:
        return cmd_validate(cfg);
    case Command::History:
        return cmd_history(cfg);
    case Command::Dcf:
        return cmd_dcf(cfg);
    case Command::Multiples:
        return cmd_multiples(cfg);
    default:
        return cmd_report(cfg);
    }
}

} // namespace fairval
