// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Runs against the fixture set and the frozen printed tables.
#include "fairval/dcf.hpp"
#include "fairval/fundamentals.hpp"
#include "fairval/ingest.hpp"
#include "fairval/multiples.hpp"
#include "fairval/report.hpp"

#include "oracles.hpp"
#include "printed_tables.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

using namespace fairval;
namespace fs = std::filesystem;

namespace {

constexpr int instances = 10000;

struct Outcome {
    bool pass = true;
    std::vector<std::string> detail;

    void fail(std::string why)
    {
        pass = false;
        detail.push_back(std::move(why));
    }
    void expect(bool ok, const std::string &why)
    {
        if(!ok) {
            fail(why);
        }
    }
};

RunConfig fixture_config(Command c, OutputFormat f = OutputFormat::Markdown)
{
    RunConfig cfg;
    cfg.registry_path = FAIRVAL_FIXTURES "/registry.ini";
    cfg.data_dir = FAIRVAL_FIXTURES;
    cfg.command = c;
    cfg.format = f;
    return cfg;
}

const AssetData *find(const Workspace &ws, std::string_view id)
{
    for(const auto &a : ws.assets) {
        if(a.record.id == id) {
            return &a;
        }
    }
    return nullptr;
}

// 1 ---------------------------------------------------------------------------
Outcome projection_rows()
{
    Outcome o;
    for(const auto &t : printed::tables) {
        double share = t.token ? 0.20 : 0.30;
        double tol = t.token ? 0.01 : 0.1;
        auto rows = project_cashflows(t.revenue[0], 0.05, share, 6);
        for(size_t i = 0; i < 6; ++i) {
            auto cell = [&](const char *name, double engine, double paper) {
                o.expect(std::fabs(engine - paper) <= tol,
                         fmt::format("{} {}[{}]: engine {:.4f} printed {} (tol {})", t.id, name, i, engine, paper, tol));
            };
            cell("revenue", rows[i].revenue, t.revenue[i]);
            cell("workforce", rows[i].workforce_expenses, t.workforce[i]);
            cell("net_income", rows[i].net_income, t.net_income[i]);
        }
    }
    return o;
}

// 2 ---------------------------------------------------------------------------
Outcome discounting()
{
    Outcome o;
    for(const auto &t : printed::tables) {
        double share = t.token ? 0.20 : 0.30;
        double tol = t.token ? 0.01 : 0.5;
        auto rows = discount_rows(project_cashflows(t.revenue[0], 0.05, share, 6), t.rate);
        for(size_t i = 0; i < 6; ++i) {
            o.expect(std::fabs(rows[i].pv - t.pv[i]) <= tol,
                     fmt::format("{} pv[{}] at r={}: engine {:.4f} printed {} (delta {:+.3f}, tol {})", t.id, i, t.rate,
                                 rows[i].pv, t.pv[i], rows[i].pv - t.pv[i], tol));
        }
    }
    return o;
}

// 3 ---------------------------------------------------------------------------
Outcome identities()
{
    Outcome o;
    for(const auto &t : printed::tables) {
        double s = 0;
        for(double v : t.pv) {
            s += v;
        }
        o.expect(std::fabs(s + t.pv_terminal - t.total_pv) <= 0.02,
                 fmt::format("{} printed: sum pv {:.2f} + terminal {} != total {}", t.id, s, t.pv_terminal, t.total_pv));
    }

    auto ws = load_workspace(fixture_config(Command::Dcf));
    for(const auto &a : ws.assets) {
        double base = a.record.base_revenue ? *a.record.base_revenue : annualize_first_half(a.quarters).value_or(0.0);
        auto v = value_asset(a.record, base, ws.assumptions);
        double s = 0;
        for(const auto &r : v.rows) {
            s += r.pv;
        }
        o.expect(std::fabs(s + v.pv_terminal - v.total_pv) <= 0.02, fmt::format("{} engine: sum identity", a.record.id));
        double c = v.rows.back().net_income;
        double g = v.perpetual_growth, r = v.discount_rate;
        o.expect(oracle::rel_close(v.terminal_value_undiscounted * (r - g), c * (1 + g), 1e-12),
                 fmt::format("{} engine: Gordon identity", a.record.id));
    }
    o.expect(ws.assets.size() == 15, "fixture workspace does not hold 15 assets");
    return o;
}

// 4 ---------------------------------------------------------------------------
Outcome terminal_deviation()
{
    Outcome o;

    // Same canonical discounting for every asset, tokens and equities alike.
    oracle::Rng rng(404);
    for(int i = 0; i < instances; ++i) {
        AssetRecord a;
        a.id = "P";
        bool token = rng.next() % 2;
        a.kind = token ? AssetKind::Token : AssetKind::Equity;
        a.sector = token ? Sector::DEX : Sector::Bank;
        a.supply = rng.magnitude(1e3, 1e10);
        a.spot_price = 1.0;
        a.workforce_share = rng.uniform(0.0, 0.9);
        Assumptions as;
        as.perpetual_growth = rng.uniform(0.0, 0.05);
        as.revenue_growth = rng.uniform(-0.3, 0.3);
        as.horizon_years = int(rng.integer(1, 12));
        double r = rng.uniform(as.perpetual_growth + 0.01, 0.5);
        a.discounting = FixedRate{r};
        double base = rng.magnitude(1e-2, 1e6);
        auto v = value_asset(a, base, as);
        auto expect = oracle::value(base, as.revenue_growth, a.workforce_share, r, as.perpetual_growth, as.horizon_years);
        if(!oracle::rel_close(v.pv_terminal, expect.pv_terminal, 1e-10)) {
            o.fail(fmt::format("instance {}: pv_terminal {} vs canonical {}", i, v.pv_terminal, expect.pv_terminal));
            break;
        }
    }

    // Bounded: printed terminal values exceed the canonical ones by less than 15%.
    std::vector<double> token_ratios;
    for(const auto &t : printed::tables) {
        double share = t.token ? 0.20 : 0.30;
        auto o_val = oracle::value(t.revenue[0], 0.05, share, t.rate, 0.0239, 6);
        double ratio = t.pv_terminal / o_val.pv_terminal;
        o.expect(ratio > 1.0 && ratio < 1.15, fmt::format("{} printed/canonical terminal ratio {:.4f}", t.id, ratio));
        if(t.token && t.pv_terminal >= 1.0) {
            token_ratios.push_back(ratio);
        }
    }
    // Stable: a common factor across the token tables.
    auto [lo, hi] = std::minmax_element(token_ratios.begin(), token_ratios.end());
    o.expect(*hi - *lo <= 0.005, fmt::format("token terminal ratios spread {:.4f}..{:.4f}", *lo, *hi));

    // Reported: every token's terminal row is flagged in the report.
    auto report = run_command(fixture_config(Command::Report)).text;
    for(const auto &t : printed::tables) {
        if(!t.token) {
            continue;
        }
        std::string needle = fmt::format("| {} | pv_terminal |", t.id);
        auto pos = report.find(needle);
        bool flagged = pos != std::string::npos && report.find("DEVIATES", pos) < report.find('\n', pos);
        o.expect(flagged, fmt::format("{} terminal deviation not flagged in report", t.id));
    }
    return o;
}

// 5 ---------------------------------------------------------------------------
Outcome cqgr_values()
{
    Outcome o;
    auto ws = load_workspace(fixture_config(Command::History));
    const std::map<std::string, std::pair<double, double>> expected{
        {"BAC", {0.0960, 0.0005}},  {"BRK.B", {-0.2489, 0.0005}}, {"ICE", {0.0611, 0.0005}},
        {"MS", {-0.0070, 0.0005}},  {"UNI", {-0.02, 0.01}},       {"CRV", {0.24, 0.01}},
        {"AAVE", {0.37, 0.01}},     {"COMP", {-0.30, 0.01}},      {"YFI", {-0.25, 0.01}},
        {"IDLE", {-0.37, 0.01}},
    };
    for(const auto &[id, want] : expected) {
        const auto *a = find(ws, id);
        if(!a) {
            o.fail(id + " missing from fixtures");
            continue;
        }
        auto h = build_history(a->record, a->quarters);
        if(!h.cqgr) {
            o.fail(id + " has no CQGR");
            continue;
        }
        o.expect(std::fabs(*h.cqgr - want.first) <= want.second,
                 fmt::format("{} cqgr {:.5f} expected {} +- {}", id, *h.cqgr, want.first, want.second));
    }
    return o;
}

// 6 ---------------------------------------------------------------------------
Outcome verdicts()
{
    Outcome o;
    auto out = run_command(fixture_config(Command::Dcf, OutputFormat::Json));
    auto doc = nlohmann::json::parse(out.text);
    const std::map<std::string, std::string> expected{
        {"UNI", "Overvalued"},  {"COMP", "Overvalued"}, {"AAVE", "Overvalued"}, {"CRV", "Fair"},
        {"YFI", "Undervalued"}, {"IDLE", "Undervalued"}, {"NDAQ", "Overvalued"}, {"BLK", "Overvalued"},
    };
    std::map<std::string, nlohmann::json> by_id;
    for(const auto &a : doc["dcf"]) {
        by_id[a["asset"].get<std::string>()] = a;
    }
    for(const auto &[id, want] : expected) {
        if(!by_id.contains(id)) {
            o.fail(id + " missing from dcf output");
            continue;
        }
        const auto &a = by_id[id];
        auto got = a["verdict"].get<std::string>();
        double fair = a["fair_price"].get<double>(), market = a["market_price"].get<double>();
        o.expect(got == want, fmt::format("{}: {} (fair {:.2f}, market {:.2f}, market/fair {:.3f}), expected {}", id, got,
                                          fair, market, market / fair, want));
    }
    return o;
}

// 7 ---------------------------------------------------------------------------
Outcome properties()
{
    Outcome o;
    oracle::Rng rng(707);
    auto check = [&](bool ok, const char *what, int i) {
        if(!ok && o.pass) {
            o.fail(fmt::format("{} violated at instance {}", what, i));
        }
        return ok;
    };

    for(int i = 0; i < instances; ++i) {
        double a = rng.magnitude(1e-3, 1e6), b = a * rng.magnitude(1e-3, 1e3);
        long q = rng.integer(1, 40);
        check(oracle::rel_close(a * std::pow(1 + cqgr(a, b, q), double(q)), b, 1e-9), "CQGR inverse identity", i);
    }

    for(int i = 0; i < instances; ++i) {
        AssetRecord asset;
        asset.id = "P";
        asset.kind = AssetKind::Token;
        asset.sector = Sector::PLF;
        asset.supply = 1e6;
        asset.workforce_share = rng.uniform(0, 0.9);
        Assumptions as;
        as.perpetual_growth = rng.uniform(0, 0.05);
        as.revenue_growth = rng.uniform(-0.3, 0.3);
        as.horizon_years = int(rng.integer(2, 12));
        double r = rng.uniform(as.perpetual_growth + 0.01, 0.5);
        double base = rng.magnitude(1e-2, 1e6);
        asset.discounting = FixedRate{r};
        double v = value_asset(asset, base, as).total_pv;

        auto higher_rate = asset;
        higher_rate.discounting = FixedRate{r + rng.uniform(1e-3, 0.2)};
        check(value_asset(higher_rate, base, as).total_pv < v, "NPV decreasing in r", i);
        auto faster = as;
        faster.revenue_growth += rng.uniform(1e-3, 0.2);
        check(value_asset(asset, base, faster).total_pv > v, "NPV increasing in growth", i);
        check(value_asset(asset, base * (1 + rng.uniform(1e-3, 1.0)), as).total_pv > v, "NPV increasing in base revenue",
              i);
        double k = rng.magnitude(1e-3, 1e3);
        check(oracle::rel_close(value_asset(asset, k * base, as).total_pv, k * v, 1e-12), "degree-1 homogeneity", i);
    }

    for(int i = 0; i < instances; ++i) {
        double e = rng.magnitude(1, 1e6), d = rng.magnitude(1, 1e6), k = rng.magnitude(1e-3, 1e6);
        double re = rng.uniform(0, 0.3), rd = rng.uniform(0, 0.2), tax = rng.uniform(0, 0.5);
        check(oracle::rel_close(wacc(k * e, k * d, re, rd, tax), wacc(e, d, re, rd, tax), 1e-12), "WACC scale invariance",
              i);
    }

    AssetRecord rec;
    rec.id = "M";
    for(int i = 0; i < instances; ++i) {
        std::vector<QuarterlyFundamentals> q(4), scaled;
        Quarter start(2021, 1);
        for(auto &x : q) {
            x.quarter = start;
            x.market_cap = rng.magnitude(1, 1e6);
            x.revenue = rng.magnitude(1e-2, 1e4);
            x.net_assets = rng.magnitude(1e-2, 1e4);
            start = start.next();
        }
        double k = rng.magnitude(1e-3, 1e3);
        scaled = q;
        for(auto &x : scaled) {
            x.market_cap *= k;
            x.revenue *= k;
            x.net_assets *= k;
        }
        for(auto m : {Metric::RevenueMultiple, Metric::NetAssetMultiple}) {
            auto s1 = build_series(rec, q, m), s2 = build_series(rec, scaled, m);
            bool same = s1.points.size() == s2.points.size();
            for(size_t j = 0; same && j < s1.points.size(); ++j) {
                same = oracle::rel_close(s1.points[j].ratio, s2.points[j].ratio, 1e-14);
            }
            check(same, "multiples scale invariance", i);
        }
    }

    for(int i = 0; i < instances; ++i) {
        std::ostringstream src;
        src << "date,price,market_cap,tvl,protocol_revenue,treasury\n";
        Date d = *parse_date("2021-01-01");
        for(long j = rng.integer(0, 5); j > 0; --j) {
            src << format_date(d) << ',' << rng.magnitude(1e-4, 1e4) << ',' << rng.magnitude(1, 1e12) << ','
                << rng.magnitude(1, 1e12) << ',' << rng.magnitude(1e-2, 1e8) << ',' << rng.magnitude(1, 1e10) << '\n';
            d = Date{std::chrono::sys_days(d) + std::chrono::days(rng.integer(1, 3))};
        }
        std::istringstream in(src.str());
        auto first = parse_token_daily(in, "P");
        std::ostringstream out;
        write_token_daily(out, first.rows);
        std::istringstream in2(out.str());
        check(parse_token_daily(in2, "P").rows == first.rows, "parse/serialize fixpoint", i);
    }
    return o;
}

// 8 ---------------------------------------------------------------------------
Outcome multiples_fixtures()
{
    Outcome o;
    auto ws = load_workspace(fixture_config(Command::Multiples));
    const auto *uni = find(ws, "UNI");
    if(!uni) {
        o.fail("UNI missing");
        return o;
    }
    auto na = build_series(uni->record, uni->quarters, Metric::NetAssetMultiple);
    bool seen = false;
    for(const auto &p : na.points) {
        if(p.quarter == Quarter(2022, 2)) {
            seen = true;
            o.expect(std::fabs(p.ratio - 1.67) <= 0.05, fmt::format("UNI Q2'22 net-asset multiple {:.4f}", p.ratio));
        }
    }
    o.expect(seen, "UNI has no Q2'22 net-asset point");

    std::vector<MultipleSeries> series;
    for(const auto &a : ws.assets) {
        if(pair_of(a.record.sector).defi == Sector::DEX) {
            series.push_back(build_series(a.record, a.quarters, Metric::RevenueMultiple));
        }
    }
    auto table = compare_sector(series, {Sector::DEX, Sector::Exchange});
    std::vector<std::pair<Quarter, double>> spread;
    for(const auto &r : table.rows) {
        if(r.quarter >= Quarter(2021, 4) && r.spread_ratio) {
            spread.emplace_back(r.quarter, *r.spread_ratio);
        }
    }
    o.expect(spread.size() == 3, fmt::format("expected Q4'21..Q2'22 in the comparison, got {}", spread.size()));
    for(size_t i = 1; i < spread.size(); ++i) {
        o.expect(spread[i].second < spread[i - 1].second,
                 fmt::format("spread {} {:.4f} not below {} {:.4f}", spread[i].first.label(), spread[i].second,
                             spread[i - 1].first.label(), spread[i - 1].second));
    }
    return o;
}

// 9 ---------------------------------------------------------------------------
std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> cells(const std::string &line)
{
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string c;
    while(std::getline(s, c, '|')) {
        auto b = c.find_first_not_of(' ');
        auto e = c.find_last_not_of(' ');
        out.push_back(b == std::string::npos ? "" : c.substr(b, e - b + 1));
    }
    if(!out.empty()) {
        out.erase(out.begin());
    }
    return out;
}

Outcome determinism()
{
    Outcome o;
    fs::path dir = fs::temp_directory_path() / "fairval_acceptance";
    fs::create_directories(dir);
    auto run = [&](const std::string &fmt_name, const std::string &file) {
        std::string cmd = fmt::format("\"{}\" report --registry \"{}\" --data \"{}\" --format {} --out \"{}\"", FAIRVAL_CLI,
                                      FAIRVAL_FIXTURES "/registry.ini", FAIRVAL_FIXTURES, fmt_name, (dir / file).string());
        int rc = std::system(cmd.c_str());
        o.expect(rc == 0, fmt::format("'{}' exited with {}", cmd, rc));
        return slurp(dir / file);
    };
    auto md1 = run("markdown", "a.md");
    auto md2 = run("markdown", "b.md");
    auto js1 = run("json", "a.json");
    auto js2 = run("json", "b.json");
    o.expect(!md1.empty() && md1 == md2, "markdown reports differ between runs");
    o.expect(!js1.empty() && js1 == js2, "json reports differ between runs");
    fs::remove_all(dir);
    if(!o.pass) {
        return o;
    }

    // Every DCF table cell in markdown equals the JSON value at 2 decimals.
    auto doc = nlohmann::json::parse(js1);
    std::istringstream md(md1);
    std::string line;
    std::string current;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> tables;
    while(std::getline(md, line)) {
        if(line.rfind("### ", 0) == 0) {
            auto l = line.find('('), r = line.find(") DCF valuation");
            current = (l != std::string::npos && r != std::string::npos) ? line.substr(l + 1, r - l - 1) : "";
            continue;
        }
        if(!current.empty() && line.rfind("| ", 0) == 0) {
            auto c = cells(line);
            if(c.size() > 1) {
                tables[current][c[0]] = std::vector<std::string>(c.begin() + 1, c.end());
            }
        }
    }
    auto money = [](double v) { return fmt::format("{:.2f}", v); };
    long compared = 0;
    for(const auto &a : doc["dcf"]) {
        auto id = a["asset"].get<std::string>();
        if(!tables.contains(id)) {
            o.fail(id + " table missing from markdown");
            continue;
        }
        auto &t = tables[id];
        const std::pair<const char *, const char *> row_keys[] = {{"Revenue ($M)", "revenue"},
                                                                  {"Workforce expenses ($M)", "workforce_expenses"},
                                                                  {"Net income ($M)", "net_income"},
                                                                  {"PV cashflows ($M)", "pv"}};
        for(const auto &[label, key] : row_keys) {
            for(size_t i = 0; i < a["rows"].size(); ++i) {
                auto want = money(a["rows"][i][key].get<double>());
                ++compared;
                o.expect(t[label].size() > i && t[label][i] == want,
                         fmt::format("{} {}[{}]: markdown '{}' json {}", id, label, i,
                                     t[label].size() > i ? t[label][i] : "", want));
            }
        }
        auto scalar = [&](const std::string &label, const char *key, size_t col) {
            auto want = money(a[key].get<double>());
            ++compared;
            o.expect(t[label].size() > col && t[label][col] == want,
                     fmt::format("{} {}: markdown '{}' json {}", id, label, t[label].size() > col ? t[label][col] : "",
                                 want));
        };
        scalar("PV terminal value ($M)", "pv_terminal", a["rows"].size() - 1);
        scalar("Total PV ($M)", "total_pv", 0);
        scalar(fmt::format("Total PV / {} supply ($)", id), "fair_price", 0);
        scalar(fmt::format("{} market price ($)", id), "market_price", 0);
    }
    o.expect(compared >= 15 * 28, fmt::format("only {} cells compared", compared));
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int number;
        const char *name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "projection rows reproduce printed revenue, workforce and net income", projection_rows},
        {2, "PV cashflow rows reproduce printed values at the published rates", discounting},
        {3, "sum and Gordon identities on printed and engine numbers", identities},
        {4, "terminal-value deviation is canonical, bounded, stable and reported", terminal_deviation},
        {5, "CQGR values from fixture earnings", cqgr_values},
        {6, "verdict labels with a +-10% band", verdicts},
        {7, "property suites over 10^4 instances", properties},
        {8, "multiples fixtures: net-asset multiple and converging spread", multiples_fixtures},
        {9, "CLI determinism and json/markdown equivalence", determinism},
    };

    int failed = 0;
    for(const auto &c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch(const std::exception &e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << fmt::format("[{}] criterion {}: {}\n", o.pass ? "PASS" : "FAIL", c.number, c.name);
        for(const auto &d : o.detail) {
            std::cout << "       " << d << '\n';
        }
        failed += !o.pass;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", std::size(criteria) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
