#include "fairval/ingest.hpp"

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

struct Block {
    std::string id;
    long line = 0;
    std::map<std::string, std::pair<std::string, long>> values;
};

double number(const Block &b, const std::string &key)
{
    const auto &[text, line] = b.values.at(key);
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if(ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v)) {
        throw DomainError(fmt::format("line {}: '{}' is not a number for {}", line, text, key));
    }
    return v;
}

const std::string &text(const Block &b, const std::string &key)
{
    auto it = b.values.find(key);
    if(it == b.values.end()) {
        throw DomainError(fmt::format("missing key '{}'", key));
    }
    return it->second.first;
}

double required(const Block &b, const std::string &key)
{
    if(!b.values.contains(key)) {
        throw DomainError(fmt::format("missing key '{}'", key));
    }
    return number(b, key);
}

const std::set<std::string> asset_keys{"name",         "kind",          "sector",   "supply",  "spot_price",
                                       "spot_date",    "discount",      "rate",     "beta",    "market_return",
                                       "cost_of_debt", "tax_rate",      "equity",   "debt",    "workforce_share",
                                       "base_revenue", "data"};

AssetRecord build_asset(const Block &b, const Assumptions &assumptions)
{
    for(const auto &[key, value] : b.values) {
        if(!asset_keys.contains(key)) {
            throw DomainError(fmt::format("line {}: unknown key '{}'", value.second, key));
        }
    }
    AssetRecord a;
    a.id = b.id;
    a.name = b.values.contains("name") ? text(b, "name") : b.id;

    const auto &sector = text(b, "sector");
    auto s = parse_sector(sector);
    if(!s) {
        throw DomainError(fmt::format("unknown sector '{}'", sector));
    }
    a.sector = *s;
    a.kind = kind_of(*s);
    if(b.values.contains("kind")) {
        auto k = parse_kind(text(b, "kind"));
        if(!k) {
            throw DomainError(fmt::format("unknown kind '{}'", text(b, "kind")));
        }
        a.kind = *k;
    }

    a.supply = required(b, "supply");
    a.spot_price = required(b, "spot_price");
    auto date = parse_date(text(b, "spot_date"));
    if(!date) {
        throw DomainError(fmt::format("invalid spot_date '{}'", text(b, "spot_date")));
    }
    a.spot_date = *date;

    const auto mode = detail::lower(text(b, "discount"));
    if(mode == "fixed") {
        a.discounting = FixedRate{required(b, "rate")};
    } else if(mode == "wacc") {
        WaccInputs w;
        w.beta = required(b, "beta");
        w.market_return = b.values.contains("market_return") ? number(b, "market_return") : assumptions.market_return;
        w.cost_of_debt = required(b, "cost_of_debt");
        w.tax_rate = required(b, "tax_rate");
        w.equity = required(b, "equity");
        w.debt = required(b, "debt");
        a.discounting = w;
    } else {
        throw DomainError(fmt::format("unknown discount mode '{}' (expected fixed or wacc)", mode));
    }

    a.workforce_share =
        b.values.contains("workforce_share") ? number(b, "workforce_share") : default_workforce_share(a.kind);
    if(b.values.contains("base_revenue")) {
        a.base_revenue = number(b, "base_revenue");
    }
    if(b.values.contains("data")) {
        a.data_file = text(b, "data");
    }

    validate(a);
    if(resolve_discount_rate(a.discounting) <= assumptions.perpetual_growth) {
        throw DivergenceError(fmt::format("discount rate must exceed perpetual growth ({} <= {})",
                                          resolve_discount_rate(a.discounting), assumptions.perpetual_growth));
    }
    return a;
}

void apply_assumption(Assumptions &a, const std::string &key, const std::string &value, long line)
{
    double v = 0.0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if(ec != std::errc() || p != value.data() + value.size() || !std::isfinite(v)) {
        throw ParseError(fmt::format("registry line {}: '{}' is not a number", line, value));
    }
    if(key == "revenue_growth") {
        a.revenue_growth = v;
    } else if(key == "perpetual_growth") {
        a.perpetual_growth = v;
    } else if(key == "horizon_years") {
        if(v != std::floor(v)) {
            throw ParseError(fmt::format("registry line {}: horizon_years must be an integer", line));
        }
        a.horizon_years = int(v);
    } else if(key == "market_return") {
        a.market_return = v;
    } else if(key == "verdict_band") {
        a.verdict_band = v;
    } else {
        throw ParseError(fmt::format("registry line {}: unknown assumption '{}'", line, key));
    }
}

} // namespace

const AssetRecord *Registry::find(std::string_view id) const
{
    for(const auto &a : assets) {
        if(a.id == id) {
            return &a;
        }
    }
    return nullptr;
}

Registry load_registry(std::istream &in)
{
    Registry reg;
    std::vector<Block> blocks;
    enum class Section { None, Assumptions, Asset } section = Section::None;

    std::string raw;
    long line_no = 0;
    while(std::getline(in, raw)) {
        ++line_no;
        auto line = detail::trim(raw);
        if(line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        if(line.front() == '[') {
            if(line.back() != ']') {
                throw ParseError(fmt::format("registry line {}: unterminated section header", line_no));
            }
            auto header = detail::trim(line.substr(1, line.size() - 2));
            if(header == "assumptions") {
                section = Section::Assumptions;
            } else if(header.starts_with("asset ") && !detail::trim(header.substr(6)).empty()) {
                section = Section::Asset;
                blocks.push_back(Block{std::string(detail::trim(header.substr(6))), line_no, {}});
            } else {
                throw ParseError(fmt::format("registry line {}: unknown section '{}'", line_no, header));
            }
            continue;
        }
        auto eq = line.find('=');
        if(eq == std::string_view::npos) {
            throw ParseError(fmt::format("registry line {}: expected key = value", line_no));
        }
        auto key = detail::lower(detail::trim(line.substr(0, eq)));
        auto value = std::string(detail::trim(line.substr(eq + 1)));
        if(key.empty()) {
            throw ParseError(fmt::format("registry line {}: empty key", line_no));
        }
        switch(section) {
        case Section::None:
            throw ParseError(fmt::format("registry line {}: key outside of any section", line_no));
        case Section::Assumptions:
            apply_assumption(reg.assumptions, key, value, line_no);
            break;
        case Section::Asset:
            if(!blocks.back().values.emplace(key, std::pair{value, line_no}).second) {
                throw ParseError(fmt::format("registry line {}: duplicate key '{}'", line_no, key));
            }
            break;
        }
    }
    try {
        validate(reg.assumptions);
    } catch(const DomainError &e) {
        throw ParseError(fmt::format("registry assumptions: {}", e.what()));
    }

    std::set<std::string> ids;
    for(const auto &b : blocks) {
        if(!ids.insert(b.id).second) {
            reg.rejected.push_back({b.id, b.line, "duplicate asset id"});
            continue;
        }
        try {
            reg.assets.push_back(build_asset(b, reg.assumptions));
        } catch(const Error &e) {
            reg.rejected.push_back({b.id, b.line, e.what()});
        } catch(const std::out_of_range &) {
            reg.rejected.push_back({b.id, b.line, "incomplete asset block"});
        }
    }
    return reg;
}

void write_registry(std::ostream &out, const Registry &registry)
{
    const auto &a = registry.assumptions;
    out << "[assumptions]\n";
    out << fmt::format("revenue_growth = {}\n", a.revenue_growth);
    out << fmt::format("perpetual_growth = {}\n", a.perpetual_growth);
    out << fmt::format("horizon_years = {}\n", a.horizon_years);
    out << fmt::format("market_return = {}\n", a.market_return);
    out << fmt::format("verdict_band = {}\n", a.verdict_band);

    for(const auto &r : registry.assets) {
        out << fmt::format("\n[asset {}]\n", r.id);
        out << fmt::format("name = {}\n", r.name);
        out << fmt::format("kind = {}\n", detail::lower(to_string(r.kind)));
        out << fmt::format("sector = {}\n", to_string(r.sector));
        out << fmt::format("supply = {}\n", r.supply);
        out << fmt::format("spot_price = {}\n", r.spot_price);
        out << fmt::format("spot_date = {}\n", format_date(r.spot_date));
        if(const auto *f = std::get_if<FixedRate>(&r.discounting)) {
            out << "discount = fixed\n";
            out << fmt::format("rate = {}\n", f->rate);
        } else {
            const auto &w = std::get<WaccInputs>(r.discounting);
            out << "discount = wacc\n";
            out << fmt::format("beta = {}\nmarket_return = {}\ncost_of_debt = {}\ntax_rate = {}\nequity = {}\ndebt = {}\n",
                               w.beta, w.market_return, w.cost_of_debt, w.tax_rate, w.equity, w.debt);
        }
        out << fmt::format("workforce_share = {}\n", r.workforce_share);
        if(r.base_revenue) {
            out << fmt::format("base_revenue = {}\n", *r.base_revenue);
        }
        if(!r.data_file.empty()) {
            out << fmt::format("data = {}\n", r.data_file);
        }
    }
}

} // namespace fairval
