#include "fairval/core.hpp"
#include "fairval/dcf.hpp"

#include <doctest.h>

using namespace fairval;

TEST_CASE("dates parse strictly")
{
    CHECK(parse_date("2022-06-30").has_value());
    CHECK_FALSE(parse_date("2021-13-01"));
    CHECK_FALSE(parse_date("2021-02-29"));
    CHECK(parse_date("2020-02-29").has_value());
    CHECK_FALSE(parse_date("2021-1-01"));
    CHECK_FALSE(parse_date(" 2021-01-01"));
    CHECK(format_date(*parse_date("2021-07-04")) == "2021-07-04");
}

TEST_CASE("quarters")
{
    Quarter q = Quarter::of(*parse_date("2021-08-15"));
    CHECK(q == Quarter(2021, 3));
    CHECK(q.str() == "2021Q3");
    CHECK(q.label() == "Q3'21");
    CHECK(q.next() == Quarter(2021, 4));
    CHECK(Quarter(2021, 4).next() == Quarter(2022, 1));
    CHECK(format_date(q.first_day()) == "2021-07-01");
    CHECK(format_date(q.last_day()) == "2021-09-30");
    CHECK(format_date(Quarter(2020, 1).last_day()) == "2020-03-31");
    CHECK(quarters_between(Quarter(2021, 1), Quarter(2022, 2)) == 5);
    CHECK(quarters_between(Quarter(2020, 4), Quarter(2022, 2)) == 6);
    CHECK(Quarter::from_ordinal(Quarter(2019, 2).ordinal()) == Quarter(2019, 2));
    CHECK(Quarter::parse("2022Q2") == Quarter(2022, 2));
    CHECK_FALSE(Quarter::parse("2022Q5"));
    CHECK_FALSE(Quarter::parse("22Q1"));
    CHECK_THROWS_AS(Quarter(2021, 0), DomainError);
    CHECK(Quarter(2020, 4) < Quarter(2021, 1));
}

TEST_CASE("sector taxonomy")
{
    CHECK(parse_sector("dex") == Sector::DEX);
    CHECK(parse_sector("YieldAggregator") == Sector::YieldAggregator);
    CHECK_FALSE(parse_sector("hedgefund"));
    CHECK(kind_of(Sector::PLF) == AssetKind::Token);
    CHECK(kind_of(Sector::Bank) == AssetKind::Equity);
    CHECK(pair_of(Sector::Bank).defi == Sector::PLF);
    CHECK(pair_of(Sector::YieldAggregator).tradfi == Sector::AssetManager);
    CHECK(default_workforce_share(AssetKind::Token) == 0.20);
    CHECK(default_workforce_share(AssetKind::Equity) == 0.30);
}

TEST_CASE("discount rate resolution")
{
    CHECK(resolve_discount_rate(FixedRate{0.25}) == 0.25);

    WaccInputs zero_debt{};
    zero_debt.beta = 1.05;
    zero_debt.market_return = 0.10;
    zero_debt.cost_of_debt = 0.9;
    zero_debt.tax_rate = 0.5;
    zero_debt.equity = 1;
    zero_debt.debt = 0;
    CHECK(resolve_discount_rate(zero_debt) == doctest::Approx(0.105).epsilon(1e-15));

    WaccInputs mixed{};
    mixed.beta = 1.12;
    mixed.market_return = 0.10;
    mixed.cost_of_debt = 0.0285;
    mixed.tax_rate = 0.1469;
    mixed.equity = 750;
    mixed.debt = 250;
    CHECK(resolve_discount_rate(mixed) == doctest::Approx(0.75 * 0.112 + 0.25 * 0.0285 * (1 - 0.1469)));
    CHECK(resolve_discount_rate(mixed) == doctest::Approx(0.09008).epsilon(1e-4));

    CHECK_THROWS_AS(resolve_discount_rate(FixedRate{0.0}), DomainError);
    CHECK_THROWS_AS(resolve_discount_rate(FixedRate{1.5}), DomainError);
    mixed.equity = 0;
    mixed.debt = 0;
    CHECK_THROWS_AS(resolve_discount_rate(mixed), DomainError);
}

TEST_CASE("assumption and record validation")
{
    Assumptions a;
    CHECK_NOTHROW(validate(a));
    a.horizon_years = 0;
    CHECK_THROWS_AS(validate(a), DomainError);

    AssetRecord r;
    r.id = "UNI";
    r.kind = AssetKind::Token;
    r.sector = Sector::DEX;
    r.supply = 1e9;
    r.workforce_share = 0.2;
    CHECK_NOTHROW(validate(r));
    CHECK(default_data_file(r) == "UNI.daily.csv");
    r.sector = Sector::Bank;
    CHECK_THROWS_AS(validate(r), DomainError);
    r.sector = Sector::DEX;
    r.supply = 0;
    CHECK_THROWS_AS(validate(r), DomainError);
}
