// fairval: fundamentals valuation CLI.
//
//   fairval <validate|history|dcf|multiples|report> --registry PATH --data DIR
//           [--format markdown|csv|json] [--out PATH] [--plot PATH]
//           [--growth F] [--perpetual-growth F] [--horizon N] [--band F]
//           [--assets T1,T2,...] [--market-cap-sampling end|average] [--from YYYYQn]

#include "fairval/report.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

namespace {

bool write_file(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    return bool(out);
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Fundamentals valuation: earnings histories, DCF fair prices and valuation multiples"};
    app.set_version_flag("--version", "fairval 1.0.0");

    std::string command;
    std::string registry;
    std::string data_dir;
    std::string format = "markdown";
    std::string out_path;
    std::string plot_path;
    std::string sampling = "end";
    std::string from = "2020Q4";
    std::vector<std::string> assets;
    std::optional<double> growth, perpetual_growth, band;
    std::optional<int> horizon;

    app.add_option("command", command, "validate, history, dcf, multiples or report")
        ->required()
        ->check(CLI::IsMember({"validate", "history", "dcf", "multiples", "report"}));
    app.add_option("--registry", registry, "asset registry file")->required();
    app.add_option("--data", data_dir, "directory holding per-asset CSV files")->envname("FAIRVAL_DATA")->required();
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"markdown", "md", "csv", "json"}));
    app.add_option("--out", out_path, "write output here instead of standard output");
    app.add_option("--plot", plot_path, "write long-format multiples plot CSV here");
    app.add_option("--growth", growth, "annual revenue growth override (fraction)");
    app.add_option("--perpetual-growth", perpetual_growth, "perpetual growth override (fraction)");
    app.add_option("--horizon", horizon, "projection horizon override (years)");
    app.add_option("--band", band, "verdict band half-width override (fraction)");
    app.add_option("--assets", assets, "comma-separated tickers to include")->delimiter(',');
    app.add_option("--market-cap-sampling", sampling, "token quarter market cap: end or average")
        ->check(CLI::IsMember({"end", "average"}));
    app.add_option("--from", from, "first quarter shown in history tables");

    CLI11_PARSE(app, argc, argv);

    fairval::RunConfig cfg;
    cfg.command = *fairval::parse_command(command);
    cfg.registry_path = registry;
    cfg.data_dir = data_dir;
    cfg.format = *fairval::parse_format(format);
    cfg.assets = assets;
    cfg.overrides = {growth, perpetual_growth, horizon, band};
    cfg.sampling = sampling == "average" ? fairval::MarketCapSampling::QuarterAverage
                                         : fairval::MarketCapSampling::QuarterEnd;
    auto q = fairval::Quarter::parse(from);
    if(!q) {
        std::cerr << "fairval: invalid --from quarter '" << from << "'\n";
        return 2;
    }
    cfg.history_from = *q;

    fairval::CommandOutput result;
    try {
        result = fairval::run_command(cfg);
    } catch(const fairval::Error &e) {
        std::cerr << "fairval: " << e.what() << '\n';
        return 2;
    }

    for(const auto &w : result.warnings) {
        std::cerr << "fairval: " << w << '\n';
    }
    if(out_path.empty()) {
        std::cout << result.text;
    } else if(!write_file(out_path, result.text)) {
        std::cerr << "fairval: cannot write " << out_path << '\n';
        return 2;
    }
    if(!plot_path.empty() && !write_file(plot_path, result.plot_csv)) {
        std::cerr << "fairval: cannot write " << plot_path << '\n';
        return 2;
    }
    return result.exit_code;
}
