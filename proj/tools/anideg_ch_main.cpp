// anideg-ch: simulator and verification harness for the anisotropic
// Cahn-Hilliard equation with degenerate mobility on a flat torus.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "anideg/runner.hpp"
#include "anideg/verify.hpp"
#include "anideg/version.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw anideg::ParseError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<double> parse_deltas(const std::string& list) {
    std::string cleaned = list;
    for (char& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream is(cleaned);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (!is.eof() || out.empty())
        throw anideg::ValidationError("--deltas expects a comma-separated list of reals");
    return out;
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic degenerate Cahn-Hilliard simulator"};
    app.set_version_flag("--version", anideg::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string deltas_arg;
    std::string suite = "all";
    std::string run_dir;
    bool inject_indefinite = false;

    CLI::App* run = app.add_subcommand("run", "execute one simulation from a config file");
    run->add_option("--config", config_path, "path to the run configuration")->required();

    CLI::App* cont = app.add_subcommand("continuation", "delta-continuation scaling study");
    cont->add_option("--config", config_path, "path to the base configuration")->required();
    cont->add_option("--deltas", deltas_arg, "comma-separated strictly decreasing deltas in (0,1)")
        ->required();

    CLI::App* verify = app.add_subcommand("verify", "run built-in property suites");
    verify->add_option("--suite", suite, "anisotropy | material | grid | estimates | all")
        ->default_val("all");
    verify->add_flag("--inject-indefinite", inject_indefinite,
                     "add an indefinite quadratic fixture (fault-injection; the suite then fails)");

    CLI::App* plot = app.add_subcommand("plot-data", "emit plain-text plot data from a run directory");
    plot->add_option("--run", run_dir, "run directory containing diagnostics.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const std::string raw = read_file(config_path);
            return anideg::cmd_run(anideg::parse_config(raw), raw);
        }
        if (cont->parsed()) {
            const std::string raw = read_file(config_path);
            return anideg::cmd_continuation(anideg::parse_config(raw), raw, parse_deltas(deltas_arg));
        }
        if (verify->parsed()) {
            const anideg::CheckReport rep = anideg::verify_suite(suite, inject_indefinite);
            for (const auto& row : rep.rows)
                std::cout << "  [" << (row.pass ? "PASS" : "FAIL") << "] " << row.name
                          << "  lhs=" << row.lhs << " rhs=" << row.rhs << " margin=" << row.margin
                          << "\n";
            std::cout << (rep.all_pass() ? "verify: all checks passed\n" : "verify: FAILURES\n");
            if (!rep.all_pass()) {
                for (const auto& row : rep.rows)
                    if (!row.pass) {
                        // First failing row, machine-parsable class first.
                        const std::size_t colon = row.name.find(':');
                        const std::string cls =
                            colon == std::string::npos ? "EstimateViolated" : row.name.substr(0, colon);
                        std::cerr << cls << ": verify suite '" << suite << "' failed at check '"
                                  << one_line(row.name) << "'\n";
                        break;
                    }
                return 1;
            }
            return 0;
        }
        if (plot->parsed()) return anideg::cmd_plot_data(run_dir);
    } catch (const anideg::Error& e) {
        std::cerr << e.code() << ": " << one_line(e.what()) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << one_line(e.what()) << "\n";
        return 2;
    }
    return 0;
}
