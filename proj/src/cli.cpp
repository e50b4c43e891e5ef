#include "avgcell/cli.hpp"

#include "avgcell/engine.hpp"
#include "avgcell/format.hpp"
#include "avgcell/netlist.hpp"
#include "avgcell/oracle.hpp"
#include "avgcell/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace avgcell {

namespace {

struct CliOptions {
    std::string input;
    std::optional<double> duty;
    std::optional<double> fs;
    std::optional<double> t_end;
    std::string out_dir = ".";
    std::string signals;
    bool oracle = false;
    int oracle_substeps = 1000;
    bool dcm_refine = false;
    double stats_window = 0.1;
};

class FileError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw FileError("cannot write " + path.string());
    }
    writer(os);
    if (!os) {
        throw FileError("write failed for " + path.string());
    }
}

std::vector<std::string> all_signal_names(const SimulationResult& result,
                                          const std::vector<Reconstruction>& rec) {
    auto names = averaged_columns(result);
    for (const auto& r : rec) {
        names.push_back(r.waveform.name);
    }
    for (const auto& n : period_signals(result)) {
        names.push_back(n);
    }
    return names;
}

int execute(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    const CircuitDescription circuit = parse_netlist(read_file(opt.input));

    SimConfig config;
    const auto duty = opt.duty ? opt.duty : circuit.params.duty;
    const auto fs = opt.fs ? opt.fs : circuit.params.switching_frequency;
    const auto t_end = opt.t_end ? opt.t_end : circuit.params.t_end;
    if (!duty || !fs || !t_end) {
        err << "error: duty (-D), switching frequency (--fs) and run length (--t-end) are "
               "required, on the command line or in a .param line\n";
        return kExitUsage;
    }
    config.duty = *duty;
    config.switching_frequency = *fs;
    config.t_end = *t_end;
    config.dcm_refine = opt.dcm_refine;
    try {
        config.validate();
    } catch (const InvalidConfig& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const SimulationResult result = run(circuit, config);
    const auto recon = reconstruct(result);

    const SignalFilter filter(opt.signals);
    if (!filter.empty()) {
        bool any = false;
        for (const auto& n : all_signal_names(result, recon)) {
            any = any || filter.matches(n);
        }
        if (!any) {
            err << "error: no signals matched '" << opt.signals << "'\n";
            return kExitNetlist;
        }
    }

    const std::filesystem::path dir(opt.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw FileError("cannot create " + dir.string() + ": " + ec.message());
    }

    const double t_total = result.periods.size() * config.period();
    const double t_from = t_total * (1.0 - opt.stats_window);

    write_file(dir / "averaged.csv",
               [&](std::ostream& os) { write_averaged_csv(os, result, filter); });
    write_file(dir / "instantaneous.csv",
               [&](std::ostream& os) { write_instantaneous_csv(os, recon, filter); });
    write_file(dir / "stats.txt",
               [&](std::ostream& os) { write_stats(os, result, recon, t_from, filter); });
    out << "wrote " << (dir / "averaged.csv").string() << ", instantaneous.csv, stats.txt ("
        << result.periods.size() << " periods)\n";

    if (opt.oracle) {
        OracleConfig oc;
        oc.substeps_per_period = opt.oracle_substeps;
        const OracleResult oracle = simulate_switched(circuit, config, oc);
        write_file(dir / "oracle.csv",
                   [&](std::ostream& os) { write_oracle_csv(os, oracle, filter); });

        const int periods = static_cast<int>(result.periods.size());
        const int window_start =
            std::clamp(static_cast<int>(std::floor(periods * (1.0 - opt.stats_window))), 0,
                       periods - 1);
        std::vector<Deviation> devs;
        for (const auto& name : period_signals(result)) {
            if (filter.matches(name)) {
                devs.push_back(compare_signal(result, oracle, name, 10, window_start));
            }
        }
        write_file(dir / "compare.txt", [&](std::ostream& os) { write_compare(os, devs); });
        out << "wrote oracle.csv, compare.txt\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliOptions opt;
    CLI::App app{"Averaged switching-cell simulator for DC-DC converters", "avgcell"};
    app.add_option("input", opt.input, "Netlist file")->required();
    app.add_option("-D,--duty", opt.duty, "Duty ratio in (0, 1]");
    app.add_option("--fs", opt.fs, "Switching frequency [Hz]");
    app.add_option("--t-end", opt.t_end, "Transient duration [s]");
    app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    app.add_option("--signals", opt.signals, "Comma-separated signal name filter");
    app.add_flag("--oracle", opt.oracle, "Also run the switched reference simulation");
    app.add_option("--oracle-substeps", opt.oracle_substeps, "Oracle substeps per period")
        ->check(CLI::Range(100, 1000000))
        ->capture_default_str();
    app.add_flag("--dcm-refine", opt.dcm_refine, "Re-solve DCM periods once");
    app.add_option("--stats-window", opt.stats_window, "Trailing fraction of the run for stats")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }
    if (!(opt.stats_window > 0.0)) {
        err << "error: --stats-window must be positive\n";
        return kExitUsage;
    }

    try {
        return execute(opt, out, err);
    } catch (const NetlistError& e) {
        err << opt.input << ": " << e.what() << '\n';
        return kExitNetlist;
    } catch (const InvalidCircuit& e) {
        err << opt.input << ": " << e.what() << '\n';
        return kExitNetlist;
    } catch (const SingularSystem& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const FileError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNetlist;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace avgcell
