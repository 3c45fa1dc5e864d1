// Command-line front end: single-point evaluation, lambda sweeps, scheme
// comparison and analytic-vs-simulation cross-checks, emitted as CSV.

#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <tspq/sweep.hpp>

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buffer;
}

tspq::SweepSpec parse_sweep_flag(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream stream(text);
    std::string part;
    while (std::getline(stream, part, ':'))
        parts.push_back(part);
    if (parts.size() != 4)
        throw std::invalid_argument(
            "--sweep expects <param:start:stop:step>, got '" + text + "'");
    tspq::SweepSpec spec;
    spec.param_name = parts[0];
    spec.start = std::stod(parts[1]);
    spec.stop = std::stod(parts[2]);
    spec.step = std::stod(parts[3]);
    return spec;
}

} // namespace

int run(int argc, char** argv) {
    CLI::App app{"Time-space-priority buffer analysis: exact chain solve and "
                 "discrete-event simulation for the eb-tsp and b-tsp schemes"};
    app.set_version_flag("--version", "tspq 0.1.0");

    std::string scheme = "both";
    app.add_option("--scheme", scheme, "Scheme(s) to evaluate")
        ->check(CLI::IsMember({"eb-tsp", "b-tsp", "both"}))
        ->capture_default_str();

    tspq::SystemParams params{60, 15, 10.0, 8.0, 30.0, 25.0};
    app.add_option("--n", params.capacity_n, "Buffer capacity (packets)")
        ->capture_default_str();
    app.add_option("--r", params.threshold_r, "RT threshold")
        ->capture_default_str();
    bool lambda_rt_given = false;
    app.add_option("--lambda-rt", params.lambda_rt, "RT arrival rate")
        ->capture_default_str()
        ->each([&](const std::string&) { lambda_rt_given = true; });
    app.add_option("--lambda-nrt", params.lambda_nrt, "NRT arrival rate")
        ->capture_default_str();
    app.add_option("--mu-rt", params.mu_rt, "RT service rate")
        ->capture_default_str();
    app.add_option("--mu-nrt", params.mu_nrt, "NRT service rate")
        ->capture_default_str();

    std::string sweep_flag;
    app.add_option("--sweep", sweep_flag,
                   "Sweep one rate parameter, <param:start:stop:step> with "
                   "param one of lambda-rt, lambda-nrt, mu-rt, mu-nrt. "
                   "Default (no --sweep, no --lambda-rt): lambda-rt:5:50:5");

    std::string mode = "analytic";
    app.add_option("--mode", mode, "Evaluation route(s) per point")
        ->check(CLI::IsMember({"analytic", "sim", "both"}))
        ->capture_default_str();

    std::uint64_t events = 1'000'000;
    app.add_option("--events", events, "Event budget per simulation run")
        ->capture_default_str();
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "Base seed; per-row streams derive from it")
        ->capture_default_str();
    double warmup = 0.1;
    app.add_option("--warmup", warmup, "Warmup fraction of the budget, [0, 0.5]")
        ->capture_default_str();
    int batches = 32;
    app.add_option("--batches", batches, "Batch count for standard errors")
        ->capture_default_str();

    std::string out_path = "-";
    app.add_option("--out", out_path, "Output CSV path ('-' for stdout)")
        ->capture_default_str();
    bool trace = false;
    app.add_flag("--trace", trace, "Dump every simulation event to stderr");
    bool no_timestamp = false;
    app.add_flag("--no-timestamp", no_timestamp,
                 "Omit the timestamp column for byte-reproducible output");

    CLI11_PARSE(app, argc, argv);

    try {
        tspq::SweepSpec spec;
        if (!sweep_flag.empty()) {
            spec = parse_sweep_flag(sweep_flag);
        } else if (lambda_rt_given) {
            spec.param_name = "lambda-rt";
            spec.start = spec.stop = params.lambda_rt;
            spec.step = 1.0;
        } else {
            spec.param_name = "lambda-rt";
            spec.start = 5.0;
            spec.stop = 50.0;
            spec.step = 5.0;
        }
        spec.base = params;
        if (scheme == "eb-tsp")
            spec.schemes = {tspq::SchemeKind::EbTsp};
        else if (scheme == "b-tsp")
            spec.schemes = {tspq::SchemeKind::BTsp};
        else
            spec.schemes = {tspq::SchemeKind::EbTsp, tspq::SchemeKind::BTsp};
        spec.mode = mode == "analytic"  ? tspq::ModeSelection::Analytic
                    : mode == "sim"     ? tspq::ModeSelection::Simulation
                                        : tspq::ModeSelection::Both;
        spec.events = events;
        spec.seed = seed;
        spec.warmup_fraction = warmup;
        spec.batch_count = batches;
        if (trace)
            spec.trace = &std::cerr;
        spec.validate();

        std::vector<tspq::ReportRow> rows = tspq::run_sweep(spec);
        if (!no_timestamp) {
            const std::string stamp = utc_timestamp();
            for (tspq::ReportRow& row : rows)
                row.timestamp = stamp;
        }

        std::ofstream file;
        if (out_path != "-") {
            file.open(out_path);
            if (!file)
                throw std::runtime_error("cannot open output file: " + out_path);
        }
        std::ostream& os = out_path == "-" ? std::cout : file;
        tspq::write_csv(os, rows, !no_timestamp);
        os.flush();
        if (!os)
            throw std::runtime_error("failed writing CSV output");

        int failed = 0;
        for (const tspq::ReportRow& row : rows)
            if (!row.error.empty())
                ++failed;
        if (failed)
            std::cerr << failed << " of " << rows.size()
                      << " rows failed; see the error column\n";

        if (spec.schemes.size() == 2) {
            try {
                tspq::print_comparison(std::cerr, tspq::compare_schemes(rows));
            } catch (const std::exception& err) {
                std::cerr << "scheme comparison unavailable: " << err.what()
                          << '\n';
            }
        }
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
}

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
}
