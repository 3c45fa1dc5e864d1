// Cross-process check of the CLI's CSV surface: run the real binary with
// --out, parse the file back, and verify the grid shape survives intact.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <tspq/sweep.hpp>

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: cli_roundtrip <path-to-tspq>\n";
        return 2;
    }
    const std::string out_path = "cli_roundtrip_out.csv";
    const std::string command = std::string(argv[1]) +
                                " --n 8 --r 2 --sweep lambda-rt:4:12:4"
                                " --mode both --events 20000 --seed 7"
                                " --scheme both --out " +
                                out_path;
    if (std::system(command.c_str()) != 0) {
        std::cerr << "tspq invocation failed\n";
        return 1;
    }

    std::ifstream file(out_path);
    if (!file) {
        std::cerr << "missing output file\n";
        return 1;
    }
    const auto rows = tspq::read_csv(file);
    std::remove(out_path.c_str());

    if (rows.size() != 12) { // 3 points x 2 schemes x 2 modes
        std::cerr << "expected 12 rows, got " << rows.size() << '\n';
        return 1;
    }
    for (const tspq::ReportRow& row : rows) {
        if (!row.error.empty()) {
            std::cerr << "row error: " << row.error << '\n';
            return 1;
        }
        if (row.timestamp.empty()) {
            std::cerr << "expected a timestamp on every row\n";
            return 1;
        }
        const bool sim = row.mode == tspq::EvalMode::Simulation;
        if (sim != row.seed.has_value()) {
            std::cerr << "seed column should mark simulation rows only\n";
            return 1;
        }
    }
    std::cout << "round-tripped " << rows.size() << " rows\n";
    return 0;
}
