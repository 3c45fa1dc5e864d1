#include <tspq/sweep.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <tspq/ctmc.hpp>

namespace tspq {

namespace {

double& param_field(SystemParams& params, const std::string& name) {
    if (name == "lambda-rt")
        return params.lambda_rt;
    if (name == "lambda-nrt")
        return params.lambda_nrt;
    if (name == "mu-rt")
        return params.mu_rt;
    if (name == "mu-nrt")
        return params.mu_nrt;
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

// splitmix64 mix; decorrelates per-row streams from one spec seed
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

void SweepSpec::validate() const {
    if (!(step > 0))
        throw std::invalid_argument("sweep step must be > 0");
    if (!(start >= 0))
        throw std::invalid_argument("sweep start must be >= 0");
    if (start > stop)
        throw std::invalid_argument("sweep start must not exceed stop");
    if (schemes.empty())
        throw std::invalid_argument("at least one scheme must be selected");
    if (mode != ModeSelection::Analytic) {
        if (events == 0)
            throw std::invalid_argument("event budget must be > 0");
        if (!(warmup_fraction >= 0 && warmup_fraction <= 0.5))
            throw std::invalid_argument("warmup fraction must lie in [0, 0.5]");
        if (batch_count < 1)
            throw std::invalid_argument("batch count must be >= 1");
    }
    // Validate the fixed fields up front with a known-good value in the swept
    // slot; out-of-range swept values surface per row, not as an abort.
    SystemParams probe = base;
    param_field(probe, param_name) = 1.0;
    probe.validate();
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> values;
    const double slack = step * 1e-9;
    for (int k = 0;; ++k) {
        const double value = start + k * step;
        if (value > stop + slack)
            break;
        values.push_back(value);
    }
    return values;
}

namespace {

ReportRow evaluate_point(const SweepSpec& spec, double value, SchemeKind scheme,
                         EvalMode mode, std::uint64_t row_seed) {
    ReportRow row;
    row.param_name = spec.param_name;
    row.param_value = value;
    row.scheme = scheme;
    row.mode = mode;

    SystemParams params = spec.base;
    param_field(params, spec.param_name) = value;

    try {
        params.validate();
        if (mode == EvalMode::Analytic) {
            const StationaryDistribution dist = solve_model(params, scheme);
            row.qos = analytic_qos(dist, params, scheme);
        } else {
            SimConfig config;
            config.params = params;
            config.scheme = scheme;
            config.seed = row_seed;
            config.stop = StopRule::events(spec.events);
            config.warmup_fraction = spec.warmup_fraction;
            config.batch_count = spec.batch_count;
            config.trace = spec.trace;
            const SimCounters counters = run_simulation(config);
            const SimQos sim = qos_from_sim(counters, params);
            row.qos = sim.qos;
            row.se_p_loss_rt = sim.se_p_loss_rt;
            row.se_p_loss_nrt = sim.se_p_loss_nrt;
            row.se_d_rt = sim.se_d_rt;
            row.se_d_nrt = sim.se_d_nrt;
            row.seed = row_seed;
        }
    } catch (const std::exception& err) {
        row.qos = QosReport{};
        row.error = err.what();
    }
    return row;
}

} // namespace

std::vector<ReportRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> values = spec.grid();

    std::vector<ReportRow> rows;
    std::uint64_t salt = 0;
    for (double value : values) {
        for (SchemeKind scheme : spec.schemes) {
            const std::uint64_t row_seed = derive_seed(spec.seed, salt++);
            if (spec.mode != ModeSelection::Simulation)
                rows.push_back(evaluate_point(spec, value, scheme,
                                              EvalMode::Analytic, row_seed));
            if (spec.mode != ModeSelection::Analytic)
                rows.push_back(evaluate_point(spec, value, scheme,
                                              EvalMode::Simulation, row_seed));
        }
    }
    return rows;
}

SchemeComparison compare_schemes(const std::vector<ReportRow>& rows) {
    std::map<std::pair<double, EvalMode>, std::pair<const ReportRow*, const ReportRow*>>
        paired;
    for (const ReportRow& row : rows) {
        if (!row.error.empty())
            continue;
        auto& slot = paired[{row.param_value, row.mode}];
        (row.scheme == SchemeKind::EbTsp ? slot.first : slot.second) = &row;
    }

    SchemeComparison out;
    double max_rel[4] = {-1, -1, -1, -1};
    for (const auto& [key, pair] : paired) {
        const auto [eb, b] = pair;
        if (!eb || !b)
            throw std::invalid_argument(
                "scheme comparison needs both schemes at every grid point");
        ComparisonPoint point;
        point.param_value = key.first;
        point.mode = key.second;

        const auto delta = [](const std::optional<double>& lhs,
                              const std::optional<double>& rhs)
            -> std::optional<double> {
            if (lhs && rhs)
                return *lhs - *rhs;
            return std::nullopt;
        };
        point.d_p_loss_rt = delta(eb->qos.p_loss_rt, b->qos.p_loss_rt);
        point.d_p_loss_nrt = delta(eb->qos.p_loss_nrt, b->qos.p_loss_nrt);
        point.d_d_rt = delta(eb->qos.d_rt, b->qos.d_rt);
        point.d_d_nrt = delta(eb->qos.d_nrt, b->qos.d_nrt);
        if (point.d_p_loss_rt && *point.d_p_loss_rt > 1e-12) {
            point.rt_loss_violation = true;
            ++out.violation_count;
        }

        const std::optional<double> deltas[4] = {point.d_p_loss_rt,
                                                 point.d_p_loss_nrt, point.d_d_rt,
                                                 point.d_d_nrt};
        const std::optional<double> baselines[4] = {
            b->qos.p_loss_rt, b->qos.p_loss_nrt, b->qos.d_rt, b->qos.d_nrt};
        for (int m = 0; m < 4; ++m)
            if (deltas[m])
                max_rel[m] = std::max(max_rel[m],
                                      std::abs(*deltas[m]) /
                                          std::max(std::abs(*baselines[m]), 1e-12));
        out.points.push_back(point);
    }
    if (out.points.empty())
        throw std::invalid_argument("scheme comparison needs a shared grid");

    const auto publish = [](double v) -> std::optional<double> {
        if (v < 0)
            return std::nullopt;
        return v;
    };
    out.max_rel_dev_p_loss_rt = publish(max_rel[0]);
    out.max_rel_dev_p_loss_nrt = publish(max_rel[1]);
    out.max_rel_dev_d_rt = publish(max_rel[2]);
    out.max_rel_dev_d_nrt = publish(max_rel[3]);
    return out;
}

namespace {

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string format_cell(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string();
}

std::string sanitize(const std::string& text) {
    std::string out = text;
    for (char& c : out)
        if (c == ',' || c == '\n' || c == '\r')
            c = ';';
    return out;
}

} // namespace

void print_comparison(std::ostream& os, const SchemeComparison& comparison) {
    os << "scheme comparison (eb-tsp minus b-tsp), " << comparison.points.size()
       << " point(s)\n";
    for (const ComparisonPoint& point : comparison.points) {
        os << "  value=" << format_double(point.param_value) << " mode="
           << to_string(point.mode)
           << " d_p_loss_rt=" << format_cell(point.d_p_loss_rt)
           << " d_p_loss_nrt=" << format_cell(point.d_p_loss_nrt)
           << " d_d_rt=" << format_cell(point.d_d_rt)
           << " d_d_nrt=" << format_cell(point.d_d_nrt)
           << (point.rt_loss_violation ? " [rt-loss-violation]" : "") << '\n';
    }
    os << "  max relative deviation:"
       << " p_loss_rt=" << format_cell(comparison.max_rel_dev_p_loss_rt)
       << " p_loss_nrt=" << format_cell(comparison.max_rel_dev_p_loss_nrt)
       << " d_rt=" << format_cell(comparison.max_rel_dev_d_rt)
       << " d_nrt=" << format_cell(comparison.max_rel_dev_d_nrt) << '\n'
       << "  rt-loss violations: " << comparison.violation_count << '\n';
}

std::string to_string(SchemeKind scheme) {
    return scheme == SchemeKind::EbTsp ? "eb-tsp" : "b-tsp";
}

std::string to_string(EvalMode mode) {
    return mode == EvalMode::Analytic ? "analytic" : "sim";
}

SchemeKind scheme_from_string(const std::string& name) {
    if (name == "eb-tsp")
        return SchemeKind::EbTsp;
    if (name == "b-tsp")
        return SchemeKind::BTsp;
    throw std::invalid_argument("unknown scheme: " + name);
}

EvalMode mode_from_string(const std::string& name) {
    if (name == "analytic")
        return EvalMode::Analytic;
    if (name == "sim")
        return EvalMode::Simulation;
    throw std::invalid_argument("unknown mode: " + name);
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows,
               bool include_timestamp) {
    os << kCsvHeader;
    if (include_timestamp)
        os << ",timestamp";
    os << '\n';
    for (const ReportRow& row : rows) {
        os << sanitize(row.param_name) << ',' << format_double(row.param_value)
           << ',' << to_string(row.scheme) << ',' << to_string(row.mode) << ','
           << format_cell(row.qos.p_loss_rt) << ','
           << format_cell(row.qos.p_loss_nrt) << ','
           << format_double(row.qos.n_rt) << ',' << format_double(row.qos.n_nrt)
           << ',' << format_cell(row.qos.d_rt) << ','
           << format_cell(row.qos.d_nrt) << ','
           << format_cell(row.se_p_loss_rt) << ','
           << format_cell(row.se_p_loss_nrt) << ',' << format_cell(row.se_d_rt)
           << ',' << format_cell(row.se_d_nrt) << ','
           << (row.seed ? std::to_string(*row.seed) : std::string()) << ','
           << sanitize(row.error);
        if (include_timestamp)
            os << ',' << sanitize(row.timestamp);
        os << '\n';
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

double parse_double(const std::string& cell) {
    double value = 0;
    const auto result =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (result.ec != std::errc() || result.ptr != cell.data() + cell.size())
        throw std::invalid_argument("malformed numeric cell: '" + cell + "'");
    return value;
}

std::optional<double> parse_optional(const std::string& cell) {
    if (cell.empty())
        return std::nullopt;
    return parse_double(cell);
}

std::uint64_t parse_seed(const std::string& cell) {
    std::uint64_t value = 0;
    const auto result =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (result.ec != std::errc() || result.ptr != cell.data() + cell.size())
        throw std::invalid_argument("malformed seed cell: '" + cell + "'");
    return value;
}

} // namespace

std::vector<ReportRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("empty CSV input");
    const std::vector<std::string> header = split_line(line);
    const std::vector<std::string> base = split_line(kCsvHeader);
    const bool has_timestamp =
        header.size() == base.size() + 1 && header.back() == "timestamp";
    if (!has_timestamp && header != base)
        throw std::invalid_argument("unrecognized CSV header");
    if (has_timestamp &&
        !std::equal(base.begin(), base.end(), header.begin()))
        throw std::invalid_argument("unrecognized CSV header");

    std::vector<ReportRow> rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("CSV row with wrong column count");
        ReportRow row;
        row.param_name = cells[0];
        row.param_value = parse_double(cells[1]);
        row.scheme = scheme_from_string(cells[2]);
        row.mode = mode_from_string(cells[3]);
        row.qos.p_loss_rt = parse_optional(cells[4]);
        row.qos.p_loss_nrt = parse_optional(cells[5]);
        row.qos.n_rt = parse_double(cells[6]);
        row.qos.n_nrt = parse_double(cells[7]);
        row.qos.d_rt = parse_optional(cells[8]);
        row.qos.d_nrt = parse_optional(cells[9]);
        row.se_p_loss_rt = parse_optional(cells[10]);
        row.se_p_loss_nrt = parse_optional(cells[11]);
        row.se_d_rt = parse_optional(cells[12]);
        row.se_d_nrt = parse_optional(cells[13]);
        if (!cells[14].empty())
            row.seed = parse_seed(cells[14]);
        row.error = cells[15];
        if (has_timestamp)
            row.timestamp = cells[16];
        rows.push_back(row);
    }
    return rows;
}

} // namespace tspq
