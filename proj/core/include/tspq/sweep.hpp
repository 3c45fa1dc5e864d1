#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <tspq/metrics.hpp>
#include <tspq/params.hpp>
#include <tspq/sim.hpp>

namespace tspq {

/// Evaluation route for one report row.
enum class EvalMode {
    Analytic,   ///< generator + stationary solve + rate accounting
    Simulation, ///< discrete-event run + counter estimates
};

/// Which routes a sweep evaluates per grid point.
enum class ModeSelection {
    Analytic,
    Simulation,
    Both,
};

/// One sweep: a grid over a single rate parameter, with every other field of
/// `base` held fixed, evaluated for each selected scheme and mode.
struct SweepSpec {
    /// One of "lambda-rt", "lambda-nrt", "mu-rt", "mu-nrt".
    std::string param_name = "lambda-rt";
    double start = 5.0;
    double stop = 50.0;
    double step = 5.0;
    SystemParams base;
    std::vector<SchemeKind> schemes = {SchemeKind::EbTsp, SchemeKind::BTsp};
    ModeSelection mode = ModeSelection::Analytic;

    // simulation settings (used when mode includes Simulation)
    std::uint64_t events = 1'000'000;
    std::uint64_t seed = 1;
    double warmup_fraction = 0.1;
    int batch_count = 32;
    std::ostream* trace = nullptr; ///< forwarded to every simulation run

    void validate() const; ///< throws std::invalid_argument
    std::vector<double> grid() const;
};

/// One CSV row: a (grid point, scheme, mode) evaluation with its QoS report,
/// simulation standard errors when applicable, and provenance fields.
struct ReportRow {
    std::string param_name;
    double param_value = 0.0;
    SchemeKind scheme = SchemeKind::EbTsp;
    EvalMode mode = EvalMode::Analytic;
    QosReport qos;
    std::optional<double> se_p_loss_rt;
    std::optional<double> se_p_loss_nrt;
    std::optional<double> se_d_rt;
    std::optional<double> se_d_nrt;
    std::optional<std::uint64_t> seed; ///< per-row stream seed, simulation rows
    std::string error;                 ///< nonempty marks a failed evaluation
    std::string timestamp;             ///< provenance; empty when suppressed

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// Evaluates the grid in deterministic order: grid point major, then scheme
/// in spec order, then analytic before simulation. A failed point becomes a
/// row with the error field set instead of aborting the sweep. Simulation
/// rows use per-row seeds derived from spec.seed so the whole sweep is
/// reproducible from the spec alone.
std::vector<ReportRow> run_sweep(const SweepSpec& spec);

/// Per-point scheme deltas (EbTsp minus BTsp) on a shared grid.
struct ComparisonPoint {
    double param_value = 0.0;
    EvalMode mode = EvalMode::Analytic;
    std::optional<double> d_p_loss_rt;
    std::optional<double> d_p_loss_nrt;
    std::optional<double> d_d_rt;
    std::optional<double> d_d_nrt;
    bool rt_loss_violation = false; ///< p_loss_rt(EbTsp) > p_loss_rt(BTsp)
};

struct SchemeComparison {
    std::vector<ComparisonPoint> points;
    std::optional<double> max_rel_dev_p_loss_rt;
    std::optional<double> max_rel_dev_p_loss_nrt;
    std::optional<double> max_rel_dev_d_rt;
    std::optional<double> max_rel_dev_d_nrt;
    int violation_count = 0;
};

/// Pairs the two schemes per (grid value, mode) and reports metric deltas,
/// max relative deviations (relative to the BTsp value), and any point where
/// the push-out scheme loses more RT traffic than the baseline. Throws
/// std::invalid_argument when the rows do not contain both schemes on a
/// shared grid.
SchemeComparison compare_schemes(const std::vector<ReportRow>& rows);

void print_comparison(std::ostream& os, const SchemeComparison& comparison);

inline constexpr const char* kCsvHeader =
    "param_name,param_value,scheme,mode,p_loss_rt,p_loss_nrt,n_rt,n_nrt,d_rt,"
    "d_nrt,se_p_loss_rt,se_p_loss_nrt,se_d_rt,se_d_nrt,seed,error";

/// Writes rows as CSV. Values round-trip exactly (shortest representation
/// that parses back to the same double); not-applicable cells are empty. The
/// trailing timestamp column is omitted entirely when `include_timestamp` is
/// false.
void write_csv(std::ostream& os, const std::vector<ReportRow>& rows,
               bool include_timestamp = true);

/// Parses a file produced by write_csv (either column variant). Throws
/// std::invalid_argument on malformed input.
std::vector<ReportRow> read_csv(std::istream& is);

std::string to_string(SchemeKind scheme);
std::string to_string(EvalMode mode);
SchemeKind scheme_from_string(const std::string& name);
EvalMode mode_from_string(const std::string& name);

} // namespace tspq
