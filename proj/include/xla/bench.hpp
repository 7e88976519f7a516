#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace xla {

struct SampleStats {
    std::vector<double> samples; // seconds, in run order
    double min = 0;
    double median = 0;
};

SampleStats summarize(std::vector<double> samples);

// W untimed warm-up runs, then R timed runs on a monotonic clock.
SampleStats time_op(const std::function<void()>& task, std::size_t repetitions, std::size_t warmup = 0);

struct PlotPoint {
    std::size_t x = 0;            // problem size
    std::vector<double> samples;  // seconds

    double median() const;
    friend bool operator==(const PlotPoint&, const PlotPoint&) = default;
};

struct PlotSeries {
    std::string name;
    std::vector<PlotPoint> points; // strictly increasing x

    const PlotPoint* at(std::size_t x) const;
    friend bool operator==(const PlotSeries&, const PlotSeries&) = default;
};

struct PlotMetadata {
    std::string op;
    std::string field;
    std::string machine;
    std::string timestamp;

    friend bool operator==(const PlotMetadata&, const PlotMetadata&) = default;
};

struct PlotData {
    PlotMetadata meta;
    std::vector<PlotSeries> series;

    const PlotSeries* find(const std::string& name) const;
    PlotSeries& add_series(const std::string& name);
    // Throws std::invalid_argument when a series is empty, x is not strictly
    // increasing or a point has no samples.
    void validate() const;

    friend bool operator==(const PlotData&, const PlotData&) = default;
};

struct PlotStyle {
    enum class Kind { Csv, Gnuplot };

    Kind kind = Kind::Csv;
    std::string title;
    std::string xlabel = "n";
    std::string ylabel = "seconds";
    bool log_x = true;
    bool log_y = true;
};

/*
 * CSV layout:
 *
 *   # op=<op>
 *   # field=<field>
 *   # machine=<machine>
 *   # timestamp=<timestamp>
 *   series,n,sample_idx,seconds
 *   "<series-name>",<n>,<i>,<seconds>
 *
 * Seconds use the shortest decimal that round-trips the double.
 */
void write_csv(std::ostream& out, const PlotData& data);
PlotData read_csv(std::istream& in);
PlotData read_csv_file(const std::filesystem::path& path);

void write_gnuplot(std::ostream& out, const PlotData& data, const PlotStyle& style, const std::string& csv_path);

// Writes the CSV and, for the gnuplot kind, a script plotting it.
void plot_emit(const PlotData& data, const PlotStyle& style, const std::filesystem::path& csv_path,
               const std::optional<std::filesystem::path>& script_path = std::nullopt);

// hostname/arch, used to tag results.
std::string machine_tag();
// Current UTC time, ISO 8601.
std::string utc_timestamp();

struct RegressionBaseline {
    PlotData data;

    static RegressionBaseline load(const std::filesystem::path& csv);
};

struct RegressionEntry {
    std::string series;
    std::size_t n = 0;
    double baseline = 0; // median seconds
    double current = 0;  // median seconds
    double ratio = 0;    // current / baseline
    bool pass = false;
};

struct RegressionReport {
    enum class Status { Pass, Fail, Indeterminate };

    Status status = Status::Pass;
    bool machines_match = true;
    std::vector<RegressionEntry> entries;

    void print(std::ostream& out) const;
};

// Per shared (series, n): PASS when current median <= baseline median * (1 + rel_tol).
// Different machine tags make the overall status Indeterminate. Throws
// std::invalid_argument when operation or field differ or no key is shared.
RegressionReport regression_check(const PlotData& current, const RegressionBaseline& baseline, double rel_tol);

std::string to_string(RegressionReport::Status s);

} // namespace xla
