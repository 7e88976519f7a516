#include "xla/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <sys/utsname.h>

#include "xla/errors.hpp"

namespace xla {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

// Splits one CSV record; handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv(const std::string& line, std::size_t lineno) {
    std::vector<std::string> out;
    std::string cur;
    std::size_t i = 0;
    while (true) {
        cur.clear();
        if (i < line.size() && line[i] == '"') {
            ++i;
            while (true) {
                if (i >= line.size()) throw ParseError(lineno, "unterminated quoted field");
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        cur += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                cur += line[i++];
            }
        } else {
            while (i < line.size() && line[i] != ',') cur += line[i++];
        }
        out.push_back(cur);
        if (i >= line.size()) break;
        if (line[i] != ',') throw ParseError(lineno, "unexpected character after quoted field");
        ++i;
    }
    return out;
}

template <class T>
T parse_number(const std::string& s, std::size_t lineno, const char* what) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(lineno, std::string("malformed ") + what + " '" + s + "'");
    return v;
}

} // namespace

SampleStats summarize(std::vector<double> samples) {
    SampleStats s;
    s.samples = std::move(samples);
    if (!s.samples.empty()) {
        s.min = *std::min_element(s.samples.begin(), s.samples.end());
        s.median = median_of(s.samples);
    }
    return s;
}

SampleStats time_op(const std::function<void()>& task, std::size_t repetitions, std::size_t warmup) {
    if (repetitions == 0) throw std::invalid_argument("time_op: at least one repetition is required");
    for (std::size_t i = 0; i < warmup; ++i) task();
    std::vector<double> samples;
    samples.reserve(repetitions);
    for (std::size_t i = 0; i < repetitions; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        task();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    return summarize(std::move(samples));
}

double PlotPoint::median() const { return median_of(samples); }

const PlotPoint* PlotSeries::at(std::size_t x) const {
    auto it = std::lower_bound(points.begin(), points.end(), x, [](const PlotPoint& p, std::size_t v) { return p.x < v; });
    return it != points.end() && it->x == x ? &*it : nullptr;
}

const PlotSeries* PlotData::find(const std::string& name) const {
    for (const auto& s : series) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

PlotSeries& PlotData::add_series(const std::string& name) {
    series.push_back({name, {}});
    return series.back();
}

void PlotData::validate() const {
    for (const auto& s : series) {
        if (s.points.empty()) throw std::invalid_argument("PlotData: series '" + s.name + "' is empty");
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            if (s.points[i].samples.empty()) {
                throw std::invalid_argument("PlotData: series '" + s.name + "' has a point without samples");
            }
            if (i && s.points[i].x <= s.points[i - 1].x) {
                throw std::invalid_argument("PlotData: sizes in series '" + s.name + "' are not strictly increasing");
            }
        }
    }
}

void write_csv(std::ostream& out, const PlotData& data) {
    data.validate();
    out << "# op=" << data.meta.op << '\n'
        << "# field=" << data.meta.field << '\n'
        << "# machine=" << data.meta.machine << '\n'
        << "# timestamp=" << data.meta.timestamp << '\n'
        << "series,n,sample_idx,seconds\n";
    for (const auto& s : data.series) {
        const std::string name = quote(s.name);
        for (const auto& p : s.points) {
            for (std::size_t i = 0; i < p.samples.size(); ++i) {
                out << name << ',' << p.x << ',' << i << ',' << format_double(p.samples[i]) << '\n';
            }
        }
    }
}

PlotData read_csv(std::istream& in) {
    PlotData data;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (header) throw ParseError(lineno, "metadata after the header row");
            const auto body = line.substr(line.find_first_not_of("# "));
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            const auto key = body.substr(0, eq), value = body.substr(eq + 1);
            if (key == "op") data.meta.op = value;
            else if (key == "field") data.meta.field = value;
            else if (key == "machine") data.meta.machine = value;
            else if (key == "timestamp") data.meta.timestamp = value;
            continue;
        }
        if (!header) {
            if (line != "series,n,sample_idx,seconds") throw ParseError(lineno, "expected header 'series,n,sample_idx,seconds'");
            header = true;
            continue;
        }
        const auto f = split_csv(line, lineno);
        if (f.size() != 4) throw ParseError(lineno, "expected 4 fields");
        const auto n = parse_number<std::size_t>(f[1], lineno, "size");
        const auto idx = parse_number<std::size_t>(f[2], lineno, "sample index");
        const auto secs = parse_number<double>(f[3], lineno, "seconds");

        PlotSeries* s = nullptr;
        for (auto& existing : data.series) {
            if (existing.name == f[0]) s = &existing;
        }
        if (!s) s = &data.add_series(f[0]);
        if (s->points.empty() || s->points.back().x != n) {
            if (!s->points.empty() && s->points.back().x > n) {
                throw ParseError(lineno, "sizes in series '" + f[0] + "' are not increasing");
            }
            s->points.push_back({n, {}});
        }
        if (idx != s->points.back().samples.size()) throw ParseError(lineno, "sample indices must count up from 0");
        s->points.back().samples.push_back(secs);
    }
    if (!header) throw ParseError(lineno, "missing header row");
    return data;
}

PlotData read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_csv(in);
}

void write_gnuplot(std::ostream& out, const PlotData& data, const PlotStyle& style, const std::string& csv_path) {
    out << "set datafile separator \",\"\n";
    out << "set title " << quote(style.title.empty() ? data.meta.op : style.title) << '\n';
    out << "set xlabel " << quote(style.xlabel) << '\n';
    out << "set ylabel " << quote(style.ylabel) << '\n';
    if (style.log_x) out << "set logscale x 2\n";
    if (style.log_y) out << "set logscale y\n";
    out << "set key left top\n";
    out << "plot ";
    for (std::size_t i = 0; i < data.series.size(); ++i) {
        const std::string name = quote(data.series[i].name);
        if (i) out << ", \\\n     ";
        out << quote(csv_path) << " using 2:(strcol(1) eq " << name << " ? $4 : NaN) with points title " << name;
    }
    out << '\n';
}

void plot_emit(const PlotData& data, const PlotStyle& style, const std::filesystem::path& csv_path,
               const std::optional<std::filesystem::path>& script_path) {
    data.validate();
    {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write " + csv_path.string());
        write_csv(out, data);
        if (!out) throw std::runtime_error("write failed for " + csv_path.string());
    }
    if (style.kind == PlotStyle::Kind::Gnuplot) {
        const auto path = script_path ? *script_path : std::filesystem::path(csv_path).replace_extension(".gp");
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        write_gnuplot(out, data, style, csv_path.string());
    }
}

std::string machine_tag() {
    utsname u{};
    if (uname(&u) != 0) return "unknown";
    return std::string(u.nodename) + "/" + u.machine;
}

std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

RegressionBaseline RegressionBaseline::load(const std::filesystem::path& csv) { return {read_csv_file(csv)}; }

RegressionReport regression_check(const PlotData& current, const RegressionBaseline& baseline, double rel_tol) {
    const PlotData& base = baseline.data;
    if (current.meta.op != base.meta.op || current.meta.field != base.meta.field) {
        throw std::invalid_argument("regression_check: baseline is for " + base.meta.op + "/" + base.meta.field +
                                    ", current is " + current.meta.op + "/" + current.meta.field);
    }
    RegressionReport report;
    report.machines_match = current.meta.machine == base.meta.machine;
    for (const auto& s : current.series) {
        const PlotSeries* ref = base.find(s.name);
        if (!ref) continue;
        for (const auto& p : s.points) {
            const PlotPoint* rp = ref->at(p.x);
            if (!rp) continue;
            RegressionEntry e;
            e.series = s.name;
            e.n = p.x;
            e.baseline = rp->median();
            e.current = p.median();
            e.ratio = e.baseline > 0 ? e.current / e.baseline : (e.current > 0 ? std::numeric_limits<double>::infinity() : 1.0);
            e.pass = e.current <= e.baseline * (1.0 + rel_tol);
            report.entries.push_back(e);
        }
    }
    if (report.entries.empty()) throw std::invalid_argument("regression_check: no (series, n) key in common");
    const bool all_pass = std::all_of(report.entries.begin(), report.entries.end(), [](const auto& e) { return e.pass; });
    if (!report.machines_match)
        report.status = RegressionReport::Status::Indeterminate;
    else
        report.status = all_pass ? RegressionReport::Status::Pass : RegressionReport::Status::Fail;
    return report;
}

std::string to_string(RegressionReport::Status s) {
    switch (s) {
    case RegressionReport::Status::Pass: return "PASS";
    case RegressionReport::Status::Fail: return "FAIL";
    case RegressionReport::Status::Indeterminate: return "INDETERMINATE";
    }
    return "INDETERMINATE";
}

void RegressionReport::print(std::ostream& out) const {
    if (!machines_match) out << "machine tags differ: timings are not comparable\n";
    for (const auto& e : entries) {
        out << (e.pass ? "PASS " : "FAIL ") << e.series << " n=" << e.n << " baseline=" << format_double(e.baseline)
            << " current=" << format_double(e.current) << " ratio=" << std::fixed << std::setprecision(3) << e.ratio
            << std::defaultfloat << '\n';
    }
    out << "status: " << to_string(status) << '\n';
}

} // namespace xla
