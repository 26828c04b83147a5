#include "actcluster/data/canonical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace actc {

namespace {

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

enum class FieldStatus { ok, missing, malformed };

FieldStatus parse_number(std::string_view text, double& value)
{
    text = trim(text);
    if (text.empty()) return FieldStatus::missing;
    if (text == "nan" || text == "NaN" || text == "NA") return FieldStatus::missing;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return FieldStatus::malformed;
    if (!std::isfinite(value)) return FieldStatus::missing;
    return FieldStatus::ok;
}

struct Builder {
    SensorRecording recording;
    std::vector<double> values;  // row-major, C per point
};

}  // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

Dataset read_canonical(std::istream& in, const std::string& name)
{
    Dataset ds;
    ds.name = name;
    std::string line;
    if (!std::getline(in, line)) return ds;
    const auto header = split_commas(trim(line));
    if (header.size() < 4 || trim(header[0]) != "subject" || trim(header[1]) != "label" || trim(header[2]) != "t") {
        throw std::runtime_error("line 1: canonical header must start with subject,label,t and name at least one channel");
    }
    const std::size_t channels = header.size() - 3;
    for (std::size_t c = 0; c < channels; ++c) ds.channel_names.emplace_back(trim(header[3 + c]));

    std::map<std::string, std::size_t, std::less<>> subject_index;
    std::map<std::string, int, std::less<>> label_index;
    std::vector<Builder> builders;
    std::string prev_subject;
    bool prev_kept = false;
    std::size_t line_no = 1;
    std::vector<double> row(channels);

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty()) {
            prev_kept = false;
            continue;
        }
        const auto fields = split_commas(text);
        if (fields.size() != channels + 3) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " + std::to_string(channels + 3)
                                     + " fields, found " + std::to_string(fields.size()));
        }
        const std::string_view subject = trim(fields[0]);
        if (subject.empty()) throw std::runtime_error("line " + std::to_string(line_no) + ": empty subject field");
        const std::string_view label = trim(fields[1]);

        bool missing = label.empty();
        double t = 0.0;
        const FieldStatus ts = parse_number(fields[2], t);
        if (ts == FieldStatus::malformed) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": malformed timestamp '"
                                     + std::string(trim(fields[2])) + "'");
        }
        missing = missing || ts == FieldStatus::missing;
        for (std::size_t c = 0; c < channels; ++c) {
            const FieldStatus st = parse_number(fields[3 + c], row[c]);
            if (st == FieldStatus::malformed) {
                throw std::runtime_error("line " + std::to_string(line_no) + ": malformed value '"
                                         + std::string(trim(fields[3 + c])) + "' in channel "
                                         + ds.channel_names[c]);
            }
            missing = missing || st == FieldStatus::missing;
        }

        auto sit = subject_index.find(subject);
        if (sit == subject_index.end()) {
            sit = subject_index.emplace(std::string(subject), builders.size()).first;
            builders.emplace_back();
            builders.back().recording.subject_id = std::string(subject);
        }
        const bool continues = prev_kept && prev_subject == subject;
        prev_subject = std::string(subject);
        prev_kept = !missing;
        if (missing) continue;

        auto lit = label_index.find(label);
        if (lit == label_index.end()) {
            lit = label_index.emplace(std::string(label), static_cast<int>(ds.label_names.size())).first;
            ds.label_names.emplace_back(label);
        }
        Builder& b = builders[sit->second];
        const Index pos = static_cast<Index>(b.recording.labels.size());
        if (continues && !b.recording.spans.empty() && b.recording.spans.back().end == pos) {
            b.recording.spans.back().end = pos + 1;
        } else {
            b.recording.spans.push_back({pos, pos + 1});
        }
        b.recording.labels.push_back(lit->second);
        b.recording.timestamps.push_back(t);
        b.values.insert(b.values.end(), row.begin(), row.end());
    }

    for (Builder& b : builders) {
        SensorRecording& r = b.recording;
        if (r.labels.empty()) continue;
        const Index n = static_cast<Index>(r.labels.size());
        r.signal = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            b.values.data(), n, static_cast<Index>(channels));
        // sample rate from the median positive timestamp increment, when the clock is usable
        std::vector<double> dt;
        for (Index i = 1; i < n; ++i) {
            const double d = r.timestamps[static_cast<std::size_t>(i)] - r.timestamps[static_cast<std::size_t>(i - 1)];
            if (d > 0) dt.push_back(d);
        }
        if (!dt.empty()) {
            std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2), dt.end());
            r.sample_rate_hz = 1.0 / dt[dt.size() / 2];
        }
        validate(r);
        ds.recordings.push_back(std::move(r));
    }
    return ds;
}

Dataset load_canonical(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open canonical file " + path.string());
    return read_canonical(in, path.stem().string());
}

void write_canonical(std::ostream& out, const Dataset& ds)
{
    Index channels = ds.recordings.empty() ? static_cast<Index>(ds.channel_names.size())
                                           : ds.recordings.front().channels();
    out << "subject,label,t";
    for (Index c = 0; c < channels; ++c) {
        out << ',';
        if (static_cast<std::size_t>(c) < ds.channel_names.size()) out << ds.channel_names[static_cast<std::size_t>(c)];
        else out << 'c' << c;
    }
    out << '\n';
    for (const auto& r : ds.recordings) {
        for (std::size_t s = 0; s < r.spans.size(); ++s) {
            if (s > 0) {
                out << r.subject_id << ",,";
                for (Index c = 0; c < channels; ++c) out << ',';
                out << '\n';
            }
            for (Index i = r.spans[s].begin; i < r.spans[s].end; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                const int label = r.labels[ui];
                out << r.subject_id << ','
                    << (static_cast<std::size_t>(label) < ds.label_names.size() ? ds.label_names[static_cast<std::size_t>(label)]
                                                                                : std::to_string(label))
                    << ',' << format_double(r.timestamps.empty() ? static_cast<double>(i) : r.timestamps[ui]);
                for (Index c = 0; c < channels; ++c) out << ',' << format_double(r.signal(i, c));
                out << '\n';
            }
        }
    }
}

void save_canonical(const std::filesystem::path& path, const Dataset& dataset)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write canonical file " + path.string());
    write_canonical(out, dataset);
}

}  // namespace actc
