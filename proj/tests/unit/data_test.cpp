#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "actcluster/data/canonical.hpp"
#include "actcluster/data/synthetic.hpp"
#include "actcluster/data/windows.hpp"
#include "actcluster/data/wisdm.hpp"
#include "actcluster/numerics/random.hpp"

using namespace actc;

namespace {

Dataset from_text(const std::string& text)
{
    std::istringstream in(text);
    return read_canonical(in);
}

// One subject, one span, labels as given, signal = time index on every channel.
Dataset ramp(const std::vector<int>& labels, Index channels = 1)
{
    Dataset ds;
    ds.name = "ramp";
    ds.label_names = {"a", "b", "c"};
    SensorRecording r;
    r.subject_id = "s";
    const auto t = static_cast<Index>(labels.size());
    r.signal.resize(t, channels);
    for (Index i = 0; i < t; ++i) r.signal.row(i).setConstant(static_cast<double>(i));
    r.labels = labels;
    r.timestamps.assign(labels.size(), 0.0);
    r.spans = {{0, t}};
    ds.recordings.push_back(r);
    return ds;
}

}  // namespace

TEST_CASE("canonical file: subjects, dropped rows and dense labels")
{
    std::string text = "subject,label,t,c0,c1\n";
    for (int s = 0; s < 2; ++s) {
        for (int i = 0; i < 10; ++i) {
            text += "u" + std::to_string(s) + "," + (i < 5 ? "walk" : "sit") + "," + std::to_string(i) + ",1.5,"
                    + std::to_string(i) + "\n";
        }
    }
    const Dataset two = from_text(text);
    REQUIRE(two.recordings.size() == 2);
    CHECK(two.recordings[0].length() == 10);
    CHECK(two.recordings[1].length() == 10);
    CHECK(two.label_names == std::vector<std::string>{"walk", "sit"});
    CHECK(two.recordings[1].labels[7] == 1);

    const Dataset gap = from_text("subject,label,t,c0\nu,a,0,1\nu,,1,2\nu,a,2,3\nu,b,3,\nu,b,4,5\n");
    REQUIRE(gap.recordings.size() == 1);
    CHECK(gap.recordings[0].length() == 3);
    // each dropped row breaks contiguity
    CHECK(gap.recordings[0].spans == std::vector<Span>{{0, 1}, {1, 2}, {2, 3}});
}

TEST_CASE("canonical file: malformed input names the line")
{
    auto error_of = [](const std::string& text) {
        try {
            from_text(text);
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of("subject,label,t,c0\nu,a,0,1\nu,a,1,1,2\n").find("line 3") != std::string::npos);
    CHECK(error_of("subject,label,t,c0\nu,a,0,1\nu,a,x,1\n").find("line 3") != std::string::npos);
    CHECK(error_of("subject,label,t,c0\nu,a,0,abc\n").find("line 2") != std::string::npos);
    CHECK_THROWS(from_text("subject,label\n"));
}

TEST_CASE("canonical round trip is exact")
{
    SyntheticConfig cfg;
    cfg.span_length = 40;
    cfg.subject_offset_scale = 1.0;
    const Dataset ds = generate_synthetic(cfg);
    std::ostringstream out;
    write_canonical(out, ds);
    const Dataset back = from_text(out.str());
    REQUIRE(back.recordings.size() == ds.recordings.size());
    for (std::size_t s = 0; s < ds.recordings.size(); ++s) {
        CHECK(back.recordings[s].signal == ds.recordings[s].signal);
        CHECK(back.recordings[s].timestamps == ds.recordings[s].timestamps);
        CHECK(back.recordings[s].spans == ds.recordings[s].spans);
        std::vector<std::string> a, b;
        for (int l : ds.recordings[s].labels) a.push_back(ds.label_names[static_cast<std::size_t>(l)]);
        for (int l : back.recordings[s].labels) b.push_back(back.label_names[static_cast<std::size_t>(l)]);
        CHECK(a == b);
    }
}

TEST_CASE("WISDM adapter")
{
    std::istringstream one("33,Jogging,49105962326000,-0.69,12.68,0.50;\n");
    std::ostringstream out;
    const AdaptStats s = adapt_wisdm_v1(one, out);
    CHECK(s.rows_written == 1);
    CHECK(out.str() == "subject,label,t,c0,c1,c2\n33,Jogging,49105962326000,-0.69,12.68,0.50\n");

    std::istringstream empty("");
    std::ostringstream none;
    const AdaptStats e = adapt_wisdm_v1(empty, none);
    CHECK(e.rows_written == 0);
    CHECK_FALSE(e.warnings.empty());

    std::istringstream bad("1,Walking,1,0.1,0.2,0.3;\n1,Walking,2,0.1,,0.3;\n1,Walking,3,0.1,0.2,oops;\n");
    std::ostringstream partial;
    const AdaptStats b = adapt_wisdm_v1(bad, partial);
    CHECK(b.rows_written == 1);
    CHECK(b.rows_skipped == 2);
    CHECK_FALSE(b.warnings.empty());
}

TEST_CASE("WISDM adapter output loads like a directly built dataset")
{
    const char* names[] = {"Walking", "Jogging", "Upstairs", "Downstairs", "Sitting"};
    std::string raw;
    Dataset direct;
    direct.label_names.assign(std::begin(names), std::end(names));
    SensorRecording r;
    r.subject_id = "7";
    r.signal.resize(25, 3);
    for (int i = 0; i < 25; ++i) {
        const int k = i / 5;
        const double x = 0.5 * i, y = -1.25 * k, z = 0.125 * i * k;
        // two records per line, the second without its semicolon at the end
        raw += "7," + std::string(names[k]) + "," + std::to_string(100 + i) + "," + format_double(x) + ","
               + format_double(y) + "," + format_double(z) + (i % 2 ? "\n" : ";");
        r.signal.row(i) << x, y, z;
        r.labels.push_back(k);
        r.timestamps.push_back(100.0 + i);
    }
    r.spans = {{0, 25}};
    direct.recordings.push_back(r);

    std::istringstream in(raw);
    std::ostringstream canonical;
    const AdaptStats stats = adapt_wisdm_v1(in, canonical);
    CHECK(stats.activities == 5);
    const Dataset loaded = from_text(canonical.str());
    CHECK(describe(loaded).classes == 5);
    REQUIRE(loaded.recordings.size() == 1);
    CHECK(loaded.label_names == direct.label_names);
    CHECK(loaded.recordings[0].signal == direct.recordings[0].signal);
    CHECK(loaded.recordings[0].labels == direct.recordings[0].labels);
    CHECK(loaded.recordings[0].timestamps == direct.recordings[0].timestamps);
    CHECK(loaded.recordings[0].spans == direct.recordings[0].spans);
}

TEST_CASE("window count matches enumeration of start offsets")
{
    for (Index t = 0; t <= 64; ++t) {
        for (Index w = 1; w <= 16; ++w) {
            for (Index step = 1; step <= 8; ++step) {
                Index starts = 0;
                for (Index s = 0; s + w <= t; s += step) ++starts;
                REQUIRE(window_count(t, w, step) == starts);
            }
        }
    }
    CHECK(window_count(512, 512, 100) == 1);
    const double ratio = static_cast<double>(window_count(200000, 512, 5)) / window_count(200000, 512, 100);
    CHECK(ratio == doctest::Approx(20.0).epsilon(0.01));
}

TEST_CASE("windows: offsets, spans and labels")
{
    const Dataset ds = ramp({0, 0, 0, 1, 1, 1, 1, 2, 2, 2});
    const WindowSet ws = make_windows(ds, 4, 2);
    REQUIRE(ws.size() == 4);
    for (Index i = 0; i < 4; ++i) CHECK(ws.windows[static_cast<std::size_t>(i)].start == 2 * i);
    CHECK(ws.labels == std::vector<int>{0, 1, 1, 2});  // [0,0,0,1] [0,1,1,1] [1,1,1,2] [1,2,2,2]

    // a gap splits the signal; no window may straddle it
    Dataset gapped = ramp({0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    gapped.recordings[0].spans = {{0, 5}, {5, 10}};
    const WindowSet g = make_windows(gapped, 3, 1);
    CHECK(g.size() == 6);
    for (const WindowRef& w : g.windows) {
        const Span sp = gapped.recordings[0].spans[w.span];
        CHECK(w.start >= sp.begin);
        CHECK(w.start + 3 <= sp.end);
    }
    CHECK(g.chains().size() == 2);
}

TEST_CASE("majority label ties go to the smallest class")
{
    CHECK(majority_window_label(std::vector<int>{1, 1, 2}) == 1);
    CHECK(majority_window_label(std::vector<int>{0, 0, 1, 1}) == 0);
    Rng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<int> labels(1 + uniform_index(rng, 12));
        for (int& l : labels) l = static_cast<int>(uniform_index(rng, 4));
        std::map<int, int> counts;
        for (int l : labels) ++counts[l];
        int best = -1, best_count = 0;
        for (auto [l, c] : counts) {
            if (c > best_count) {
                best = l;
                best_count = c;
            }
        }
        REQUIRE(majority_window_label(labels) == best);
    }
}

TEST_CASE("z-normalization over the windowed data")
{
    SyntheticConfig cfg;
    cfg.span_length = 300;
    cfg.subject_offset_scale = 3.0;
    const Dataset ds = generate_synthetic(cfg);
    const WindowSet ws = make_windows(ds, 64, 7);
    const Tensor all = ws.gather_range(0, ws.size());
    for (Index c = 0; c < ws.channels; ++c) {
        double sum = 0, sq = 0, n = 0;
        for (Index b = 0; b < ws.size(); ++b) {
            for (Index t = 0; t < 64; ++t) {
                const double v = all.at(b, c, t);
                sum += v;
                sq += v * v;
                n += 1;
            }
        }
        const double mean = sum / n;
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(sq / n - mean * mean - 1.0) < 1e-6);
    }
}

TEST_CASE("synthetic generator")
{
    SyntheticConfig cfg;
    cfg.span_length = 500;
    const Dataset a = generate_synthetic(cfg);
    std::ostringstream sa, sb;
    write_canonical(sa, a);
    write_canonical(sb, generate_synthetic(cfg));
    CHECK(sa.str() == sb.str());
    CHECK(a.recordings.size() == 2);
    CHECK(describe(a).classes == 3);

    // each segment's dominant frequency is its class frequency
    const double rate = cfg.sample_rate_hz;
    for (const SensorRecording& r : a.recordings) {
        for (Index seg = 0; seg < r.length() / cfg.span_length; ++seg) {
            const int k = r.labels[static_cast<std::size_t>(seg * cfg.span_length)];
            int best = -1;
            double best_power = -1;
            for (int j = 0; j < cfg.classes; ++j) {
                const double f = synthetic_frequency(cfg, j);
                double re = 0, im = 0;
                for (Index i = 0; i < cfg.span_length; ++i) {
                    const double x = r.signal(seg * cfg.span_length + i, 0);
                    re += x * std::cos(6.283185307179586 * f * static_cast<double>(i) / rate);
                    im += x * std::sin(6.283185307179586 * f * static_cast<double>(i) / rate);
                }
                if (re * re + im * im > best_power) {
                    best_power = re * re + im * im;
                    best = j;
                }
            }
            CHECK(best == k);
        }
    }

    cfg.subject_offset_scale = 2.0;
    const Dataset off = generate_synthetic(cfg);
    for (Index c = 0; c < 3; ++c) {
        const double m0 = off.recordings[0].signal.col(c).mean();
        const double m1 = off.recordings[1].signal.col(c).mean();
        CHECK(std::abs(m0 - m1) >= 1.0);
    }

    for (int k = 0; k < 3; ++k) CHECK(synthetic_frequency(cfg, k) <= 0.4 * rate);
    SyntheticConfig many = cfg;
    many.classes = 12;
    for (int k = 1; k < 12; ++k) CHECK(synthetic_frequency(many, k) > synthetic_frequency(many, k - 1));
    CHECK(synthetic_frequency(many, 11) <= 0.4 * rate + 1e-12);
    SyntheticConfig one = cfg;
    one.classes = 1;
    CHECK_THROWS_AS(generate_synthetic(one), std::invalid_argument);
}

TEST_CASE("subset and describe")
{
    SyntheticConfig cfg;
    cfg.span_length = 50;
    cfg.subjects = 3;
    const Dataset ds = generate_synthetic(cfg);
    const Dataset s1 = subset_subject(ds, 1);
    REQUIRE(s1.recordings.size() == 1);
    CHECK(s1.recordings[0].subject_id == "s1");
    CHECK(s1.label_names == ds.label_names);
    const DatasetSpec spec = describe(ds);
    CHECK(spec.subjects.size() == 3);
    CHECK(spec.channels == 3);
}
