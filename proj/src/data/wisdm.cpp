#include "actcluster/data/wisdm.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string_view>

namespace actc {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_number(std::string_view text)
{
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

AdaptStats adapt_wisdm_v1(std::istream& raw, std::ostream& canonical)
{
    AdaptStats stats;
    std::set<std::string, std::less<>> activities;
    canonical << "subject,label,t,c0,c1,c2\n";
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(raw, line)) {
        ++line_no;
        std::string_view rest = line;
        while (!rest.empty()) {
            const std::size_t semi = rest.find(';');
            const std::string_view record = trim(rest.substr(0, semi));
            rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
            if (record.empty()) continue;

            std::string_view fields[6];
            std::size_t count = 0;
            std::string_view cursor = record;
            bool too_many = false;
            while (true) {
                const std::size_t comma = cursor.find(',');
                if (count == 6) {
                    too_many = true;
                    break;
                }
                fields[count++] = trim(cursor.substr(0, comma));
                if (comma == std::string_view::npos) break;
                cursor = cursor.substr(comma + 1);
            }
            // a trailing comma before the semicolon leaves an empty seventh field
            if (too_many && trim(cursor).empty()) too_many = false;
            bool ok = !too_many && count >= 6 && !fields[0].empty() && !fields[1].empty();
            for (std::size_t i = 2; ok && i < 6; ++i) ok = is_number(fields[i]);
            if (!ok) {
                ++stats.rows_skipped;
                continue;
            }
            activities.emplace(fields[1]);
            canonical << fields[0] << ',' << fields[1] << ',' << fields[2] << ',' << fields[3] << ',' << fields[4]
                      << ',' << fields[5] << '\n';
            ++stats.rows_written;
        }
    }
    stats.activities = activities.size();
    if (stats.rows_written == 0) stats.warnings.push_back("no usable records in WISDM input");
    if (stats.rows_skipped > 0) {
        stats.warnings.push_back(std::to_string(stats.rows_skipped) + " record(s) skipped with unparseable fields");
    }
    return stats;
}

AdaptStats adapt_wisdm_v1(const std::filesystem::path& raw_path, const std::filesystem::path& canonical_path)
{
    std::ifstream in(raw_path);
    if (!in) throw std::runtime_error("cannot open WISDM file " + raw_path.string());
    std::ofstream out(canonical_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write canonical file " + canonical_path.string());
    return adapt_wisdm_v1(in, out);
}

}  // namespace actc
