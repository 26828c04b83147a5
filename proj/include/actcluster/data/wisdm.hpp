#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace actc {

struct AdaptStats {
    std::size_t rows_written = 0;
    std::size_t rows_skipped = 0;
    std::size_t activities = 0;
    std::vector<std::string> warnings;
};

/// Converts the WISDM v1 raw accelerometer file (`user,activity,timestamp,x,y,z;`
/// records, trailing semicolons tolerated, several records per line allowed)
/// into the canonical format with channels c0,c1,c2. Records with a
/// non-numeric field are skipped and counted.
AdaptStats adapt_wisdm_v1(std::istream& raw, std::ostream& canonical);
AdaptStats adapt_wisdm_v1(const std::filesystem::path& raw_path, const std::filesystem::path& canonical_path);

}  // namespace actc
