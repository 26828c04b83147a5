#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "actcluster/data/recording.hpp"

/// Canonical dataset file: UTF-8 CSV with header `subject,label,t,c0,...`,
/// one time point per row. An empty label means unlabeled; an empty or
/// non-finite channel value means missing data. Such rows are dropped and
/// break the contiguity of the subject's signal.
namespace actc {

Dataset read_canonical(std::istream& in, const std::string& name = "dataset");
Dataset load_canonical(const std::filesystem::path& path);

/// Writes a dataset so that read_canonical reproduces it exactly (values use
/// shortest round-trip formatting; span breaks are written as unlabeled rows).
void write_canonical(std::ostream& out, const Dataset& dataset);
void save_canonical(const std::filesystem::path& path, const Dataset& dataset);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace actc
