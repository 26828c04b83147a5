#pragma once

#include <filesystem>
#include <iosfwd>

#include "actcluster/encoder/encoder.hpp"

/// Portable text checkpoint of an encoder:
///
///     actcluster-encoder 1
///     channels <C> latent <D> window <W> pool <P> activation <relu|none> batchnorm <0|1>
///     conv <filter_len> <stride> <filters>      (four lines)
///     tensor <name> <rank> <dim>...
///     <values, shortest round-trip decimal, space separated>
///
/// Tensors are written in name order: trainable parameters, then the
/// batchnorm running statistics as bn<l>.running_mean / bn<l>.running_var.
namespace actc {

void write_encoder(std::ostream& out, const Encoder& encoder);
Encoder read_encoder(std::istream& in);

void save_encoder(const std::filesystem::path& path, const Encoder& encoder);
Encoder load_encoder(const std::filesystem::path& path);

}  // namespace actc
