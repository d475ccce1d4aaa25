#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gnireg/network.hpp"

namespace gnireg {

// Weight checkpoint: layer dims, activation names, row-major weights, biases,
// and the seed the network was produced with.
struct Checkpoint {
  Network network;
  std::uint64_t seed = 0;
  std::size_t step = 0;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
// Throws FormatError on malformed documents.
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gnireg
