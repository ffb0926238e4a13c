#pragma once

#include <filesystem>

#include "disttack/gnn/params.hpp"

namespace disttack {

// Writes `<prefix>.bin` (little-endian doubles, tensors back to back in
// row-major order) and `<prefix>.json` (model spec, learning rate, tensor
// names, shapes and offsets).
void save_checkpoint(const ParamSet& params, const std::filesystem::path& prefix);

ParamSet load_checkpoint(const std::filesystem::path& prefix);

}  // namespace disttack
