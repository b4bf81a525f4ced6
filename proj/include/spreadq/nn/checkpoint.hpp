#pragma once

#include <filesystem>

#include "spreadq/nn/qnet.hpp"

namespace spreadq::nn {

// Flat JSON of named arrays with shape headers:
// {"format": "spreadq-qnet", "version": 1, "config": {...},
//  "params": [{"name", "rows", "cols", "values": [...]}]}
void save_checkpoint(const std::filesystem::path& path, const QNetwork& net);
QNetwork load_checkpoint(const std::filesystem::path& path);
// Loads values into an existing network; every block must match by name and
// shape.
void load_checkpoint_into(const std::filesystem::path& path, QNetwork& net);

}  // namespace spreadq::nn
