#pragma once

#include <filesystem>
#include <string>

#include "satrrm/cnn.hpp"
#include "satrrm/snn.hpp"

// Model checkpoints: one blob file with a JSON header (architecture and
// hyperparameters) followed by float32 weight blocks. Weights are rounded to
// f32 on save, so a reloaded model may differ from the in-memory one by f32
// quantization.

namespace satrrm::checkpoint {

std::string model_kind(const std::filesystem::path& path);  // "snn" or "cnn"

void save_snn(const std::filesystem::path& path, const snn::LayeredSnn& net);
snn::LayeredSnn load_snn(const std::filesystem::path& path);

void save_cnn(const std::filesystem::path& path, const cnn::CnnModel& model);
cnn::CnnModel load_cnn(const std::filesystem::path& path);

}  // namespace satrrm::checkpoint
