#pragma once

#include <memory>
#include <string>

#include "lord/model.hpp"

namespace lord {

// Persists any trained model to a single self-describing file and restores
// it by sniffing the format, so callers never track which family produced a
// file. Saving a restored model reproduces the file byte for byte.
void save_model(const OpenSetModel& model, const std::string& path);
std::unique_ptr<OpenSetModel> load_model(const std::string& path);

}  // namespace lord
