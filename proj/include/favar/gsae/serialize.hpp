#pragma once

#include <string>

#include "favar/gsae/model.hpp"

namespace favar::gsae {

// Versioned flat binary layout: magic + version, architecture header, then
// every tensor (row-major). Loading validates magic/version and shapes.
void save_params(const std::string& path, const GsAeParams& params);
GsAeParams load_params(const std::string& path);

}  // namespace favar::gsae
