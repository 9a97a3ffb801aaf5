#pragma once

#include <string>

#include "eclipse/autodiff.h"

namespace eclipse {

// Checkpoint directory layout: a text manifest listing every array (name,
// group, shape, offset within its group file) plus one flat little-endian
// 64-bit real file per group (environment.f64, material.f64, occluder.f64).
void writeCheckpoint(const std::string& dir, const ad::ParameterStore& store);

// Loads values into an identically laid-out store (registered arrays must
// match by name, group, and shape).
void loadCheckpoint(const std::string& dir, ad::ParameterStore* store);

}  // namespace eclipse
