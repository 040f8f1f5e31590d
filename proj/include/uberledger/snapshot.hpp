#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "uberledger/simulator.hpp"

namespace uberledger {

inline constexpr const char* kSnapshotFile = "world.json";

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string snapshot_to_string(const World& world);

/// Rebuilds a world from its JSON form without verifying it; run
/// verify_chain / verify_meta_chain on the result.
World snapshot_from_string(const std::string& text);

void save_snapshot(const World& world, const std::filesystem::path& file);

/// Accepts either the snapshot file or a directory holding world.json.
World load_snapshot(const std::filesystem::path& path);

}  // namespace uberledger
