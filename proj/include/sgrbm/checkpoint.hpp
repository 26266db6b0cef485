#pragma once

#include <cstdint>
#include <string>

#include "sgrbm/dbm.hpp"

namespace sgrbm {

/// Binary checkpoint containers. Arrays are raw little-endian 64-bit floats,
/// matrices stored column-major. RBM files start with "SGRBM1", DBM files
/// with "SGDBM1"; both carry a format version, dimensions, unit types, and
/// optional optimizer state, grouping, rng state, and (DBM) fantasy particles.
struct RbmCheckpoint {
  RbmParams params;
  std::uint32_t epoch = 0;
  OptimizerState opt;
  bool has_opt = false;
  Grouping grouping;
  bool has_grouping = false;
  std::string rng_state;
  bool has_rng = false;
};

struct DbmCheckpoint {
  DbmParams params;
  std::uint32_t epoch = 0;
  DbmOptimizerState opt;
  bool has_opt = false;
  Grouping grouping1;
  Grouping grouping2;
  bool has_groupings = false;
  FantasyParticles particles;
  bool has_particles = false;
  std::string rng_state;
  bool has_rng = false;
};

enum class CheckpointKind { rbm, dbm };

void save_checkpoint(const std::string& path, const RbmCheckpoint& checkpoint);
void save_checkpoint(const std::string& path, const DbmCheckpoint& checkpoint);

/// Reads the magic header; throws ParseError for unrecognized files.
CheckpointKind peek_checkpoint_kind(const std::string& path);

RbmCheckpoint load_rbm_checkpoint(const std::string& path);
DbmCheckpoint load_dbm_checkpoint(const std::string& path);

}  // namespace sgrbm
