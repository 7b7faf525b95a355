// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>

#include "continuation.hpp"
#include "mesh.hpp"

namespace ltopt {

// Text snapshot of a potential:
//
//   # ltopt snapshot
//   # d=3 gamma=0.88 N=6000 L=10000 grading=2 norm=1 kind=radial_halfline
//   r,V
//   0,-0.0010810...
//
// Every number is written with 17 significant digits, so reading a snapshot
// back reproduces the grid and the nodal values bit for bit.
void write_snapshot(std::ostream& os, const PotentialField& V);
PotentialField read_snapshot(std::istream& is);

void save_snapshot(const std::filesystem::path& path, const PotentialField& V);
PotentialField load_snapshot(const std::filesystem::path& path);

/// %.17g formatting.
std::string exact(double value);

/// One directory per branch under a common root. Snapshot writes for
/// distinct (branch, gamma) keys may come from different threads.
class BranchStore {
 public:
  explicit BranchStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path branch_dir(const std::string& branch_id) const;

  /// Sink writing point_<gamma>.csv into the branch's directory.
  SnapshotSink sink(const std::string& branch_id);

  /// manifest.json: label, d, direction, gammas, ratios, bound states,
  /// snapshot files, branch events and termination reason.
  void write_manifest(const std::string& branch_id, const Branch& branch);

 private:
  std::filesystem::path root_;
  std::mutex mutex_;
};

}  // namespace ltopt
