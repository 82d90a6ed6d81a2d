#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "rf/voxel.hpp"

namespace rf {

/// Hash-table entry. ptr semantics:
///   >= 0  index of the block in the voxel block array
///   == -1 allocated but swapped out to host storage (pos remains valid)
///   <  -1 unallocated
struct HashEntry {
  Eigen::Vector3i pos{0, 0, 0};  // block corner, in block units
  int offset = 0;                // >= 1 links to excess slot (offset - 1)
  int ptr = kUnallocated;

  static constexpr int kSwappedOut = -1;
  static constexpr int kUnallocated = -2;

  bool allocated() const { return ptr >= -1; }
  bool inMemory() const { return ptr >= 0; }
};

enum class Visibility : std::uint8_t {
  kInvisible = 0,
  kVisible = 1,        // visible, block resident in memory
  kVisibleSwapped = 2, // visible but awaiting swap-in (ptr == -1)
  kBoundary = 3,       // within the swap-in margin outside the frustum
};

struct VoxelBlockMapConfig {
  std::uint32_t bucketCount = 1u << 20;  // power of two; hashMask = bucketCount - 1
  std::uint32_t excessCount = 1u << 17;
  std::uint32_t blockCapacity = 1u << 18;  // blocks in the voxel block array

  static VoxelBlockMapConfig small() {
    // desk-scale test configuration
    return {1u << 14, 1u << 11, 1u << 13};
  }
};

inline std::uint32_t hash_index(const Eigen::Vector3i& blockPos, std::uint32_t hashMask) {
  return (static_cast<std::uint32_t>(blockPos.x()) * 73856093u ^
          static_cast<std::uint32_t>(blockPos.y()) * 19349669u ^
          static_cast<std::uint32_t>(blockPos.z()) * 83492791u) &
         hashMask;
}

/// Voxel coordinate -> owning block corner (floor division by 8).
inline Eigen::Vector3i voxelToBlock(const Eigen::Vector3i& voxel) {
  return {voxel.x() >> 3, voxel.y() >> 3, voxel.z() >> 3};
}

/// Linear index of a voxel within its block.
inline int voxelLinearIndex(const Eigen::Vector3i& voxel, const Eigen::Vector3i& blockPos) {
  const Eigen::Vector3i local = voxel - blockPos * kBlockSize;
  return local.x() + local.y() * kBlockSize + local.z() * kBlockSize * kBlockSize;
}

/// Last-block read cache; callers own one per reader thread.
struct BlockCache {
  Eigen::Vector3i blockPos{INT32_MIN, INT32_MIN, INT32_MIN};
  int ptr = -1;
};

/// The hashed TSDF world model: ordered buckets of size 1 plus an excess
/// list linked through HashEntry::offset, over a contiguous voxel block
/// array. Entry removal is not supported.
class VoxelBlockMap {
 public:
  explicit VoxelBlockMap(const VoxelBlockMapConfig& config = VoxelBlockMapConfig::small());

  const VoxelBlockMapConfig& config() const { return config_; }
  std::uint32_t bucketCount() const { return config_.bucketCount; }
  std::uint32_t totalEntries() const { return config_.bucketCount + config_.excessCount; }
  std::uint32_t hashMask() const { return config_.bucketCount - 1; }

  const std::vector<HashEntry>& entries() const { return entries_; }
  HashEntry& entry(int idx) { return entries_[idx]; }
  const HashEntry& entry(int idx) const { return entries_[idx]; }

  Voxel* blockData(int blockPtr) { return vba_.data() + std::size_t(blockPtr) * kBlockSize3; }
  const Voxel* blockData(int blockPtr) const { return vba_.data() + std::size_t(blockPtr) * kBlockSize3; }

  int freeBlockCount() const { return static_cast<int>(freeBlockStack_.size()); }
  int freeExcessCount() const { return static_cast<int>(freeExcessStack_.size()); }
  int allocatedBlockCount() const { return static_cast<int>(config_.blockCapacity) - freeBlockCount(); }

  /// Entry index for blockPos if present (ptr >= -1), else -1.
  int findEntry(const Eigen::Vector3i& blockPos) const;

  /// Walks bucket + excess chain. Misses return a default voxel, found=false.
  Voxel findVoxel(const Eigen::Vector3i& voxel, bool& found, BlockCache* cache = nullptr) const;

  /// Idempotent insertion; returns the entry index, or nullopt when the VBA
  /// or the excess list is exhausted (map unchanged).
  std::optional<int> allocateBlock(const Eigen::Vector3i& blockPos);

  /// Reserves a VBA block for an existing entry (swap-in path). Returns
  /// false when the VBA is exhausted.
  bool reserveBlockForEntry(int entryIdx);

  /// Releases the VBA block of an entry and marks it swapped out.
  void releaseBlock(int entryIdx);

  /// Trilinear sdf read at float voxel coordinates; valid=false when any of
  /// the 8 surrounding voxels lies in an unallocated (or non-resident) block.
  float readSdfTrilinear(const Eigen::Vector3f& p, bool& valid, BlockCache* cache = nullptr) const;

  /// As readSdfTrilinear, also interpolating the integration weight.
  float readSdfWeightTrilinear(const Eigen::Vector3f& p, bool& valid, float& weight,
                               BlockCache* cache = nullptr) const;

  /// Trilinear colour blend of the 8 surrounding voxels (zero-weight voxels
  /// contribute their stored colour; callers gate on the sdf validity).
  Eigen::Vector3f readColourTrilinear(const Eigen::Vector3f& p, BlockCache* cache = nullptr) const;

  /// Nearest-voxel sdf; valid=false when the containing block is not resident.
  float readSdfNearest(const Eigen::Vector3f& p, bool& valid, BlockCache* cache = nullptr) const;

  bool blockResident(const Eigen::Vector3i& blockPos, BlockCache* cache = nullptr) const;

  // --- visibility bookkeeping (filled by the allocation stage) ---
  std::vector<int>& visibleList() { return visibleList_; }
  const std::vector<int>& visibleList() const { return visibleList_; }
  std::vector<std::uint8_t>& visibilityTypes() { return visibility_; }
  const std::vector<std::uint8_t>& visibilityTypes() const { return visibility_; }

  void clear();

 private:
  VoxelBlockMapConfig config_;
  std::vector<HashEntry> entries_;
  std::vector<Voxel> vba_;
  std::vector<int> freeBlockStack_;
  std::vector<int> freeExcessStack_;
  std::vector<int> visibleList_;
  std::vector<std::uint8_t> visibility_;
};

}  // namespace rf
