#include "rf/voxel_block_map.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rf {

VoxelBlockMap::VoxelBlockMap(const VoxelBlockMapConfig& config) : config_(config) {
  if ((config_.bucketCount & (config_.bucketCount - 1)) != 0)
    throw std::invalid_argument("bucketCount must be a power of two");
  clear();
}

void VoxelBlockMap::clear() {
  entries_.assign(totalEntries(), HashEntry{});
  vba_.assign(std::size_t(config_.blockCapacity) * kBlockSize3, Voxel{});
  freeBlockStack_.resize(config_.blockCapacity);
  std::iota(freeBlockStack_.begin(), freeBlockStack_.end(), 0);
  freeExcessStack_.resize(config_.excessCount);
  std::iota(freeExcessStack_.begin(), freeExcessStack_.end(), 0);
  visibleList_.clear();
  visibility_.assign(totalEntries(), 0);
}

int VoxelBlockMap::findEntry(const Eigen::Vector3i& blockPos) const {
  int idx = static_cast<int>(hash_index(blockPos, hashMask()));
  while (true) {
    const HashEntry& e = entries_[idx];
    if (e.allocated() && e.pos == blockPos) return idx;
    if (e.offset < 1) return -1;
    idx = static_cast<int>(bucketCount()) + e.offset - 1;
  }
}

Voxel VoxelBlockMap::findVoxel(const Eigen::Vector3i& voxel, bool& found, BlockCache* cache) const {
  const Eigen::Vector3i blockPos = voxelToBlock(voxel);
  const int linear = voxelLinearIndex(voxel, blockPos);

  if (cache && cache->blockPos == blockPos) {
    if (cache->ptr < 0) {
      found = false;
      return Voxel{};
    }
    found = true;
    return vba_[std::size_t(cache->ptr) * kBlockSize3 + linear];
  }

  const int idx = findEntry(blockPos);
  const int ptr = (idx >= 0) ? entries_[idx].ptr : -1;
  if (cache) {
    cache->blockPos = blockPos;
    cache->ptr = ptr >= 0 ? ptr : -1;
  }
  if (ptr < 0) {
    found = false;
    return Voxel{};
  }
  found = true;
  return vba_[std::size_t(ptr) * kBlockSize3 + linear];
}

bool VoxelBlockMap::blockResident(const Eigen::Vector3i& blockPos, BlockCache* cache) const {
  if (cache && cache->blockPos == blockPos) return cache->ptr >= 0;
  const int idx = findEntry(blockPos);
  const int ptr = (idx >= 0) ? entries_[idx].ptr : -1;
  if (cache) {
    cache->blockPos = blockPos;
    cache->ptr = ptr >= 0 ? ptr : -1;
  }
  return ptr >= 0;
}

std::optional<int> VoxelBlockMap::allocateBlock(const Eigen::Vector3i& blockPos) {
  int idx = static_cast<int>(hash_index(blockPos, hashMask()));

  // Walk the chain: return the existing entry (idempotent; swapped-out
  // entries count as allocated), or stop at the bucket/chain tail.
  if (entries_[idx].allocated()) {
    while (true) {
      HashEntry& e = entries_[idx];
      if (e.pos == blockPos && e.allocated()) return idx;
      if (e.offset < 1) break;
      idx = static_cast<int>(bucketCount()) + e.offset - 1;
    }
    // chain exhausted: reserve an excess slot and link it from entries_[idx]
    if (freeExcessStack_.empty() || freeBlockStack_.empty()) return std::nullopt;
    const int excessIdx = freeExcessStack_.back();
    freeExcessStack_.pop_back();
    const int blockPtr = freeBlockStack_.back();
    freeBlockStack_.pop_back();
    const int newIdx = static_cast<int>(bucketCount()) + excessIdx;
    entries_[newIdx] = HashEntry{blockPos, 0, blockPtr};
    entries_[idx].offset = excessIdx + 1;
    return newIdx;
  }

  // free bucket slot
  if (freeBlockStack_.empty()) return std::nullopt;
  const int blockPtr = freeBlockStack_.back();
  freeBlockStack_.pop_back();
  const int keepOffset = entries_[idx].offset;  // an unallocated bucket head never links, but keep it robust
  entries_[idx] = HashEntry{blockPos, keepOffset, blockPtr};
  return idx;
}

bool VoxelBlockMap::reserveBlockForEntry(int entryIdx) {
  HashEntry& e = entries_[entryIdx];
  if (e.ptr >= 0) return true;
  if (freeBlockStack_.empty()) return false;
  const int blockPtr = freeBlockStack_.back();
  freeBlockStack_.pop_back();
  std::fill_n(vba_.begin() + std::size_t(blockPtr) * kBlockSize3, kBlockSize3, Voxel{});
  e.ptr = blockPtr;
  return true;
}

void VoxelBlockMap::releaseBlock(int entryIdx) {
  HashEntry& e = entries_[entryIdx];
  if (e.ptr < 0) return;
  freeBlockStack_.push_back(e.ptr);
  e.ptr = HashEntry::kSwappedOut;
}

float VoxelBlockMap::readSdfTrilinear(const Eigen::Vector3f& p, bool& valid, BlockCache* cache) const {
  float w;
  return readSdfWeightTrilinear(p, valid, w, cache);
}

float VoxelBlockMap::readSdfWeightTrilinear(const Eigen::Vector3f& p, bool& valid, float& weight,
                                            BlockCache* cache) const {
  const Eigen::Vector3i base(static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y())),
                             static_cast<int>(std::floor(p.z())));
  const Eigen::Vector3f f = p - base.cast<float>();
  BlockCache local;
  BlockCache* c = cache ? cache : &local;

  float sdf = 0.f, w = 0.f;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector3i corner = base + Eigen::Vector3i(k & 1, (k >> 1) & 1, (k >> 2) & 1);
    bool found = false;
    const Voxel v = findVoxel(corner, found, c);
    if (!found) {
      valid = false;
      weight = 0.f;
      return 1.f;
    }
    const float bw = ((k & 1) ? f.x() : 1.f - f.x()) * (((k >> 1) & 1) ? f.y() : 1.f - f.y()) *
                     (((k >> 2) & 1) ? f.z() : 1.f - f.z());
    sdf += bw * v.logicalSdf();
    w += bw * float(v.w_depth);
  }
  valid = true;
  weight = w;
  return sdf;
}

Eigen::Vector3f VoxelBlockMap::readColourTrilinear(const Eigen::Vector3f& p, BlockCache* cache) const {
  const Eigen::Vector3i base(static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y())),
                             static_cast<int>(std::floor(p.z())));
  const Eigen::Vector3f f = p - base.cast<float>();
  BlockCache local;
  BlockCache* c = cache ? cache : &local;

  Eigen::Vector3f clr = Eigen::Vector3f::Zero();
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector3i corner = base + Eigen::Vector3i(k & 1, (k >> 1) & 1, (k >> 2) & 1);
    bool found = false;
    const Voxel v = findVoxel(corner, found, c);
    if (!found) continue;
    const float bw = ((k & 1) ? f.x() : 1.f - f.x()) * (((k >> 1) & 1) ? f.y() : 1.f - f.y()) *
                     (((k >> 2) & 1) ? f.z() : 1.f - f.z());
    if constexpr (Voxel::hasColour) clr += bw * Eigen::Vector3f(v.clr[0], v.clr[1], v.clr[2]);
  }
  return clr;
}

float VoxelBlockMap::readSdfNearest(const Eigen::Vector3f& p, bool& valid, BlockCache* cache) const {
  const Eigen::Vector3i voxel(static_cast<int>(std::lround(p.x())), static_cast<int>(std::lround(p.y())),
                              static_cast<int>(std::lround(p.z())));
  bool found = false;
  const Voxel v = findVoxel(voxel, found, cache);
  valid = found;
  return v.logicalSdf();
}

}  // namespace rf
