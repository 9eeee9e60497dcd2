#include "groupattr/partition.hpp"

#include <algorithm>
#include <numeric>

namespace groupattr {

namespace {

RationalWeight::Int factorial(int n) {
  RationalWeight::Int r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

RationalWeight::RationalWeight(Int num, Int den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw std::invalid_argument("rational: zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  Int g = boost::multiprecision::gcd(num_ < 0 ? Int(-num_) : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

double RationalWeight::to_double() const {
  return num_.convert_to<double>() / den_.convert_to<double>();
}

RationalWeight RationalWeight::operator+(const RationalWeight& o) const {
  return RationalWeight(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalWeight RationalWeight::operator*(const RationalWeight& o) const {
  return RationalWeight(num_ * o.num_, den_ * o.den_);
}

RationalWeight shapley_weight(int s, int n) {
  if (n < 1 || s < 0 || s > n - 1)
    throw std::invalid_argument("shapley_weight: need 0 <= s <= n-1, n >= 1");
  if (n > kMaxExactPlayers)
    throw std::invalid_argument(
        "shapley_weight: player count exceeds the exact enumeration bound (" +
        std::to_string(kMaxExactPlayers) + "); use the sampled path");
  return RationalWeight(factorial(s) * factorial(n - s - 1), factorial(n));
}

RationalWeight owen_weight(int t, int l, int s, int b) {
  return shapley_weight(t, l) * shapley_weight(s, b);
}

GroupStructure::GroupStructure(std::vector<std::vector<int>> blocks, int m)
    : blocks_(std::move(blocks)), m_(m) {
  block_of_.assign(m_, -1);
  block_masks_.reserve(blocks_.size());
  for (int i = 0; i < static_cast<int>(blocks_.size()); ++i) {
    CoalitionMask mask = 0;
    for (int f : blocks_[i]) {
      mask |= CoalitionMask{1} << f;
      block_of_[f] = i;
    }
    block_masks_.push_back(mask);
  }
}

GroupStructure GroupStructure::validate(std::vector<std::vector<int>> blocks, int m) {
  if (m < 1 || m > 32) throw std::invalid_argument("group structure: feature count out of range");
  std::vector<int> seen(m, -1);
  for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
    if (blocks[i].empty())
      throw PartitionError(PartitionErrorKind::EmptyBlock,
                           "empty block: B" + std::to_string(i + 1) + " has no members");
    for (int f : blocks[i]) {
      if (f < 0 || f >= m)
        throw PartitionError(PartitionErrorKind::OutOfRange,
                             "out of range: feature index " + std::to_string(f + 1) +
                                 " not in 1.." + std::to_string(m));
      if (seen[f] >= 0)
        throw PartitionError(PartitionErrorKind::Overlap,
                             "overlap: feature " + std::to_string(f + 1) + " appears in B" +
                                 std::to_string(seen[f] + 1) + " and B" + std::to_string(i + 1));
      seen[f] = i;
    }
    std::sort(blocks[i].begin(), blocks[i].end());
  }
  for (int f = 0; f < m; ++f) {
    if (seen[f] < 0)
      throw PartitionError(PartitionErrorKind::Gap,
                           "gap: feature " + std::to_string(f + 1) + " is not covered by any block");
  }
  return GroupStructure(std::move(blocks), m);
}

GroupStructure GroupStructure::validate_one_based(const std::vector<std::vector<int>>& blocks,
                                                  int m) {
  std::vector<std::vector<int>> shifted(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    shifted[i].reserve(blocks[i].size());
    for (int f : blocks[i]) shifted[i].push_back(f - 1);
  }
  return validate(std::move(shifted), m);
}

GroupStructure GroupStructure::singletons(int m) {
  std::vector<std::vector<int>> blocks(m);
  for (int i = 0; i < m; ++i) blocks[i] = {i};
  return validate(std::move(blocks), m);
}

int GroupStructure::block_of(int feature) const {
  if (feature < 0 || feature >= m_) return -1;
  return block_of_[feature];
}

CoalitionMask GroupStructure::expand(CoalitionMask groups) const {
  if (groups >> group_count())
    throw std::invalid_argument("expand: group index out of range");
  CoalitionMask mask = 0;
  for (int i = 0; i < group_count(); ++i) {
    if (groups & (CoalitionMask{1} << i)) mask |= block_masks_[i];
  }
  return mask;
}

std::vector<CoalitionMask> enumerate_subsets(const std::vector<int>& indices) {
  const int k = static_cast<int>(indices.size());
  if (k > kMaxExactPlayers)
    throw std::invalid_argument("enumerate_subsets: index set exceeds the exact bound of " +
                                std::to_string(kMaxExactPlayers));
  for (int f : indices) {
    if (f < 0 || f >= 32) throw std::invalid_argument("enumerate_subsets: index out of range");
  }
  std::vector<CoalitionMask> out;
  out.reserve(std::size_t{1} << k);
  for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << k); ++sub) {
    CoalitionMask mask = 0;
    for (int b = 0; b < k; ++b) {
      if (sub & (std::uint64_t{1} << b)) mask |= CoalitionMask{1} << indices[b];
    }
    out.push_back(mask);
  }
  return out;
}

std::vector<int> mask_to_indices(CoalitionMask mask) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i) {
    if (mask & (CoalitionMask{1} << i)) out.push_back(i);
  }
  return out;
}

CoalitionMask indices_to_mask(const std::vector<int>& indices) {
  CoalitionMask mask = 0;
  for (int f : indices) {
    if (f < 0 || f >= 32) throw std::invalid_argument("indices_to_mask: index out of range");
    CoalitionMask bit = CoalitionMask{1} << f;
    if (mask & bit) throw std::invalid_argument("indices_to_mask: duplicate index");
    mask |= bit;
  }
  return mask;
}

}  // namespace groupattr
