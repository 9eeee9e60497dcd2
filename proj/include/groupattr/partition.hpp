#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace groupattr {

// Coalitions are bit masks over 0-based feature indices. Bit i set means
// feature i takes its explicand value; the enumeration bound (25 players)
// keeps every mask inside 32 bits.
using CoalitionMask = std::uint32_t;

inline constexpr int kMaxExactPlayers = 25;
inline constexpr int kMaxExactGroups = 20;

/// Exact rational weight backed by arbitrary-precision integers.
/// Always stored reduced with a positive denominator.
class RationalWeight {
 public:
  using Int = boost::multiprecision::cpp_int;

  RationalWeight() : num_(0), den_(1) {}
  RationalWeight(Int num, Int den);
  static RationalWeight from_int(long v) { return RationalWeight(Int(v), Int(1)); }

  const Int& numerator() const { return num_; }
  const Int& denominator() const { return den_; }

  double to_double() const;

  RationalWeight operator+(const RationalWeight& o) const;
  RationalWeight operator*(const RationalWeight& o) const;
  bool operator==(const RationalWeight& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }

 private:
  Int num_;
  Int den_;  // > 0, gcd(num_, den_) == 1
};

/// Shapley coefficient |S|!(n-|S|-1)!/n! for a coalition of size s among
/// n players, as an exact rational.
RationalWeight shapley_weight(int s, int n);

/// Owen coefficient d(S,T): the product of the group-level Shapley weight
/// (t groups chosen among l) and the within-block weight (s members chosen
/// among b).
RationalWeight owen_weight(int t, int l, int s, int b);

enum class PartitionErrorKind { Overlap, Gap, EmptyBlock, OutOfRange };

class PartitionError : public std::invalid_argument {
 public:
  PartitionError(PartitionErrorKind kind, const std::string& message)
      : std::invalid_argument(message), kind_(kind) {}
  PartitionErrorKind kind() const { return kind_; }

 private:
  PartitionErrorKind kind_;
};

/// A validated partition of the feature index set {0,...,m-1} into ordered,
/// disjoint, non-empty blocks. Block order is part of the identity: group i
/// names blocks()[i].
class GroupStructure {
 public:
  /// Validates and builds a structure from 0-based index blocks.
  /// Throws PartitionError with a distinct kind for overlap, gap, empty
  /// block, and out-of-range indices.
  static GroupStructure validate(std::vector<std::vector<int>> blocks, int m);

  /// Convenience for 1-based block lists as they appear in config files.
  static GroupStructure validate_one_based(
      const std::vector<std::vector<int>>& blocks, int m);

  /// The all-singletons structure {{0},{1},...,{m-1}}.
  static GroupStructure singletons(int m);

  int feature_count() const { return m_; }
  int group_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<int>& block(int i) const { return blocks_.at(i); }

  /// Mask of all members of block i.
  CoalitionMask block_mask(int i) const { return block_masks_.at(i); }

  /// Index of the block containing feature (0-based), -1 if out of range.
  int block_of(int feature) const;

  /// Union of the blocks named by a group coalition: bit i of `groups`
  /// selects block i.
  CoalitionMask expand(CoalitionMask groups) const;

 private:
  GroupStructure(std::vector<std::vector<int>> blocks, int m);

  std::vector<std::vector<int>> blocks_;
  std::vector<CoalitionMask> block_masks_;
  std::vector<int> block_of_;
  int m_ = 0;
};

/// All 2^k subsets of the given (distinct) indices in deterministic order:
/// subset j maps bit b of j to indices[b]. Throws when k exceeds the exact
/// enumeration bound.
std::vector<CoalitionMask> enumerate_subsets(const std::vector<int>& indices);

/// Members of a mask as ascending 0-based indices.
std::vector<int> mask_to_indices(CoalitionMask mask);

/// Mask from 0-based indices; throws on duplicates or index >= 32.
CoalitionMask indices_to_mask(const std::vector<int>& indices);

}  // namespace groupattr
