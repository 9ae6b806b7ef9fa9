#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ttlab/error.hpp"
#include "ttlab/linalg.hpp"

namespace ttlab::track {

// Reference to a branch end: which branch, which of its two ends.
struct HalfRef {
  int branch = -1;
  int end = -1;
  bool operator==(const HalfRef&) const = default;
};

// Reference to a switch slot: which switch, which of its three slots.
struct SlotRef {
  int sw = -1;
  int slot = -1;
  bool operator==(const SlotRef&) const = default;
};

// Trivalent switch. Slots are listed in counterclockwise cyclic order;
// slot 0 always holds the large half-branch after normalization.
struct Switch {
  std::array<HalfRef, 3> slots;
  int large_slot = 0;
};

struct Branch {
  int number = 0;                 // 1..p, transported through splits
  std::array<SlotRef, 2> ends{};  // end 0, end 1
  int orient = 0;                 // +1, -1, or 0 for unset
};

// Corner of a complementary region: the wedge between two cyclically
// adjacent slots of one switch (stored with slot_a < slot_b).
struct Corner {
  int sw = 0;
  int slot_a = 0;
  int slot_b = 0;
  friend bool operator==(const Corner&, const Corner&) = default;
  friend auto operator<=>(const Corner&, const Corner&) = default;
};

struct Face {
  std::vector<Corner> corners;
  int cusps = 0;
  bool punctured = false;
};

// Numbered generic train track with the embedding carried combinatorially
// by the cyclic slot order at each switch. Immutable by convention once
// validated; all operations below return fresh values.
struct TrainTrack {
  int genus = 0;
  int punctures = 0;
  std::vector<Switch> switches;
  std::vector<Branch> branches;
  std::vector<Corner> punctured_faces;  // one marking corner per punctured face
};

struct ValidationIssue {
  Err code;
  std::string detail;
};

struct ValidationReport {
  bool ok = false;
  std::vector<ValidationIssue> issues;
  std::vector<Face> faces;
  int euler_char = 0;  // V - E + F of the closed-up surface
  bool has(Err code) const {
    for (const auto& i : issues) {
      if (i.code == code) return true;
    }
    return false;
  }
};

// Cusp multiset of complementary discs plus puncture count.
struct TopType {
  std::vector<int> disc_degrees;  // sorted ascending
  int punctures = 0;
  bool operator==(const TopType&) const = default;
  std::string str() const;
};

enum class SplitDir { Left, Right };

struct SplitMove {
  int branch_number = 0;
  SplitDir dir = SplitDir::Right;
};

struct SplitResult {
  TrainTrack track;
  lin::IMat matrix;  // weights on the split track -> weights on the input track
};

// Face walks on the ribbon structure, deterministic order.
std::vector<Face> trace_faces(const TrainTrack& t);

ValidationReport validate(const TrainTrack& t);

// Throws the first validation issue.
void require_valid(const TrainTrack& t);

TopType topological_type(const TrainTrack& t);

// Consistent branch orientation if one exists (+1 = end0 -> end1).
std::optional<std::vector<int>> orientation(const TrainTrack& t);
bool is_orientable(const TrainTrack& t);

// Numbers of the branches that are large at both ends, ascending.
std::vector<int> large_branches(const TrainTrack& t);

SplitResult split(const TrainTrack& t, const SplitMove& move);

// Split at every large branch (choices keyed by branch number, covering
// exactly the large branches), composing the elementary matrices in
// ascending branch-number order.
SplitResult full_numbered_split(const TrainTrack& t,
                                const std::vector<std::pair<int, SplitDir>>& choices);

// Canonical relabeling: branch ids sorted by number, switch ids in BFS
// order from a deterministic root, slot 0 = large slot. Numbered-track
// identity is byte equality of canonical_bytes().
TrainTrack canonical_form(const TrainTrack& t);
std::string canonical_bytes(const TrainTrack& t);
std::uint64_t canonical_hash(const TrainTrack& t);

// Track file format (see docs/track_format.md).
std::string to_tt_string(const TrainTrack& t);
TrainTrack from_tt_string(const std::string& text);
TrainTrack load_tt_file(const std::string& path);
void save_tt_file(const TrainTrack& t, const std::string& path);

// Renumber branches by a permutation of 1..p given as old number -> new
// number; used by the relabeling-equivariance tests.
TrainTrack permute_numbers(const TrainTrack& t, const std::vector<int>& perm);

// Switch-condition matrix: one row per switch, columns indexed by branch
// number - 1; row = large weight - sum of small weights.
lin::QMat switch_matrix(const TrainTrack& t);

}  // namespace ttlab::track
