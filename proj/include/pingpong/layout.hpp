#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pingpong {

/// Role tag of one subsystem in a composite state.
enum class Role : std::uint8_t { Home, Travel, Ancilla, ModeX, ModeY };

std::string to_string(Role role);

/// Level index of a qubit value inside a subsystem of dimension `dim`.
/// Qubits use {|0>, |1>}; 3-level photon modes use {|vac>, |0>, |1>}.
constexpr int level_of_bit(int dim, int bit) { return dim == 3 ? bit + 1 : bit; }

/// Inverse of level_of_bit; returns -1 for the vacuum level.
constexpr int bit_of_level(int dim, int level) { return dim == 3 ? level - 1 : level; }

inline constexpr int kVacuumLevel = 0;

struct Subsystem {
  Role role;
  int dim;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

/// Ordered list of subsystems. Basis index is row-major over the dims, the
/// first subsystem being most significant.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::initializer_list<Subsystem> parts);
  explicit SubsystemLayout(std::vector<Subsystem> parts);

  [[nodiscard]] std::size_t size() const { return parts_.size(); }
  [[nodiscard]] bool empty() const { return parts_.empty(); }
  [[nodiscard]] int total_dim() const;
  [[nodiscard]] const Subsystem& operator[](std::size_t i) const { return parts_[i]; }
  [[nodiscard]] const std::vector<Subsystem>& parts() const { return parts_; }

  [[nodiscard]] bool contains(Role role) const;
  /// Position of `role`; throws std::invalid_argument if absent.
  [[nodiscard]] std::size_t position(Role role) const;
  [[nodiscard]] int dim_of(Role role) const { return parts_[position(role)].dim; }

  /// Concatenation; throws std::invalid_argument on a role collision.
  [[nodiscard]] SubsystemLayout concat(const SubsystemLayout& other) const;
  /// Sub-layout with the given roles in the order they are listed.
  [[nodiscard]] SubsystemLayout select(std::span<const Role> roles) const;
  /// Same layout with `role` resized to `dim`.
  [[nodiscard]] SubsystemLayout with_dim(Role role, int dim) const;
  /// Roles of this layout that are not in `roles`, in layout order.
  [[nodiscard]] std::vector<Role> complement(std::span<const Role> roles) const;

  friend bool operator==(const SubsystemLayout&, const SubsystemLayout&) = default;

 private:
  void validate() const;

  std::vector<Subsystem> parts_;
};

std::string to_string(const SubsystemLayout& layout);

/// Factorization of a layout's basis index into (target index, rest index),
/// with targets ordered as requested and the rest in layout order.
struct IndexSplit {
  int target_dim = 1;
  int rest_dim = 1;
  /// full_index[target * rest_dim + rest] is the basis index in the layout.
  std::vector<int> full_index;

  [[nodiscard]] int at(int target, int rest) const { return full_index[target * rest_dim + rest]; }
};

IndexSplit split_index(const SubsystemLayout& layout, std::span<const Role> targets);

}  // namespace pingpong
