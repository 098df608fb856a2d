#include "pingpong/layout.hpp"

#include <algorithm>
#include <stdexcept>

namespace pingpong {

std::string to_string(Role role) {
  switch (role) {
    case Role::Home: return "home";
    case Role::Travel: return "travel";
    case Role::Ancilla: return "ancilla";
    case Role::ModeX: return "x";
    case Role::ModeY: return "y";
  }
  return "?";
}

SubsystemLayout::SubsystemLayout(std::initializer_list<Subsystem> parts) : parts_(parts) { validate(); }

SubsystemLayout::SubsystemLayout(std::vector<Subsystem> parts) : parts_(std::move(parts)) { validate(); }

void SubsystemLayout::validate() const {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i].dim != 2 && parts_[i].dim != 3)
      throw std::invalid_argument("subsystem " + to_string(parts_[i].role) + " must have dimension 2 or 3");
    for (std::size_t j = 0; j < i; ++j)
      if (parts_[j].role == parts_[i].role)
        throw std::invalid_argument("duplicate subsystem label " + to_string(parts_[i].role));
  }
}

int SubsystemLayout::total_dim() const {
  int dim = 1;
  for (const auto& p : parts_) dim *= p.dim;
  return dim;
}

bool SubsystemLayout::contains(Role role) const {
  return std::any_of(parts_.begin(), parts_.end(), [&](const Subsystem& p) { return p.role == role; });
}

std::size_t SubsystemLayout::position(Role role) const {
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].role == role) return i;
  throw std::invalid_argument("layout " + to_string(*this) + " has no subsystem " + to_string(role));
}

SubsystemLayout SubsystemLayout::concat(const SubsystemLayout& other) const {
  std::vector<Subsystem> parts = parts_;
  parts.insert(parts.end(), other.parts_.begin(), other.parts_.end());
  return SubsystemLayout(std::move(parts));
}

SubsystemLayout SubsystemLayout::select(std::span<const Role> roles) const {
  std::vector<Subsystem> parts;
  parts.reserve(roles.size());
  for (Role r : roles) parts.push_back(parts_[position(r)]);
  return SubsystemLayout(std::move(parts));
}

SubsystemLayout SubsystemLayout::with_dim(Role role, int dim) const {
  std::vector<Subsystem> parts = parts_;
  parts[position(role)].dim = dim;
  return SubsystemLayout(std::move(parts));
}

std::vector<Role> SubsystemLayout::complement(std::span<const Role> roles) const {
  std::vector<Role> rest;
  for (const auto& p : parts_)
    if (std::find(roles.begin(), roles.end(), p.role) == roles.end()) rest.push_back(p.role);
  return rest;
}

std::string to_string(const SubsystemLayout& layout) {
  std::string s = "(";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i) s += ",";
    s += to_string(layout[i].role) + ":" + std::to_string(layout[i].dim);
  }
  return s + ")";
}

IndexSplit split_index(const SubsystemLayout& layout, std::span<const Role> targets) {
  const std::size_t n = layout.size();
  std::vector<int> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * layout[i].dim;

  std::vector<std::size_t> target_pos;
  for (Role r : targets) {
    const std::size_t p = layout.position(r);
    if (std::find(target_pos.begin(), target_pos.end(), p) != target_pos.end())
      throw std::invalid_argument("target " + to_string(r) + " listed twice");
    target_pos.push_back(p);
  }
  std::vector<std::size_t> rest_pos;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(target_pos.begin(), target_pos.end(), i) == target_pos.end()) rest_pos.push_back(i);

  IndexSplit split;
  for (auto p : target_pos) split.target_dim *= layout[p].dim;
  for (auto p : rest_pos) split.rest_dim *= layout[p].dim;
  split.full_index.resize(static_cast<std::size_t>(split.target_dim) * split.rest_dim);

  // Decode target and rest indices digit by digit (row-major, first most significant).
  auto offset_of = [&](const std::vector<std::size_t>& positions, int index) {
    int offset = 0;
    for (std::size_t k = positions.size(); k-- > 0;) {
      const int d = layout[positions[k]].dim;
      offset += (index % d) * stride[positions[k]];
      index /= d;
    }
    return offset;
  };
  for (int t = 0; t < split.target_dim; ++t) {
    const int t_off = offset_of(target_pos, t);
    for (int r = 0; r < split.rest_dim; ++r)
      split.full_index[static_cast<std::size_t>(t) * split.rest_dim + r] = t_off + offset_of(rest_pos, r);
  }
  return split;
}

}  // namespace pingpong
