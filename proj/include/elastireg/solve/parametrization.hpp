#pragma once

#include "elastireg/geometry/mesh.hpp"

#include <vector>

namespace elastireg {

/// Maps node positions to optimization variables.
///
/// Interior nodes carry two free coordinates. Boundary nodes slide along the target
/// edge between the neighbouring pinned nodes (one coordinate with box bounds). Nodes
/// sitting on target corners and nodes listed in `pinned` are fixed.
class BoundaryParametrization {
public:
  BoundaryParametrization(const Mesh& mesh, const Domain2& target, const std::vector<Vec2>& y0,
                          const std::vector<int>& pinned = {});

  int size() const { return static_cast<int>(lower_.size()); }
  Eigen::VectorXd pack(const std::vector<Vec2>& y) const;
  std::vector<Vec2> unpack(const Eigen::VectorXd& v) const;
  /// Chain rule from node gradients to variable gradients.
  Eigen::VectorXd pull_gradient(const std::vector<Vec2>& g) const;

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  bool is_fixed(int node) const { return kind_[node] == Kind::Fixed; }
  bool is_sliding(int node) const { return kind_[node] == Kind::Slide; }

private:
  enum class Kind { Free, Slide, Fixed };
  std::vector<Kind> kind_;
  std::vector<int> var_;
  std::vector<Vec2> fixed_pos_;
  std::vector<Vec2> origin_;
  std::vector<Vec2> tangent_;
  Eigen::VectorXd lower_, upper_;
};

} // namespace elastireg
