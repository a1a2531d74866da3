#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "ocp/geometry.hpp"

namespace ocp {

/// Ordered SE(2) waypoints for one activated object.
using Trajectory = std::vector<Pose2>;

/// Shapes and class labels, shared by every arrangement derived from one scene.
struct ObjectTable {
    std::vector<Shape> shapes;
    std::vector<int> classes; ///< labels in 1..L
};

/// Poses of all movable objects plus the shared shape/class table.
class Arrangement {
public:
    Arrangement() = default;

    Arrangement(std::vector<Pose2> poses, std::vector<Shape> shapes, std::vector<int> classes)
        : poses_(std::move(poses)),
          table_(std::make_shared<const ObjectTable>(ObjectTable{std::move(shapes), std::move(classes)}))
    {
        validate();
    }

    Arrangement(std::vector<Pose2> poses, std::shared_ptr<const ObjectTable> table)
        : poses_(std::move(poses)), table_(std::move(table))
    {
        validate();
    }

    std::size_t size() const { return poses_.size(); }
    const Pose2& pose(std::size_t i) const { return poses_.at(i); }
    std::span<const Pose2> poses() const { return poses_; }
    Vec2 position(std::size_t i) const { return poses_[i].position(); }
    const Shape& shape(std::size_t i) const { return table_->shapes[i]; }
    int class_of(std::size_t i) const { return table_->classes[i]; }
    const std::shared_ptr<const ObjectTable>& table() const { return table_; }

    int num_classes() const
    {
        int l = 0;
        for (int c : table_->classes) l = std::max(l, c);
        return l;
    }

    void set_pose(std::size_t i, const Pose2& p) { poses_.at(i) = p; }

    Arrangement with_pose(std::size_t i, const Pose2& p) const
    {
        Arrangement out = *this;
        out.set_pose(i, p);
        return out;
    }

    /// Same objects, poses bit-identical.
    bool same_poses(const Arrangement& o) const { return poses_ == o.poses_; }

private:
    void validate() const
    {
        if (!table_) throw std::invalid_argument("arrangement has no object table");
        if (poses_.empty()) throw std::invalid_argument("arrangement needs at least one object");
        if (table_->shapes.size() != poses_.size() || table_->classes.size() != poses_.size())
            throw std::invalid_argument("arrangement poses, shapes and classes differ in length");
        for (int c : table_->classes)
            if (c < 1) throw std::invalid_argument("class labels must be >= 1");
    }

    std::vector<Pose2> poses_;
    std::shared_ptr<const ObjectTable> table_;
};

} // namespace ocp
