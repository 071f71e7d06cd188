#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeca/errors.hpp"

namespace treeca {

/// Default ceiling on materialized node counts; callers can raise it per shape.
inline constexpr std::uint64_t default_node_cap = std::uint64_t{1} << 24;

/// 1-based breadth-first position of a node; the root is 1.
using NodeId = std::uint64_t;

/**
 * Geometry of a full d-ary tree of a given height: every node of the first
 * height-1 levels has exactly d children, level 0 holds the root, the last
 * level holds the leaves. The node count is the geometric sum
 * 1 + d + d^2 + ... + d^{height-1}.
 *
 * Construction never materializes anything, so shapes with astronomically
 * many nodes are valid values; operations that need actual node counts go
 * through node_count(), which enforces the cap.
 */
class TreeShape {
public:
    TreeShape(int arity, int height, std::uint64_t node_cap = default_node_cap)
        : arity_(arity), height_(height), cap_(node_cap) {
        if (arity < 2) throw Error("tree arity must be at least 2");
        if (height < 2) throw Error("tree height must be at least 2");
        std::uint64_t total = 1;
        std::uint64_t level = 1;
        bool overflow = false;
        for (int l = 1; l < height_; ++l) {
            if (level > max_u64 / static_cast<std::uint64_t>(arity_)) {
                overflow = true;
                break;
            }
            level *= static_cast<std::uint64_t>(arity_);
            if (total > max_u64 - level) {
                overflow = true;
                break;
            }
            total += level;
        }
        if (!overflow) count_ = total;
    }

    int arity() const { return arity_; }
    int height() const { return height_; }
    std::uint64_t node_cap() const { return cap_; }

    /// Node count when it is representable at all; no cap applied.
    std::optional<std::uint64_t> checked_node_count() const { return count_; }

    std::uint64_t node_count() const {
        if (!count_ || *count_ > cap_) {
            throw TooLarge("node count of arity-" + std::to_string(arity_) + " height-" +
                           std::to_string(height_) + " tree exceeds cap " + std::to_string(cap_));
        }
        return *count_;
    }

    /// Number of nodes strictly above the given level (level_offset(0) = 0).
    std::uint64_t level_offset(int level) const {
        require_level(level);
        std::uint64_t offset = 0;
        std::uint64_t size = 1;
        for (int l = 0; l < level; ++l) {
            offset += size;
            size *= static_cast<std::uint64_t>(arity_);
        }
        return offset;
    }

    std::uint64_t level_size(int level) const {
        require_level(level);
        std::uint64_t size = 1;
        for (int l = 0; l < level; ++l) size *= static_cast<std::uint64_t>(arity_);
        return size;
    }

    /// Number of non-leaf nodes; node ids 1..internal_count() have children.
    std::uint64_t internal_count() const { return node_count() - level_size(height_ - 1); }

    bool operator==(const TreeShape& other) const {
        return arity_ == other.arity_ && height_ == other.height_;
    }

private:
    static constexpr std::uint64_t max_u64 = ~std::uint64_t{0};

    void require_level(int level) const {
        node_count();  // enforce cap before handing out per-level geometry
        if (level < 0 || level >= height_) {
            throw Error("level " + std::to_string(level) + " outside [0, " +
                        std::to_string(height_ - 1) + "]");
        }
    }

    int arity_;
    int height_;
    std::uint64_t cap_;
    std::optional<std::uint64_t> count_;
};

/**
 * Breadth-first index of the node addressed by a word of child labels from
 * the root, labels in [1, arity]. The empty word is the root (id 1); the map
 * is the bijection  id(empty) = 1,  id(w.k) = (id(w) - 1) * d + k + 1,
 * which for d = 2 reduces to 1 + sum_i x_i 2^{k-i}.
 */
inline NodeId node_index(std::span<const int> word, const TreeShape& shape) {
    shape.node_count();
    if (static_cast<int>(word.size()) >= shape.height()) {
        throw InvalidWord("word of length " + std::to_string(word.size()) +
                          " does not address a node of a height-" +
                          std::to_string(shape.height()) + " tree");
    }
    NodeId id = 1;
    for (int label : word) {
        if (label < 1 || label > shape.arity()) {
            throw InvalidWord("child label " + std::to_string(label) + " outside [1, " +
                              std::to_string(shape.arity()) + "]");
        }
        id = (id - 1) * static_cast<std::uint64_t>(shape.arity()) +
             static_cast<std::uint64_t>(label) + 1;
    }
    return id;
}

inline void require_node(NodeId node, const TreeShape& shape) {
    if (node < 1 || node > shape.node_count()) {
        throw InvalidWord("node id " + std::to_string(node) + " outside [1, " +
                          std::to_string(shape.node_count()) + "]");
    }
}

inline bool is_leaf(NodeId node, const TreeShape& shape) {
    require_node(node, shape);
    return node > shape.internal_count();
}

/// Children of an internal node: (node-1)*d + 2, ..., (node-1)*d + d + 1.
inline std::vector<NodeId> children(NodeId node, const TreeShape& shape) {
    if (is_leaf(node, shape)) {
        throw LeafHasNoChildren("node " + std::to_string(node) + " is a leaf");
    }
    std::vector<NodeId> out(static_cast<std::size_t>(shape.arity()));
    for (int k = 1; k <= shape.arity(); ++k) {
        out[static_cast<std::size_t>(k - 1)] =
            (node - 1) * static_cast<std::uint64_t>(shape.arity()) +
            static_cast<std::uint64_t>(k) + 1;
    }
    return out;
}

inline NodeId parent(NodeId node, const TreeShape& shape) {
    require_node(node, shape);
    if (node == 1) throw RootHasNoParent("the root has no parent");
    return (node - 2) / static_cast<std::uint64_t>(shape.arity()) + 1;
}

inline int level_of(NodeId node, const TreeShape& shape) {
    require_node(node, shape);
    int level = 0;
    std::uint64_t first_of_next = 2;  // id of the first node of level 1
    std::uint64_t size = 1;
    while (node >= first_of_next) {
        ++level;
        size *= static_cast<std::uint64_t>(shape.arity());
        first_of_next += size;
    }
    return level;
}

/// 0-based position of the node among its level, in breadth-first order.
inline std::uint64_t position_in_level(NodeId node, const TreeShape& shape) {
    return node - shape.level_offset(level_of(node, shape)) - 1;
}

}  // namespace treeca
