// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <vector>

namespace phpvd::corpus {

/// Static centered interval tree over closed integer intervals [lo, hi].
/// stab(x) returns the payloads of every interval containing x, sorted.
class IntervalTree {
public:
    struct Interval {
        std::size_t lo = 0;
        std::size_t hi = 0;
        std::size_t payload = 0;
    };

    IntervalTree() = default;
    explicit IntervalTree(std::vector<Interval> intervals) { root_ = build(std::move(intervals)); }

    std::vector<std::size_t> stab(std::size_t x) const {
        std::vector<std::size_t> out;
        for (const Node* n = root_.get(); n != nullptr;) {
            if (x < n->center) {
                for (const auto& iv : n->by_lo) {
                    if (iv.lo > x) break;
                    out.push_back(iv.payload);
                }
                n = n->left.get();
            } else {
                for (const auto& iv : n->by_hi) {
                    if (iv.hi < x) break;
                    out.push_back(iv.payload);
                }
                n = x == n->center ? nullptr : n->right.get();
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    struct Node {
        std::size_t center = 0;
        std::vector<Interval> by_lo;  // ascending lo
        std::vector<Interval> by_hi;  // descending hi
        std::unique_ptr<Node> left, right;
    };

    static std::unique_ptr<Node> build(std::vector<Interval> ivs) {
        if (ivs.empty()) return nullptr;
        std::vector<std::size_t> ends;
        for (const auto& iv : ivs) {
            ends.push_back(iv.lo);
            ends.push_back(iv.hi);
        }
        std::nth_element(ends.begin(), ends.begin() + static_cast<std::ptrdiff_t>(ends.size() / 2), ends.end());
        auto node = std::make_unique<Node>();
        node->center = ends[ends.size() / 2];
        std::vector<Interval> left, right;
        for (const auto& iv : ivs) {
            if (iv.hi < node->center) left.push_back(iv);
            else if (iv.lo > node->center) right.push_back(iv);
            else node->by_lo.push_back(iv);
        }
        node->by_hi = node->by_lo;
        std::sort(node->by_lo.begin(), node->by_lo.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::sort(node->by_hi.begin(), node->by_hi.end(), [](const Interval& a, const Interval& b) { return a.hi > b.hi; });
        node->left = build(std::move(left));
        node->right = build(std::move(right));
        return node;
    }

    std::unique_ptr<Node> root_;
};

}  // namespace phpvd::corpus
