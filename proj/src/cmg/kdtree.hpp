/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <algorithm>
#include <vector>

#include "cmg/vec.hpp"

namespace cmg {

// Static 3-d tree for k-nearest-neighbor queries. Results are the k smallest
// (squared distance, index) pairs, so ties are broken by index and the output
// does not depend on traversal order.
class KdTree {
 public:
  explicit KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    if (!points_.empty()) root_ = build(0, static_cast<int>(points_.size()), 0);
  }

  std::size_t size() const { return points_.size(); }

  std::vector<int> nearest(const Vec3& q, int k) const {
    std::vector<std::pair<double, int>> heap;  // max-heap of (dist2, index)
    if (k > 0 && root_ >= 0) search(root_, q, k, &heap);
    std::sort_heap(heap.begin(), heap.end());
    std::vector<int> out;
    out.reserve(heap.size());
    for (const auto& [d2, idx] : heap) {
      (void)d2;
      out.push_back(idx);
    }
    return out;
  }

 private:
  struct Node {
    int point;
    int axis;
    int left = -1;
    int right = -1;
  };

  int build(int begin, int end, int depth) {
    if (begin >= end) return -1;
    int axis = depth % 3;
    int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                       if (points_[a][axis] != points_[b][axis])
                         return points_[a][axis] < points_[b][axis];
                       return a < b;
                     });
    int index = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{order_[mid], axis, -1, -1});
    int left = build(begin, mid, depth + 1);
    int right = build(mid + 1, end, depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
  }

  void search(int nodeIndex, const Vec3& q, int k,
              std::vector<std::pair<double, int>>* heap) const {
    const Node& node = nodes_[nodeIndex];
    const Vec3& p = points_[node.point];
    std::pair<double, int> cand{norm2(p - q), node.point};
    if (static_cast<int>(heap->size()) < k) {
      heap->push_back(cand);
      std::push_heap(heap->begin(), heap->end());
    } else if (cand < heap->front()) {
      std::pop_heap(heap->begin(), heap->end());
      heap->back() = cand;
      std::push_heap(heap->begin(), heap->end());
    }
    double split = q[node.axis] - p[node.axis];
    int near = split <= 0.0 ? node.left : node.right;
    int far = split <= 0.0 ? node.right : node.left;
    if (near >= 0) search(near, q, k, heap);
    // Visit the far side unless every candidate there is strictly worse than
    // the current worst; equal distances still matter for index ties.
    if (far >= 0 && (static_cast<int>(heap->size()) < k || split * split <= heap->front().first))
      search(far, q, k, heap);
  }

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace cmg
