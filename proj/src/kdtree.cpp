#include "specembed/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

namespace specembed {

KdTree::KdTree(Eigen::MatrixXd points, int leaf_size)
    : m_points(std::move(points))
    , m_order(static_cast<std::size_t>(m_points.rows()))
    , m_leaf_size(std::max(1, leaf_size))
{
    std::iota(m_order.begin(), m_order.end(), Eigen::Index{0});
    if (m_points.rows() > 0) build(0, m_points.rows());
}

int KdTree::build(Eigen::Index begin, Eigen::Index end)
{
    const int id = static_cast<int>(m_nodes.size());
    m_nodes.push_back(Node{begin, end});
    if (end - begin <= m_leaf_size) return id;

    // split on the axis of largest extent
    Eigen::RowVectorXd lo = m_points.row(m_order[begin]);
    Eigen::RowVectorXd hi = lo;
    for (Eigen::Index i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(m_points.row(m_order[i]));
        hi = hi.cwiseMax(m_points.row(m_order[i]));
    }
    Eigen::Index axis = 0;
    const double extent = (hi - lo).maxCoeff(&axis);
    if (extent <= 0.0) return id; // all points coincide

    const Eigen::Index mid = begin + (end - begin) / 2;
    std::nth_element(m_order.begin() + begin, m_order.begin() + mid, m_order.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) {
                         const double va = m_points(a, axis);
                         const double vb = m_points(b, axis);
                         return va < vb || (va == vb && a < b);
                     });
    const double split = m_points(m_order[mid], axis);
    const int left = build(begin, mid);
    const int right = build(mid, end);
    Node& node = m_nodes[id];
    node.axis = static_cast<int>(axis);
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
}

namespace {

struct Candidate
{
    double dist2;
    Eigen::Index index;
    bool operator<(const Candidate& o) const
    {
        return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index);
    }
};

} // namespace

std::pair<Eigen::Index, double> KdTree::nearest(const Eigen::Ref<const Eigen::RowVectorXd>& query) const
{
    auto result = k_nearest(query, 1);
    if (result.empty()) return {-1, std::numeric_limits<double>::infinity()};
    return result.front();
}

std::vector<std::pair<Eigen::Index, double>> KdTree::k_nearest(
    const Eigen::Ref<const Eigen::RowVectorXd>& query, int k, Eigen::Index exclude) const
{
    std::vector<std::pair<Eigen::Index, double>> out;
    if (k <= 0 || m_nodes.empty()) return out;

    // max-heap on (dist2, index): top is the current worst kept candidate
    std::priority_queue<Candidate> heap;
    const auto worst = [&] {
        return static_cast<int>(heap.size()) < k ? std::numeric_limits<double>::infinity() : heap.top().dist2;
    };

    struct Frame
    {
        int node;
        double bound; // squared distance from query to the node's half-space
    };
    std::vector<Frame> stack{{0, 0.0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        // equal bounds may still hold lower-index ties, so only prune strictly
        if (f.bound > worst()) continue;
        const Node& node = m_nodes[f.node];
        if (node.axis < 0) {
            for (Eigen::Index i = node.begin; i < node.end; ++i) {
                const Eigen::Index p = m_order[i];
                if (p == exclude) continue;
                const double d2 = (m_points.row(p) - query).squaredNorm();
                const Candidate c{d2, p};
                if (static_cast<int>(heap.size()) < k) {
                    heap.push(c);
                } else if (c < heap.top()) {
                    heap.pop();
                    heap.push(c);
                }
            }
            continue;
        }
        const double diff = query[node.axis] - node.split;
        const int near = diff < 0 ? node.left : node.right;
        const int far = diff < 0 ? node.right : node.left;
        // points equal to the split value can sit on either side
        stack.push_back({far, std::max(f.bound, diff * diff)});
        stack.push_back({near, f.bound});
    }

    out.reserve(heap.size());
    while (!heap.empty()) {
        out.emplace_back(heap.top().index, heap.top().dist2);
        heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

} // namespace specembed
