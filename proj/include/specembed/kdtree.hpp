#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace specembed {

///
/// Exact nearest-neighbour index over the rows of a dense matrix. Queries
/// break distance ties by the lowest point index so results are a pure
/// function of the input.
///
class KdTree
{
public:
    explicit KdTree(Eigen::MatrixXd points, int leaf_size = 8);

    Eigen::Index size() const { return m_points.rows(); }
    Eigen::Index dim() const { return m_points.cols(); }

    /// (index, squared distance) of the nearest point.
    std::pair<Eigen::Index, double> nearest(const Eigen::Ref<const Eigen::RowVectorXd>& query) const;

    /// The k nearest points sorted by (squared distance, index). A point equal
    /// to `exclude` is skipped.
    std::vector<std::pair<Eigen::Index, double>> k_nearest(const Eigen::Ref<const Eigen::RowVectorXd>& query,
                                                           int k, Eigen::Index exclude = -1) const;

private:
    struct Node
    {
        Eigen::Index begin = 0;
        Eigen::Index end = 0;
        int axis = -1; // -1 for leaves
        double split = 0.0;
        int left = -1;
        int right = -1;
    };

    int build(Eigen::Index begin, Eigen::Index end);

    Eigen::MatrixXd m_points;
    std::vector<Eigen::Index> m_order;
    std::vector<Node> m_nodes;
    int m_leaf_size;
};

} // namespace specembed
