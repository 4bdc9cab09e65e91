#include "specembed/intersect.hpp"

#include <Eigen/Geometry>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace specembed {

namespace {

using Rational = boost::multiprecision::cpp_rational;

int sign_of(const Rational& r)
{
    return r > 0 ? 1 : (r < 0 ? -1 : 0);
}

// error bounds from Shewchuk's predicates for the plain determinant formula
constexpr double eps = std::numeric_limits<double>::epsilon() / 2;
constexpr double o3d_bound = (7.0 + 56.0 * eps) * eps;
constexpr double o2d_bound = (3.0 + 16.0 * eps) * eps;
// below this the products may have underflowed and the bounds no longer hold
constexpr double underflow_guard = 1e-250;

} // namespace

int orient3d(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c, const Eigen::Vector3d& d)
{
    const Eigen::Vector3d u = b - a;
    const Eigen::Vector3d v = c - a;
    const Eigen::Vector3d w = d - a;
    const double t1 = u.y() * v.z();
    const double t2 = u.z() * v.y();
    const double t3 = u.z() * v.x();
    const double t4 = u.x() * v.z();
    const double t5 = u.x() * v.y();
    const double t6 = u.y() * v.x();
    const double det = w.x() * (t1 - t2) + w.y() * (t3 - t4) + w.z() * (t5 - t6);
    const double permanent = std::abs(w.x()) * (std::abs(t1) + std::abs(t2)) +
                             std::abs(w.y()) * (std::abs(t3) + std::abs(t4)) +
                             std::abs(w.z()) * (std::abs(t5) + std::abs(t6));
    // the bound already covers the rounding of the differences u, v, w
    if (permanent > underflow_guard) {
        const double bound = o3d_bound * permanent;
        if (det > bound) return 1;
        if (-det > bound) return -1;
    }
    Rational R[4][3];
    const Eigen::Vector3d* p[4] = {&a, &b, &c, &d};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 3; ++k) R[i][k] = Rational((*p[i])[k]);
    Rational U[3], V[3], W[3];
    for (int k = 0; k < 3; ++k) {
        U[k] = R[1][k] - R[0][k];
        V[k] = R[2][k] - R[0][k];
        W[k] = R[3][k] - R[0][k];
    }
    const Rational exact = W[0] * (U[1] * V[2] - U[2] * V[1]) + W[1] * (U[2] * V[0] - U[0] * V[2]) +
                           W[2] * (U[0] * V[1] - U[1] * V[0]);
    return sign_of(exact);
}

int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    const double l = (b.x() - a.x()) * (c.y() - a.y());
    const double r = (b.y() - a.y()) * (c.x() - a.x());
    const double det = l - r;
    const double permanent = std::abs(l) + std::abs(r);
    if (permanent > underflow_guard) {
        const double bound = o2d_bound * permanent;
        if (det > bound) return 1;
        if (-det > bound) return -1;
    }
    const Rational e = (Rational(b.x()) - Rational(a.x())) * (Rational(c.y()) - Rational(a.y())) -
                       (Rational(b.y()) - Rational(a.y())) * (Rational(c.x()) - Rational(a.x()));
    return sign_of(e);
}

namespace {

using Tri = std::array<Eigen::Vector3d, 3>;

bool on_segment_2d(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r)
{
    // r collinear with pq assumed
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) && std::min(p.y(), q.y()) <= r.y() &&
           r.y() <= std::max(p.y(), q.y());
}

bool segments_intersect_2d(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r,
                           const Eigen::Vector2d& s)
{
    const int o1 = orient2d(p, q, r);
    const int o2 = orient2d(p, q, s);
    const int o3 = orient2d(r, s, p);
    const int o4 = orient2d(r, s, q);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    if (o1 == 0 && on_segment_2d(p, q, r)) return true;
    if (o2 == 0 && on_segment_2d(p, q, s)) return true;
    if (o3 == 0 && on_segment_2d(r, s, p)) return true;
    if (o4 == 0 && on_segment_2d(r, s, q)) return true;
    return false;
}

bool point_in_triangle_2d(const Eigen::Vector2d& p, const std::array<Eigen::Vector2d, 3>& t)
{
    const int a = orient2d(t[0], t[1], p);
    const int b = orient2d(t[1], t[2], p);
    const int c = orient2d(t[2], t[0], p);
    const bool has_neg = a < 0 || b < 0 || c < 0;
    const bool has_pos = a > 0 || b > 0 || c > 0;
    if (!(has_neg && has_pos)) {
        // a degenerate (collinear) triangle only contains points of its edges
        if (orient2d(t[0], t[1], t[2]) != 0) return true;
    }
    return false;
}

/// Coordinate axis to drop when projecting the common plane to 2D. Dropping
/// any axis along which the plane is not vertical preserves incidences.
int projection_axis(const Tri& t, const Tri& u)
{
    Eigen::Vector3d n = (t[1] - t[0]).cross(t[2] - t[0]);
    if (n.cwiseAbs().maxCoeff() == 0.0) n = (u[1] - u[0]).cross(u[2] - u[0]);
    if (n.cwiseAbs().maxCoeff() == 0.0) {
        // everything collinear or nearly so: drop the axis of least extent
        Eigen::Vector3d lo = t[0], hi = t[0];
        for (const auto& p : t) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
        for (const auto& p : u) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
        Index axis = 0;
        (hi - lo).minCoeff(&axis);
        return static_cast<int>(axis);
    }
    Index axis = 0;
    n.cwiseAbs().maxCoeff(&axis);
    return static_cast<int>(axis);
}

Eigen::Vector2d drop(const Eigen::Vector3d& p, int axis)
{
    const int i = (axis + 1) % 3;
    const int j = (axis + 2) % 3;
    return {p[i], p[j]};
}

/// Segment pq against closed triangle t, segment lying in t's plane.
bool coplanar_segment_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const Tri& t, int axis)
{
    const std::array<Eigen::Vector2d, 3> t2{drop(t[0], axis), drop(t[1], axis), drop(t[2], axis)};
    const Eigen::Vector2d p2 = drop(p, axis);
    const Eigen::Vector2d q2 = drop(q, axis);
    if (point_in_triangle_2d(p2, t2) || point_in_triangle_2d(q2, t2)) return true;
    for (int e = 0; e < 3; ++e)
        if (segments_intersect_2d(p2, q2, t2[e], t2[(e + 1) % 3])) return true;
    return false;
}

bool segment_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const Tri& t, const Tri& other)
{
    const int op = orient3d(t[0], t[1], t[2], p);
    const int oq = orient3d(t[0], t[1], t[2], q);
    if (op * oq > 0) return false;
    if (op == 0 && oq == 0) return coplanar_segment_triangle(p, q, t, projection_axis(t, other));
    const int a = orient3d(p, q, t[0], t[1]);
    const int b = orient3d(p, q, t[1], t[2]);
    const int c = orient3d(p, q, t[2], t[0]);
    if (a == 0 && b == 0 && c == 0) {
        // t is degenerate and the segment's line lies in its (any) plane
        return coplanar_segment_triangle(p, q, t, projection_axis(t, other));
    }
    return !((a < 0 || b < 0 || c < 0) && (a > 0 || b > 0 || c > 0));
}

} // namespace

bool triangles_intersect(const Tri& t, const Tri& u)
{
    // two closed triangles meet iff an edge of one meets the other
    for (int e = 0; e < 3; ++e) {
        if (segment_triangle(t[e], t[(e + 1) % 3], u, t)) return true;
        if (segment_triangle(u[e], u[(e + 1) % 3], t, u)) return true;
    }
    return false;
}

namespace {

struct Box
{
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());

    void grow(const Eigen::Vector3d& p)
    {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void grow(const Box& b)
    {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    bool overlaps(const Box& b) const { return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all(); }
};

struct Bvh
{
    struct Node
    {
        Box box;
        int left = -1;
        int right = -1;
        Index begin = 0;
        Index end = 0;
    };

    std::vector<Node> nodes;
    std::vector<Index> order;
    const std::vector<Box>* boxes = nullptr;

    explicit Bvh(const std::vector<Box>& face_boxes)
        : order(face_boxes.size())
        , boxes(&face_boxes)
    {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
        if (!order.empty()) build(0, static_cast<Index>(order.size()));
    }

    int build(Index begin, Index end)
    {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        Box box;
        Box centers;
        for (Index i = begin; i < end; ++i) {
            const Box& b = (*boxes)[static_cast<std::size_t>(order[i])];
            box.grow(b);
            centers.grow(0.5 * (b.lo + b.hi));
        }
        nodes[id].box = box;
        nodes[id].begin = begin;
        nodes[id].end = end;
        if (end - begin <= 4) return id;
        Index axis = 0;
        (centers.hi - centers.lo).maxCoeff(&axis);
        const Index mid = begin + (end - begin) / 2;
        std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end, [&](Index a, Index b) {
            const Box& ba = (*boxes)[static_cast<std::size_t>(a)];
            const Box& bb = (*boxes)[static_cast<std::size_t>(b)];
            const double ca = ba.lo[axis] + ba.hi[axis];
            const double cb = bb.lo[axis] + bb.hi[axis];
            return ca < cb || (ca == cb && a < b);
        });
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }

    template <typename Visit>
    void query(const Box& q, Visit&& visit) const
    {
        if (nodes.empty()) return;
        std::vector<int> stack{0};
        while (!stack.empty()) {
            const Node& node = nodes[static_cast<std::size_t>(stack.back())];
            stack.pop_back();
            if (!node.box.overlaps(q)) continue;
            if (node.left < 0) {
                for (Index i = node.begin; i < node.end; ++i) visit(order[i]);
                continue;
            }
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
};

Tri face_triangle(const Eigen::MatrixX3d& V, const Eigen::MatrixX3i& F, Index f)
{
    return {V.row(F(f, 0)).transpose(), V.row(F(f, 1)).transpose(), V.row(F(f, 2)).transpose()};
}

bool share_vertex(const Eigen::MatrixX3i& F, Index f, Index g)
{
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (F(f, a) == F(g, b)) return true;
    return false;
}

} // namespace

std::vector<FacePair> self_intersections(const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces)
{
    const Index nf = faces.rows();
    std::vector<Box> boxes(static_cast<std::size_t>(nf));
    for (Index f = 0; f < nf; ++f)
        for (int c = 0; c < 3; ++c) boxes[static_cast<std::size_t>(f)].grow(vertices.row(faces(f, c)).transpose());
    const Bvh bvh(boxes);

    std::vector<FacePair> out;
    for (Index f = 0; f < nf; ++f) {
        const Tri tf = face_triangle(vertices, faces, f);
        bvh.query(boxes[static_cast<std::size_t>(f)], [&](Index g) {
            if (g <= f || share_vertex(faces, f, g)) return;
            if (triangles_intersect(tf, face_triangle(vertices, faces, g))) out.emplace_back(f, g);
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<FacePair> self_intersections_brute_force(const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces)
{
    std::vector<FacePair> out;
    for (Index f = 0; f < faces.rows(); ++f)
        for (Index g = f + 1; g < faces.rows(); ++g) {
            if (share_vertex(faces, f, g)) continue;
            if (triangles_intersect(face_triangle(vertices, faces, f), face_triangle(vertices, faces, g)))
                out.emplace_back(f, g);
        }
    return out;
}

} // namespace specembed
