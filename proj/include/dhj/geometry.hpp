#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace dhj {

// A point in at most two dimensions. Interval and radial-disk domains use
// only the first coordinate (for the disk it is the radius r).
using Point = std::array<double, 2>;

enum class Shape { Interval, Rectangle, Disk };

std::string to_string(Shape s);
Shape shape_from_string(const std::string& s);

// Closed-form domains. A disk is carried through its radial reduction
// r in [0, radius]; only radially symmetric data is representable.
class DomainSpec
{
public:
    static DomainSpec interval(double length);
    static DomainSpec rectangle(double length_x, double length_y);
    static DomainSpec disk(double radius);

    Shape shape() const { return shape_; }
    // Number of coordinates of a node (1 for interval and disk).
    int coords() const { return shape_ == Shape::Rectangle ? 2 : 1; }
    // Spatial dimension of the underlying domain (2 for the disk).
    int space_dim() const { return shape_ == Shape::Interval ? 1 : 2; }

    double length_x() const { return lx_; }
    double length_y() const { return ly_; }
    double radius() const { return lx_; }

    // Width of the tubular neighbourhood on which the boundary projection
    // is unique (up to the flagged ties).
    double unique_projection_width() const;

    bool contains(const Point& x, double tol = 1e-12) const;

    // Number of boundary faces: 2 (interval), 4 (rectangle), 1 (disk).
    int face_count() const;

private:
    DomainSpec(Shape s, double lx, double ly);

    Shape shape_;
    double lx_;
    double ly_;
};

struct Projection
{
    Point foot{};       // P(x) on the boundary
    Point normal{};     // inward unit normal at P(x)
    double distance = 0.0;
    int face = -1;
    bool ambiguous = false; // nearest face not unique; tie-break applied
};

// Euclidean distance to the boundary. Throws dhj::Error if x is outside.
double distance(const DomainSpec& d, const Point& x);

// Nearest boundary point, inward normal and distance: x = P + delta*nu.
// Ties resolve to the face with the smaller axis index (lower face first)
// and are flagged. For the disk the center is flagged.
Projection project(const DomainSpec& d, const Point& x);

struct RayPoint
{
    Point x{};
    bool ambiguous = false;
};

// a + s*nu_a for a boundary point a. Throws if a is not on the boundary,
// sits on a rectangle corner, or if the ray leaves the domain.
RayPoint normal_ray(const DomainSpec& d, const Point& a, double s);

// Uniform lattice of the closed domain with spacing h in every axis.
class Grid
{
public:
    // h is snapped downward so that every axis length is an integer
    // multiple of it.
    Grid(DomainSpec domain, double h);

    const DomainSpec& domain() const { return domain_; }
    double h() const { return h_; }
    double requested_h() const { return h_requested_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return nx_ * ny_; }
    int coords() const { return domain_.coords(); }

    std::size_t index(std::size_t i, std::size_t j = 0) const { return j * nx_ + i; }
    std::size_t ix(std::size_t n) const { return n % nx_; }
    std::size_t iy(std::size_t n) const { return n / nx_; }

    Point node(std::size_t n) const;
    bool is_boundary(std::size_t n) const;
    // Outward face of a boundary node (smallest face index at corners), -1
    // for interior nodes.
    int face(std::size_t n) const;

    // Geometry of every node, precomputed.
    const std::vector<Projection>& projections() const { return proj_; }

private:
    DomainSpec domain_;
    double h_requested_;
    double h_;
    std::size_t nx_;
    std::size_t ny_;
    std::vector<Projection> proj_;
};

} // namespace dhj
