#include "dhj/geometry.hpp"

#include "dhj/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dhj {

namespace {

void require_length(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(std::string("domain length '") + what + "' must be positive and finite");
}

// Relative tolerance used to decide that two face distances tie.
constexpr double tie_rel = 1e-12;

} // namespace

std::string to_string(Shape s)
{
    switch (s) {
    case Shape::Interval: return "interval";
    case Shape::Rectangle: return "rectangle";
    case Shape::Disk: return "disk";
    }
    return "?";
}

Shape shape_from_string(const std::string& s)
{
    if (s == "interval") return Shape::Interval;
    if (s == "rectangle") return Shape::Rectangle;
    if (s == "disk") return Shape::Disk;
    throw Error("unknown shape '" + s + "' (expected interval|rectangle|disk)");
}

DomainSpec::DomainSpec(Shape s, double lx, double ly)
    : shape_(s), lx_(lx), ly_(ly)
{}

DomainSpec DomainSpec::interval(double length)
{
    require_length(length, "length");
    return DomainSpec(Shape::Interval, length, 0.0);
}

DomainSpec DomainSpec::rectangle(double length_x, double length_y)
{
    require_length(length_x, "length_x");
    require_length(length_y, "length_y");
    return DomainSpec(Shape::Rectangle, length_x, length_y);
}

DomainSpec DomainSpec::disk(double radius)
{
    require_length(radius, "radius");
    return DomainSpec(Shape::Disk, radius, 0.0);
}

double DomainSpec::unique_projection_width() const
{
    switch (shape_) {
    case Shape::Interval: return 0.5 * lx_;
    case Shape::Rectangle: return 0.5 * std::min(lx_, ly_);
    case Shape::Disk: return lx_;
    }
    return 0.0;
}

bool DomainSpec::contains(const Point& x, double tol) const
{
    const double sx = tol * lx_;
    switch (shape_) {
    case Shape::Interval:
    case Shape::Disk:
        return std::isfinite(x[0]) && x[0] >= -sx && x[0] <= lx_ + sx;
    case Shape::Rectangle: {
        const double sy = tol * ly_;
        return std::isfinite(x[0]) && std::isfinite(x[1]) && x[0] >= -sx && x[0] <= lx_ + sx
               && x[1] >= -sy && x[1] <= ly_ + sy;
    }
    }
    return false;
}

int DomainSpec::face_count() const
{
    switch (shape_) {
    case Shape::Interval: return 2;
    case Shape::Rectangle: return 4;
    case Shape::Disk: return 1;
    }
    return 0;
}

double distance(const DomainSpec& d, const Point& x)
{
    return project(d, x).distance;
}

Projection project(const DomainSpec& d, const Point& x)
{
    if (!d.contains(x))
        throw Error("point lies outside the domain");

    Projection out;
    switch (d.shape()) {
    case Shape::Interval: {
        const double l = d.length_x();
        const double xc = std::clamp(x[0], 0.0, l);
        const double left = xc;
        const double right = l - xc;
        out.ambiguous = std::abs(left - right) <= tie_rel * l;
        if (left <= right || out.ambiguous) {
            out.foot = {0.0, 0.0};
            out.normal = {1.0, 0.0};
            out.distance = left;
            out.face = 0;
        } else {
            out.foot = {l, 0.0};
            out.normal = {-1.0, 0.0};
            out.distance = right;
            out.face = 1;
        }
        break;
    }
    case Shape::Rectangle: {
        const double lx = d.length_x();
        const double ly = d.length_y();
        const double px = std::clamp(x[0], 0.0, lx);
        const double py = std::clamp(x[1], 0.0, ly);
        const std::array<double, 4> dist{px, lx - px, py, ly - py};
        int best = 0;
        for (int f = 1; f < 4; ++f)
            if (dist[f] < dist[best]) best = f;
        const double tol = tie_rel * std::max(lx, ly);
        int ties = 0;
        for (int f = 0; f < 4; ++f)
            if (std::abs(dist[f] - dist[best]) <= tol) ++ties;
        // smallest face index among the tied faces
        for (int f = 0; f < 4; ++f) {
            if (std::abs(dist[f] - dist[best]) <= tol) {
                best = f;
                break;
            }
        }
        out.ambiguous = ties > 1;
        out.face = best;
        out.distance = dist[best];
        switch (best) {
        case 0: out.foot = {0.0, py}; out.normal = {1.0, 0.0}; break;
        case 1: out.foot = {lx, py}; out.normal = {-1.0, 0.0}; break;
        case 2: out.foot = {px, 0.0}; out.normal = {0.0, 1.0}; break;
        default: out.foot = {px, ly}; out.normal = {0.0, -1.0}; break;
        }
        break;
    }
    case Shape::Disk: {
        const double rho = d.radius();
        const double r = std::clamp(x[0], 0.0, rho);
        out.foot = {rho, 0.0};
        out.normal = {-1.0, 0.0};
        out.distance = rho - r;
        out.face = 0;
        out.ambiguous = r <= tie_rel * rho;
        break;
    }
    }
    return out;
}

RayPoint normal_ray(const DomainSpec& d, const Point& a, double s)
{
    if (!(s >= 0.0) || !std::isfinite(s))
        throw Error("normal_ray: distance must be nonnegative");
    const Projection pa = project(d, a);
    if (pa.distance > tie_rel * std::max(d.length_x(), d.length_y()))
        throw Error("normal_ray: start point is not on the boundary");
    if (d.shape() == Shape::Rectangle && pa.ambiguous)
        throw Error("normal_ray: inward normal undefined at a rectangle corner");

    double reach = 0.0;
    switch (d.shape()) {
    case Shape::Interval: reach = d.length_x(); break;
    case Shape::Rectangle: reach = pa.face < 2 ? d.length_x() : d.length_y(); break;
    case Shape::Disk: reach = d.radius(); break;
    }
    if (s > reach * (1.0 + tie_rel))
        throw Error("normal_ray: ray leaves the domain");

    RayPoint out;
    out.x = {pa.foot[0] + s * pa.normal[0], pa.foot[1] + s * pa.normal[1]};
    if (d.coords() == 1) out.x[1] = 0.0;
    out.ambiguous = project(d, out.x).ambiguous;
    return out;
}

Grid::Grid(DomainSpec domain, double h)
    : domain_(domain), h_requested_(h), h_(h), nx_(1), ny_(1)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw Error("grid spacing h must be positive");

    const double lx = domain_.length_x();
    auto cells_for = [](double len, double step) {
        return static_cast<std::size_t>(std::ceil(len / step - 1e-9));
    };
    std::size_t cx = std::max<std::size_t>(1, cells_for(lx, h));
    if (domain_.shape() == Shape::Rectangle) {
        const double ly = domain_.length_y();
        // smallest refinement of the x axis for which the y axis also fits
        bool found = false;
        for (std::size_t c = cx; c < cx + 100000; ++c) {
            const double step = lx / static_cast<double>(c);
            const double cy = ly / step;
            if (std::abs(cy - std::round(cy)) <= 1e-9 * std::max(1.0, cy) && std::round(cy) >= 1.0) {
                cx = c;
                ny_ = static_cast<std::size_t>(std::round(cy)) + 1;
                found = true;
                break;
            }
        }
        if (!found)
            throw Error("cannot fit a uniform spacing to both rectangle axes");
    }
    nx_ = cx + 1;
    h_ = lx / static_cast<double>(cx);

    proj_.resize(size());
    for (std::size_t n = 0; n < size(); ++n)
        proj_[n] = project(domain_, node(n));
}

Point Grid::node(std::size_t n) const
{
    const std::size_t i = ix(n);
    const std::size_t j = iy(n);
    Point p{static_cast<double>(i) * h_, static_cast<double>(j) * h_};
    // pin the far edges to the exact lengths
    if (i + 1 == nx_) p[0] = domain_.length_x();
    if (domain_.shape() == Shape::Rectangle && j + 1 == ny_) p[1] = domain_.length_y();
    return p;
}

bool Grid::is_boundary(std::size_t n) const
{
    return face(n) >= 0;
}

int Grid::face(std::size_t n) const
{
    const std::size_t i = ix(n);
    const std::size_t j = iy(n);
    switch (domain_.shape()) {
    case Shape::Interval:
        if (i == 0) return 0;
        if (i + 1 == nx_) return 1;
        return -1;
    case Shape::Rectangle:
        if (i == 0) return 0;
        if (i + 1 == nx_) return 1;
        if (j == 0) return 2;
        if (j + 1 == ny_) return 3;
        return -1;
    case Shape::Disk:
        return i + 1 == nx_ ? 0 : -1;
    }
    return -1;
}

} // namespace dhj
