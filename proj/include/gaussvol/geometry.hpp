#pragma once

#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace gaussvol {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// {x : a·x ≤ b}
struct Halfspace {
    Vector normal;
    double offset = 0.0;
};

/// {x : A x ≤ b}, one row per facet. Rows are kept exactly as given.
struct Polytope {
    RowMatrix normals;
    Vector offsets;
};

/// {x : ‖x − center‖ ≤ radius}
struct Ball {
    Vector center;
    double radius = 1.0;
};

/// {x : lower ≤ x ≤ upper} componentwise
struct AxisBox {
    Vector lower;
    Vector upper;
};

class BodySpec;

struct Intersection {
    std::vector<BodySpec> members;
};

/// A closed convex body answering membership queries.
///
/// Immutable once built; use the named constructors, which validate shapes and
/// dimensions. Boundary points are members.
class BodySpec {
public:
    using Shape = std::variant<Halfspace, Polytope, Ball, AxisBox, Intersection>;

    static BodySpec halfspace(Vector normal, double offset);
    static BodySpec polytope(RowMatrix normals, Vector offsets);
    static BodySpec ball(Vector center, double radius);
    static BodySpec ball(int dim, double radius);
    static BodySpec box(Vector lower, Vector upper);
    static BodySpec cube(int dim, double half_width);
    static BodySpec intersection(std::vector<BodySpec> members);

    int dim() const { return dim_; }
    const Shape& shape() const { return shape_; }

    /// Throws InputError when x has the wrong dimension.
    bool contains(const Vector& x) const;

    /// Membership without the dimension check; for hot loops that already
    /// validated their inputs.
    bool contains_unchecked(const Vector& x) const;

private:
    BodySpec(int dim, Shape shape) : dim_(dim), shape_(std::move(shape)) {}

    int dim_;
    Shape shape_;
};

/// K ∩ {‖x‖ ≤ radius_cap}. Shares the inner body.
class RestrictedBody {
public:
    RestrictedBody(std::shared_ptr<const BodySpec> inner, double radius_cap);

    int dim() const { return inner_->dim(); }
    const BodySpec& inner() const { return *inner_; }
    const std::shared_ptr<const BodySpec>& inner_ptr() const { return inner_; }
    double radius_cap() const { return radius_cap_; }

    bool contains(const Vector& x) const;

    /// Same as contains() when the caller already has ‖x‖².
    bool contains_unchecked(const Vector& x, double norm_sq) const {
        return norm_sq <= cap_sq_ && inner_->contains_unchecked(x);
    }

private:
    std::shared_ptr<const BodySpec> inner_;
    double radius_cap_;
    double cap_sq_;
};

RestrictedBody restrict_to_ball(std::shared_ptr<const BodySpec> body, double radius);
RestrictedBody restrict_to_ball(const BodySpec& body, double radius);

enum class Containment { verified, violated, unknown };

/// Exact check that the body contains the origin-centered unit ball.
Containment verify_unit_ball_containment(const BodySpec& body);

const char* to_string(Containment c);

}  // namespace gaussvol
