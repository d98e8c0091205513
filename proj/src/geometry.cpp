#include "gaussvol/geometry.hpp"

#include <cmath>
#include <string>

#include "gaussvol/errors.hpp"

namespace gaussvol {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) {
        throw InputError(std::string(what) + " contains a non-finite entry");
    }
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw InputError(std::string(what) + " is not finite");
    }
}

}  // namespace

BodySpec BodySpec::halfspace(Vector normal, double offset) {
    if (normal.size() < 1) {
        throw InputError("halfspace: empty normal");
    }
    require_finite(normal, "halfspace normal");
    require_finite(offset, "halfspace offset");
    if (normal.squaredNorm() == 0.0) {
        throw InputError("halfspace: zero normal vector");
    }
    const int dim = static_cast<int>(normal.size());
    return BodySpec(dim, Halfspace{std::move(normal), offset});
}

BodySpec BodySpec::polytope(RowMatrix normals, Vector offsets) {
    if (normals.rows() < 1 || normals.cols() < 1) {
        throw InputError("polytope: needs at least one row and one column");
    }
    if (normals.rows() != offsets.size()) {
        throw InputError("polytope: " + std::to_string(normals.rows()) + " rows but " +
                         std::to_string(offsets.size()) + " offsets");
    }
    if (!normals.allFinite()) {
        throw InputError("polytope normals contain a non-finite entry");
    }
    require_finite(offsets, "polytope offsets");
    for (Eigen::Index r = 0; r < normals.rows(); ++r) {
        if (normals.row(r).squaredNorm() == 0.0) {
            throw InputError("polytope: row " + std::to_string(r) + " has a zero normal");
        }
    }
    const int dim = static_cast<int>(normals.cols());
    return BodySpec(dim, Polytope{std::move(normals), std::move(offsets)});
}

BodySpec BodySpec::ball(Vector center, double radius) {
    if (center.size() < 1) {
        throw InputError("ball: empty center");
    }
    require_finite(center, "ball center");
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InputError("ball: radius must be positive and finite");
    }
    const int dim = static_cast<int>(center.size());
    return BodySpec(dim, Ball{std::move(center), radius});
}

BodySpec BodySpec::ball(int dim, double radius) {
    if (dim < 1) {
        throw InputError("ball: dimension must be positive");
    }
    return ball(Vector::Zero(dim), radius);
}

BodySpec BodySpec::box(Vector lower, Vector upper) {
    if (lower.size() < 1 || lower.size() != upper.size()) {
        throw InputError("box: lower and upper must be nonempty and the same length");
    }
    require_finite(lower, "box lower");
    require_finite(upper, "box upper");
    if ((lower.array() > upper.array()).any()) {
        throw InputError("box: lower exceeds upper in some coordinate");
    }
    const int dim = static_cast<int>(lower.size());
    return BodySpec(dim, AxisBox{std::move(lower), std::move(upper)});
}

BodySpec BodySpec::cube(int dim, double half_width) {
    if (dim < 1) {
        throw InputError("box: dimension must be positive");
    }
    return box(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width));
}

BodySpec BodySpec::intersection(std::vector<BodySpec> members) {
    if (members.empty()) {
        throw InputError("intersection: needs at least one member");
    }
    const int dim = members.front().dim();
    for (const auto& m : members) {
        if (m.dim() != dim) {
            throw InputError("intersection: members have different dimensions (" +
                             std::to_string(dim) + " vs " + std::to_string(m.dim()) + ")");
        }
    }
    return BodySpec(dim, Intersection{std::move(members)});
}

bool BodySpec::contains(const Vector& x) const {
    if (x.size() != dim_) {
        throw InputError("dimension mismatch: point has " + std::to_string(x.size()) +
                         " coordinates, body has dimension " + std::to_string(dim_));
    }
    return contains_unchecked(x);
}

bool BodySpec::contains_unchecked(const Vector& x) const {
    return std::visit(
        Overloaded{
            [&](const Halfspace& h) { return h.normal.dot(x) <= h.offset; },
            [&](const Polytope& p) {
                for (Eigen::Index r = 0; r < p.normals.rows(); ++r) {
                    if (p.normals.row(r).dot(x) > p.offsets[r]) {
                        return false;
                    }
                }
                return true;
            },
            [&](const Ball& b) { return (x - b.center).squaredNorm() <= b.radius * b.radius; },
            [&](const AxisBox& b) {
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    if (x[i] < b.lower[i] || x[i] > b.upper[i]) {
                        return false;
                    }
                }
                return true;
            },
            [&](const Intersection& s) {
                for (const auto& m : s.members) {
                    if (!m.contains_unchecked(x)) {
                        return false;
                    }
                }
                return true;
            },
        },
        shape_);
}

RestrictedBody::RestrictedBody(std::shared_ptr<const BodySpec> inner, double radius_cap)
    : inner_(std::move(inner)), radius_cap_(radius_cap), cap_sq_(radius_cap * radius_cap) {
    if (!inner_) {
        throw InputError("restrict_to_ball: null body");
    }
    if (!(radius_cap > 0.0)) {
        throw InputError("restrict_to_ball: radius must be positive");
    }
}

bool RestrictedBody::contains(const Vector& x) const {
    if (x.size() != dim()) {
        throw InputError("dimension mismatch: point has " + std::to_string(x.size()) +
                         " coordinates, body has dimension " + std::to_string(dim()));
    }
    return contains_unchecked(x, x.squaredNorm());
}

RestrictedBody restrict_to_ball(std::shared_ptr<const BodySpec> body, double radius) {
    return RestrictedBody(std::move(body), radius);
}

RestrictedBody restrict_to_ball(const BodySpec& body, double radius) {
    return RestrictedBody(std::make_shared<const BodySpec>(body), radius);
}

Containment verify_unit_ball_containment(const BodySpec& body) {
    return std::visit(
        Overloaded{
            [](const Halfspace& h) {
                return h.offset / h.normal.norm() >= 1.0 ? Containment::verified
                                                         : Containment::violated;
            },
            [](const Polytope& p) {
                for (Eigen::Index r = 0; r < p.normals.rows(); ++r) {
                    if (!(p.offsets[r] / p.normals.row(r).norm() >= 1.0)) {
                        return Containment::violated;
                    }
                }
                return Containment::verified;
            },
            [](const Ball& b) {
                return b.radius >= 1.0 + b.center.norm() ? Containment::verified
                                                         : Containment::violated;
            },
            [](const AxisBox& b) {
                return ((b.lower.array() <= -1.0).all() && (b.upper.array() >= 1.0).all())
                           ? Containment::verified
                           : Containment::violated;
            },
            [](const Intersection& s) {
                auto result = Containment::verified;
                for (const auto& m : s.members) {
                    const auto c = verify_unit_ball_containment(m);
                    if (c == Containment::violated) {
                        return Containment::violated;
                    }
                    if (c == Containment::unknown) {
                        result = Containment::unknown;
                    }
                }
                return result;
            },
        },
        body.shape());
}

const char* to_string(Containment c) {
    switch (c) {
        case Containment::verified: return "verified";
        case Containment::violated: return "violated";
        case Containment::unknown: return "unknown";
    }
    return "unknown";
}

}  // namespace gaussvol
