#include "gaussvol/body_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "gaussvol/errors.hpp"

namespace gaussvol {
namespace {

using nlohmann::json;

const json& field(const json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end()) {
        throw InputError(std::string("body: missing field \"") + key + "\"");
    }
    return *it;
}

double number(const json& v, const char* what) {
    if (!v.is_number()) {
        throw InputError(std::string("body: ") + what + " must be a number");
    }
    return v.get<double>();
}

Vector vector_of(const json& v, const char* what) {
    if (!v.is_array()) {
        throw InputError(std::string("body: ") + what + " must be an array of numbers");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = number(v[i], what);
    }
    return out;
}

void check_dim(const BodySpec& body, const json& doc, bool required) {
    const auto it = doc.find("dim");
    if (it == doc.end()) {
        if (required) {
            throw InputError("body: missing field \"dim\"");
        }
        return;
    }
    if (!it->is_number_integer() || it->get<long long>() < 1) {
        throw InputError("body: \"dim\" must be a positive integer");
    }
    if (it->get<long long>() != body.dim()) {
        throw InputError("body: \"dim\" is " + std::to_string(it->get<long long>()) +
                         " but the vectors have length " + std::to_string(body.dim()));
    }
}

// Members of an intersection inherit the enclosing "dim", so a centred ball
// inside one needs no dimension of its own.
BodySpec parse_node(const json& doc, bool top_level, int inherited_dim = 0) {
    if (!doc.is_object()) {
        throw InputError("body: expected a JSON object");
    }
    int dim = inherited_dim;
    const auto own = doc.find("dim");
    if (own != doc.end() && own->is_number_integer() && own->get<long long>() >= 1) {
        dim = static_cast<int>(own->get<long long>());
    }
    const auto& type_field = field(doc, "type");
    if (!type_field.is_string()) {
        throw InputError("body: \"type\" must be a string");
    }
    const std::string type = type_field.get<std::string>();

    auto build = [&]() -> BodySpec {
        if (type == "halfspace") {
            return BodySpec::halfspace(vector_of(field(doc, "a"), "a"), number(field(doc, "b"), "b"));
        }
        if (type == "polytope") {
            const auto& rows = field(doc, "A");
            if (!rows.is_array() || rows.empty()) {
                throw InputError("body: \"A\" must be a nonempty array of rows");
            }
            const Vector first = vector_of(rows[0], "A row");
            RowMatrix normals(static_cast<Eigen::Index>(rows.size()), first.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const Vector row = vector_of(rows[r], "A row");
                if (row.size() != first.size()) {
                    throw InputError("body: polytope rows have different lengths");
                }
                normals.row(static_cast<Eigen::Index>(r)) = row.transpose();
            }
            return BodySpec::polytope(std::move(normals), vector_of(field(doc, "b"), "b"));
        }
        if (type == "ball") {
            const double radius = number(field(doc, "radius"), "radius");
            if (const auto it = doc.find("center"); it != doc.end()) {
                return BodySpec::ball(vector_of(*it, "center"), radius);
            }
            if (dim < 1) {
                field(doc, "dim");
                throw InputError("body: \"dim\" must be a positive integer");
            }
            return BodySpec::ball(dim, radius);
        }
        if (type == "box") {
            return BodySpec::box(vector_of(field(doc, "lower"), "lower"),
                                 vector_of(field(doc, "upper"), "upper"));
        }
        if (type == "intersection") {
            const auto& members = field(doc, "members");
            if (!members.is_array()) {
                throw InputError("body: \"members\" must be an array");
            }
            std::vector<BodySpec> parts;
            for (const auto& m : members) {
                parts.push_back(parse_node(m, false, dim));
            }
            return BodySpec::intersection(std::move(parts));
        }
        throw InputError("body: unknown type \"" + type + "\"");
    };

    BodySpec body = build();
    check_dim(body, doc, top_level);
    return body;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

}  // namespace

BodySpec body_from_json(const json& doc) { return parse_node(doc, true); }

BodySpec parse_body(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("body: invalid JSON: ") + e.what());
    }
    return body_from_json(doc);
}

BodySpec load_body(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("body: cannot open " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_body(text.str());
}

json body_to_json(const BodySpec& body) {
    json out{{"dim", body.dim()}};
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Halfspace>) {
                out["type"] = "halfspace";
                out["a"] = vector_json(shape.normal);
                out["b"] = shape.offset;
            } else if constexpr (std::is_same_v<T, Polytope>) {
                out["type"] = "polytope";
                json rows = json::array();
                for (Eigen::Index r = 0; r < shape.normals.rows(); ++r) {
                    rows.push_back(vector_json(shape.normals.row(r).transpose()));
                }
                out["A"] = rows;
                out["b"] = vector_json(shape.offsets);
            } else if constexpr (std::is_same_v<T, Ball>) {
                out["type"] = "ball";
                out["center"] = vector_json(shape.center);
                out["radius"] = shape.radius;
            } else if constexpr (std::is_same_v<T, AxisBox>) {
                out["type"] = "box";
                out["lower"] = vector_json(shape.lower);
                out["upper"] = vector_json(shape.upper);
            } else {
                out["type"] = "intersection";
                json members = json::array();
                for (const auto& m : shape.members) {
                    members.push_back(body_to_json(m));
                }
                out["members"] = members;
            }
        },
        body.shape());
    return out;
}

}  // namespace gaussvol
