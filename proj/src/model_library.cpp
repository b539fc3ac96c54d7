#include "ifs/model_library.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ifs/errors.hpp"

namespace ifs {

namespace {

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw DomainError("bad number '" + std::string(text) + "'");
    }
    return v;
}

std::size_t parse_count(std::string_view text) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw DomainError("bad integer '" + std::string(text) + "'");
    }
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_guards(const ModelId& id) {
    if (id.name == "finite_permutations" && (id.n < 1 || id.n > 5)) {
        throw DomainError("finite_permutations needs 1 <= n <= 5");
    }
    if (id.name == "sigma2_prepend" && (id.depth < 2 || id.depth > kMaxSymbolDepth)) {
        throw DomainError("sigma2_prepend depth must lie in 2..64");
    }
    if (id.name == "affine_family") {
        if (id.betas.empty() || id.betas.size() != id.offsets.size()) {
            throw DomainError("affine_family needs matching slope and offset lists");
        }
        for (double b : id.betas) {
            if (!(std::abs(b) < 1.0)) throw DomainError("affine_family slopes must satisfy |beta| < 1");
        }
    }
}

Point invert_step(const Map& f, const SpaceKind& space, const Point& y) {
    const MapDescriptor& d = f.descriptor();
    const std::string& form = d.form;
    if (form == "identity") return y;
    if (form == "affine") {
        const double slope = d.params[0];
        const double offset = d.params[1];
        if (space.tag() == SpaceKind::Tag::kCircle) {
            if (slope != 1.0 && slope != -1.0) throw DomainError("circle affine map '" + d.name + "' is not invertible");
            return Point::real(space, (y.coord() - offset) / slope);
        }
        if (slope == 0.0) throw DomainError("constant map '" + d.name + "' has no backward branch");
        const double x = (y.coord() - offset) / slope;
        if (x < space.lo() - 1e-12 || x > space.hi() + 1e-12) {
            throw DomainError("preimage " + fmt(x) + " under '" + d.name + "' leaves " + space.describe());
        }
        return Point::real_settled(space, x);
    }
    if (form == "bump" || form == "circle_lift") {
        const double t = quadratic_lift_inverse(d.params[0], d.params[1], y.coord());
        return form == "bump" ? Point::real_settled(space, t) : Point::real(space, t);
    }
    if (form == "prepend") {
        const std::uint64_t bit = d.params[0] == 1.0 ? 1 : 0;
        if ((y.word() & 1u) != bit) {
            throw DomainError("point does not start with symbol " + std::to_string(bit) + ", outside the image of '" +
                              d.name + "'");
        }
        return Point::symbols(space, y.word() >> 1);
    }
    if (form == "permutation") {
        for (std::size_t i = 0; i < d.params.size(); ++i) {
            if (static_cast<std::size_t>(d.params[i]) == y.element()) return Point::element(space, i);
        }
    }
    throw DomainError("map '" + d.name + "' (" + form + ") has no closed-form inverse");
}

}  // namespace

std::string ModelId::to_string() const {
    if (name == "finite_permutations") return name + ":" + std::to_string(n);
    if (name == "sigma2_prepend" && depth != kMaxSymbolDepth) return name + ":" + std::to_string(depth);
    if (name == "affine_family") {
        std::string s = name + ":";
        for (std::size_t i = 0; i < betas.size(); ++i) {
            if (i) s += ',';
            s += fmt(betas[i]) + "@" + fmt(offsets[i]);
        }
        return s;
    }
    return name;
}

ModelId parse_model_id(std::string_view text) {
    ModelId id;
    const auto colon = text.find(':');
    id.name = std::string(text.substr(0, colon));
    const std::string_view args = colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
    if (id.name == "binary_affine" || id.name == "circle_pair" || id.name == "interval_pair" || id.name == "identity") {
        if (!args.empty()) throw DomainError("model '" + id.name + "' takes no parameters");
    } else if (id.name == "sigma2_prepend") {
        if (!args.empty()) id.depth = static_cast<int>(parse_count(args));
    } else if (id.name == "finite_permutations") {
        if (args.empty()) throw DomainError("finite_permutations needs n, e.g. finite_permutations:3");
        id.n = parse_count(args);
    } else if (id.name == "affine_family") {
        if (args.empty()) throw DomainError("affine_family needs slope@offset pairs");
        std::size_t start = 0;
        while (start <= args.size()) {
            const std::size_t end = std::min(args.find(',', start), args.size());
            const std::string_view pair = args.substr(start, end - start);
            const auto at = pair.find('@');
            if (at == std::string_view::npos) throw DomainError("affine_family entry '" + std::string(pair) + "' needs slope@offset");
            id.betas.push_back(parse_double(pair.substr(0, at)));
            id.offsets.push_back(parse_double(pair.substr(at + 1)));
            start = end + 1;
        }
    } else {
        throw DomainError("unknown model '" + id.name + "'");
    }
    check_guards(id);
    return id;
}

IFSSpec make_system(const ModelId& id) {
    check_guards(id);
    if (id.name == "binary_affine") {
        const SpaceKind s = SpaceKind::interval(0.0, 1.0);
        return IFSSpec(s, {make_map(s, affine_descriptor("f0", 0.5, 0.0)), make_map(s, affine_descriptor("f1", 0.5, 0.5))},
                       0.5, {false, false});
    }
    if (id.name == "sigma2_prepend") {
        const SpaceKind s = SpaceKind::symbols(id.depth);
        return IFSSpec(s, {make_map(s, prepend_descriptor("f0", 0)), make_map(s, prepend_descriptor("f1", 1))}, 0.5,
                       {false, false});
    }
    if (id.name == "circle_pair") {
        const SpaceKind s = SpaceKind::circle();
        return IFSSpec(s, {make_map(s, circle_lift_descriptor("F1", 1.0, -1.0)), make_map(s, circle_lift_descriptor("F2", 1.0, 1.0))},
                       std::nullopt, {true, true});
    }
    if (id.name == "interval_pair") {
        const SpaceKind s = SpaceKind::interval(0.0, 1.0);
        return IFSSpec(s, {make_map(s, bump_descriptor("f1", 1.5, 1.5)), make_map(s, bump_descriptor("f2", 1.0, 1.0))},
                       std::nullopt, {true, true});
    }
    if (id.name == "finite_permutations") {
        const SpaceKind s = SpaceKind::finite(id.n);
        std::vector<std::size_t> p(id.n);
        std::iota(p.begin(), p.end(), 0);
        std::vector<Map> maps;
        do {
            maps.push_back(make_map(s, permutation_descriptor("p" + std::to_string(maps.size()), p)));
        } while (std::next_permutation(p.begin(), p.end()));
        std::vector<bool> flags(maps.size(), true);
        return IFSSpec(s, std::move(maps), std::nullopt, std::move(flags));
    }
    if (id.name == "affine_family") {
        const SpaceKind s = SpaceKind::interval(0.0, 1.0);
        std::vector<Map> maps;
        double claimed = 0.0;
        for (std::size_t i = 0; i < id.betas.size(); ++i) {
            maps.push_back(make_map(s, affine_descriptor("f" + std::to_string(i), id.betas[i], id.offsets[i])));
            claimed = std::max(claimed, std::abs(id.betas[i]));
        }
        std::optional<double> claim;
        if (claimed > 0.0) claim = claimed;
        return IFSSpec(s, std::move(maps), claim, std::vector<bool>(id.betas.size(), false));
    }
    if (id.name == "identity") {
        const SpaceKind s = SpaceKind::interval(0.0, 1.0);
        return IFSSpec(s, {make_map(s, identity_descriptor("id"))}, std::nullopt, {true});
    }
    throw DomainError("unknown model '" + id.name + "'");
}

const std::vector<ModelInfo>& model_catalog() {
    static const std::vector<ModelInfo> catalog{
        {"binary_affine", "binary_affine", "x/2 and x/2 + 1/2 on [0,1]; contraction 0.5"},
        {"sigma2_prepend", "sigma2_prepend:64", "s -> 0s and s -> 1s on binary sequences; contraction 0.5"},
        {"circle_pair", "circle_pair", "quadratic circle lifts F1, F2 fixing 0 and 1/2; surjective"},
        {"interval_pair", "interval_pair", "interval maps f1 > f2 > x off {0, 1/2, 1}; surjective"},
        {"finite_permutations", "finite_permutations:3", "all n! permutations of n points (n <= 5)"},
        {"affine_family", "affine_family:0.5@0,0.5@0.5", "maps beta_i x + c_i on [0,1]; contraction max |beta_i|"},
        {"identity", "identity", "identity map on [0,1]"},
    };
    return catalog;
}

double quadratic_lift_inverse(double a, double b, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("lift inverse needs t in [0, 1]");
    double lo = 0.0;
    double hi = 1.0;
    for (;;) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        if (quadratic_lift(a, b, mid) < t) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(quadratic_lift(a, b, lo) - t) <= std::abs(quadratic_lift(a, b, hi) - t) ? lo : hi;
}

std::vector<Point> backward_branch(const IFSSpec& ifs, MapIndex g, const Point& y, std::size_t m) {
    const Map& f = ifs.map(g);
    if (!(y.kind() == ifs.space())) throw DomainError("branch endpoint is not in the system's space");
    std::vector<Point> branch{y};
    branch.reserve(m + 1);
    for (std::size_t j = 0; j < m; ++j) {
        Point pre = invert_step(f, ifs.space(), branch.back());
        if (distance(apply(ifs, g, pre), branch.back()) > 1e-12) {
            throw DomainError("preimage under '" + f.name() + "' misses its target at step " + std::to_string(j + 1));
        }
        branch.push_back(std::move(pre));
    }
    std::reverse(branch.begin(), branch.end());
    return branch;
}

std::vector<Point> backward_branch(const ModelId& id, MapIndex g, const Point& y, std::size_t m) {
    return backward_branch(make_system(id), g, y, m);
}

}  // namespace ifs
