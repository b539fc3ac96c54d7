#include "ifs/spaces.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ifs/errors.hpp"

namespace ifs {

namespace {

constexpr std::size_t kMaxGridNodes = 50'000'000;

std::size_t grid_divisions(double span, double h) {
    const double m = std::ceil(span / h - 1e-9);
    if (!(m < static_cast<double>(kMaxGridNodes))) {
        throw GuardError("grid: resolution too fine for span");
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

std::string format_real(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string symbol_string(const Point& p) {
    std::string s(static_cast<std::size_t>(p.kind().depth()), '0');
    for (int i = 0; i < p.kind().depth(); ++i) {
        if (p.symbol(i)) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

double parse_real(std::string_view text) {
    std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DomainError("cannot parse real coordinate '" + s + "'");
    }
    if (used != s.size()) throw DomainError("trailing characters in coordinate '" + s + "'");
    return v;
}

std::size_t parse_index(std::string_view text) {
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw DomainError("cannot parse element index '" + std::string(text) + "'");
    }
    return v;
}

Point parse_leaves(const SpaceKind& kind, const std::vector<std::string>& leaves, std::size_t& pos) {
    if (kind.tag() == SpaceKind::Tag::kProduct) {
        Point l = parse_leaves(kind.left(), leaves, pos);
        Point r = parse_leaves(kind.right(), leaves, pos);
        return Point::pair(kind, std::move(l), std::move(r));
    }
    if (pos >= leaves.size()) throw DomainError("too few coordinates for " + kind.describe());
    const std::string& s = leaves[pos++];
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval:
        case SpaceKind::Tag::kCircle:
            return Point::real(kind, parse_real(s));
        case SpaceKind::Tag::kSymbols:
            return Point::symbols(kind, s);
        case SpaceKind::Tag::kFinite:
            return Point::element(kind, parse_index(s));
        case SpaceKind::Tag::kProduct:
            break;
    }
    throw DomainError("unreachable space tag");
}

}  // namespace

// SpaceKind -----------------------------------------------------------------

SpaceKind SpaceKind::interval(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("interval requires finite lo < hi");
    }
    SpaceKind k;
    k.tag_ = Tag::kInterval;
    k.lo_ = lo;
    k.hi_ = hi;
    return k;
}

SpaceKind SpaceKind::circle() {
    SpaceKind k;
    k.tag_ = Tag::kCircle;
    k.lo_ = 0.0;
    k.hi_ = 1.0;
    return k;
}

SpaceKind SpaceKind::symbols(int depth, SymbolMetric metric) {
    if (depth < 2 || depth > kMaxSymbolDepth) {
        throw DomainError("symbol space depth must lie in [2, 64]");
    }
    SpaceKind k;
    k.tag_ = Tag::kSymbols;
    k.depth_ = depth;
    k.metric_ = metric;
    return k;
}

SpaceKind SpaceKind::finite(std::size_t n) {
    if (n == 0) throw DomainError("finite space needs at least one element");
    SpaceKind k;
    k.tag_ = Tag::kFinite;
    k.n_ = n;
    return k;
}

SpaceKind SpaceKind::product(const SpaceKind& left, const SpaceKind& right) {
    if (std::max(left.nesting(), right.nesting()) + 1 > kMaxProductNesting) {
        throw GuardError("product nesting exceeds 8");
    }
    SpaceKind k;
    k.tag_ = Tag::kProduct;
    k.left_ = std::make_shared<const SpaceKind>(left);
    k.right_ = std::make_shared<const SpaceKind>(right);
    return k;
}

const SpaceKind& SpaceKind::left() const {
    if (tag_ != Tag::kProduct) throw DomainError("left(): not a product space");
    return *left_;
}

const SpaceKind& SpaceKind::right() const {
    if (tag_ != Tag::kProduct) throw DomainError("right(): not a product space");
    return *right_;
}

int SpaceKind::nesting() const {
    if (tag_ != Tag::kProduct) return 0;
    return 1 + std::max(left_->nesting(), right_->nesting());
}

std::size_t SpaceKind::leaves() const {
    if (tag_ != Tag::kProduct) return 1;
    return left_->leaves() + right_->leaves();
}

std::string SpaceKind::name() const {
    switch (tag_) {
        case Tag::kInterval: return "interval";
        case Tag::kCircle: return "circle";
        case Tag::kSymbols: return "symbols";
        case Tag::kFinite: return "finite";
        case Tag::kProduct: return "product";
    }
    return "unknown";
}

std::string SpaceKind::describe() const {
    switch (tag_) {
        case Tag::kInterval: return "interval[" + format_real(lo_) + "," + format_real(hi_) + "]";
        case Tag::kCircle: return "circle";
        case Tag::kSymbols: return "symbols(" + std::to_string(depth_) + ")";
        case Tag::kFinite: return "finite(" + std::to_string(n_) + ")";
        case Tag::kProduct: return "product(" + left_->describe() + "," + right_->describe() + ")";
    }
    return "unknown";
}

bool SpaceKind::grid_supported() const {
    switch (tag_) {
        case Tag::kSymbols: return false;
        case Tag::kProduct: return left_->grid_supported() && right_->grid_supported();
        default: return true;
    }
}

bool operator==(const SpaceKind& a, const SpaceKind& b) {
    if (a.tag_ != b.tag_) return false;
    switch (a.tag_) {
        case SpaceKind::Tag::kInterval: return a.lo_ == b.lo_ && a.hi_ == b.hi_;
        case SpaceKind::Tag::kCircle: return true;
        case SpaceKind::Tag::kSymbols: return a.depth_ == b.depth_ && a.metric_ == b.metric_;
        case SpaceKind::Tag::kFinite: return a.n_ == b.n_;
        case SpaceKind::Tag::kProduct:
            return (a.left_ == b.left_ || *a.left_ == *b.left_) && (a.right_ == b.right_ || *a.right_ == *b.right_);
    }
    return false;
}

// Point ---------------------------------------------------------------------

double canonical_circle(double t) {
    if (!std::isfinite(t)) throw DomainError("circle coordinate must be finite");
    double r = t - std::floor(t);
    // floor of a tiny negative value leaves r == 1.0 after rounding
    if (r >= 1.0) r = 0.0;
    return r == 0.0 ? 0.0 : r;
}

std::uint64_t symbol_mask(int depth) {
    return depth >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << depth) - 1);
}

Point Point::real(const SpaceKind& kind, double x) {
    Point p(kind);
    if (kind.tag() == SpaceKind::Tag::kCircle) {
        p.x_ = canonical_circle(x);
        return p;
    }
    if (kind.tag() != SpaceKind::Tag::kInterval) {
        throw DomainError("real coordinate given for " + kind.describe());
    }
    if (!(x >= kind.lo() && x <= kind.hi())) {
        throw DomainError("coordinate " + format_real(x) + " outside " + kind.describe());
    }
    p.x_ = x;
    return p;
}

Point Point::real_settled(const SpaceKind& kind, double x, double slack) {
    if (kind.tag() == SpaceKind::Tag::kInterval) {
        if (x < kind.lo() && x >= kind.lo() - slack) x = kind.lo();
        if (x > kind.hi() && x <= kind.hi() + slack) x = kind.hi();
    }
    return real(kind, x);
}

Point Point::symbols(const SpaceKind& kind, std::uint64_t word) {
    if (kind.tag() != SpaceKind::Tag::kSymbols) {
        throw DomainError("symbol word given for " + kind.describe());
    }
    if ((word & ~symbol_mask(kind.depth())) != 0) {
        throw DomainError("symbol word has bits beyond depth");
    }
    Point p(kind);
    p.word_ = word;
    return p;
}

Point Point::symbols(const SpaceKind& kind, std::string_view bits) {
    if (kind.tag() != SpaceKind::Tag::kSymbols) {
        throw DomainError("symbol string given for " + kind.describe());
    }
    if (bits.size() > static_cast<std::size_t>(kind.depth())) {
        throw DomainError("symbol string longer than depth");
    }
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            word |= std::uint64_t{1} << i;
        } else if (bits[i] != '0') {
            throw DomainError("symbol string must contain only 0 and 1");
        }
    }
    return symbols(kind, word);
}

Point Point::element(const SpaceKind& kind, std::size_t i) {
    if (kind.tag() != SpaceKind::Tag::kFinite) {
        throw DomainError("element index given for " + kind.describe());
    }
    if (i >= kind.size()) throw DomainError("element index out of range");
    Point p(kind);
    p.word_ = i;
    return p;
}

Point Point::pair(Point left, Point right) {
    Point p(SpaceKind::product(left.kind(), right.kind()));
    p.parts_.reserve(2);
    p.parts_.push_back(std::move(left));
    p.parts_.push_back(std::move(right));
    return p;
}

Point Point::pair(const SpaceKind& product, Point left, Point right) {
    if (product.tag() != SpaceKind::Tag::kProduct || !(left.kind() == product.left()) ||
        !(right.kind() == product.right())) {
        throw DomainError("pair components do not match " + product.describe());
    }
    Point p(product);
    p.parts_.reserve(2);
    p.parts_.push_back(std::move(left));
    p.parts_.push_back(std::move(right));
    return p;
}

const Point& Point::left() const {
    if (parts_.size() != 2) throw DomainError("left(): not a product point");
    return parts_[0];
}

const Point& Point::right() const {
    if (parts_.size() != 2) throw DomainError("right(): not a product point");
    return parts_[1];
}

bool operator==(const Point& a, const Point& b) {
    if (!(a.kind_ == b.kind_)) return false;
    switch (a.kind_.tag()) {
        case SpaceKind::Tag::kInterval:
        case SpaceKind::Tag::kCircle: return a.x_ == b.x_;
        case SpaceKind::Tag::kSymbols:
        case SpaceKind::Tag::kFinite: return a.word_ == b.word_;
        case SpaceKind::Tag::kProduct: return a.parts_[0] == b.parts_[0] && a.parts_[1] == b.parts_[1];
    }
    return false;
}

// Metric --------------------------------------------------------------------

bool in_space(const SpaceKind& kind, const Point& p) {
    if (!(p.kind() == kind)) return false;
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval: return p.coord() >= kind.lo() && p.coord() <= kind.hi();
        case SpaceKind::Tag::kCircle: return p.coord() >= 0.0 && p.coord() < 1.0;
        case SpaceKind::Tag::kSymbols: return (p.word() & ~symbol_mask(kind.depth())) == 0;
        case SpaceKind::Tag::kFinite: return p.element() < kind.size();
        case SpaceKind::Tag::kProduct: return in_space(kind.left(), p.left()) && in_space(kind.right(), p.right());
    }
    return false;
}

double distance(const Point& a, const Point& b) {
    const SpaceKind& kind = a.kind();
    if (!(kind == b.kind())) {
        throw DomainError("distance between " + kind.describe() + " and " + b.kind().describe());
    }
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval: return std::abs(a.coord() - b.coord());
        case SpaceKind::Tag::kCircle: {
            const double d = std::abs(a.coord() - b.coord());
            return std::min(d, 1.0 - d);
        }
        case SpaceKind::Tag::kSymbols: {
            const std::uint64_t diff = a.word() ^ b.word();
            if (diff == 0) return 0.0;
            const int k = std::countr_zero(diff);
            return kind.metric() == SymbolMetric::kShifted ? std::ldexp(1.0, 1 - k) : std::ldexp(1.0, -k);
        }
        case SpaceKind::Tag::kFinite: return a.element() == b.element() ? 0.0 : 1.0;
        case SpaceKind::Tag::kProduct:
            return std::max(distance(a.left(), b.left()), distance(a.right(), b.right()));
    }
    return 0.0;
}

double diameter(const SpaceKind& kind) {
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval: return kind.hi() - kind.lo();
        case SpaceKind::Tag::kCircle: return 0.5;
        case SpaceKind::Tag::kSymbols: return kind.metric() == SymbolMetric::kShifted ? 2.0 : 1.0;
        case SpaceKind::Tag::kFinite: return kind.size() > 1 ? 1.0 : 0.0;
        case SpaceKind::Tag::kProduct: return std::max(diameter(kind.left()), diameter(kind.right()));
    }
    return 0.0;
}

std::vector<Point> grid(const SpaceKind& kind, double resolution) {
    if (!(resolution > 0.0)) throw DomainError("grid resolution must be positive");
    std::vector<Point> out;
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval: {
            const double span = kind.hi() - kind.lo();
            const std::size_t m = grid_divisions(span, resolution);
            out.reserve(m + 1);
            for (std::size_t i = 0; i < m; ++i) {
                out.push_back(Point::real(kind, kind.lo() + span * static_cast<double>(i) / static_cast<double>(m)));
            }
            out.push_back(Point::real(kind, kind.hi()));
            return out;
        }
        case SpaceKind::Tag::kCircle: {
            const std::size_t m = grid_divisions(1.0, resolution);
            out.reserve(m);
            for (std::size_t i = 0; i < m; ++i) {
                out.push_back(Point::real(kind, static_cast<double>(i) / static_cast<double>(m)));
            }
            return out;
        }
        case SpaceKind::Tag::kFinite:
            out.reserve(kind.size());
            for (std::size_t i = 0; i < kind.size(); ++i) out.push_back(Point::element(kind, i));
            return out;
        case SpaceKind::Tag::kProduct: {
            const auto left = grid(kind.left(), resolution);
            const auto right = grid(kind.right(), resolution);
            if (left.size() * right.size() > kMaxGridNodes) throw GuardError("product grid too large");
            out.reserve(left.size() * right.size());
            for (const auto& l : left) {
                for (const auto& r : right) out.push_back(Point::pair(kind, l, r));
            }
            return out;
        }
        case SpaceKind::Tag::kSymbols:
            break;
    }
    throw UnsupportedKind("grid: symbol spaces are not discretized");
}

Point random_point(const SpaceKind& kind, Rng& rng) {
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval: return Point::real(kind, rng.uniform(kind.lo(), kind.hi()));
        case SpaceKind::Tag::kCircle: return Point::real(kind, rng.uniform());
        case SpaceKind::Tag::kSymbols: return Point::symbols(kind, rng.bits() & symbol_mask(kind.depth()));
        case SpaceKind::Tag::kFinite: return Point::element(kind, rng.index(kind.size()));
        case SpaceKind::Tag::kProduct: {
            Point l = random_point(kind.left(), rng);
            Point r = random_point(kind.right(), rng);
            return Point::pair(kind, std::move(l), std::move(r));
        }
    }
    throw DomainError("unreachable space tag");
}

Point displace(const Point& p, double r, Rng& rng) {
    if (!(r >= 0.0)) throw DomainError("displacement must be nonnegative");
    const SpaceKind& kind = p.kind();
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval: {
            const double x = p.coord();
            const double up = x + r;
            const double down = x - r;
            const bool prefer_up = rng.coin();
            if (prefer_up && up <= kind.hi()) return Point::real(kind, up);
            if (down >= kind.lo()) return Point::real(kind, down);
            if (up <= kind.hi()) return Point::real(kind, up);
            // both directions overshoot: go as far as the space allows
            return Point::real(kind, (x - kind.lo() >= kind.hi() - x) ? kind.lo() : kind.hi());
        }
        case SpaceKind::Tag::kCircle: {
            const double step = std::min(r, 0.5);
            return Point::real(kind, rng.coin() ? p.coord() + step : p.coord() - step);
        }
        case SpaceKind::Tag::kSymbols: {
            const int base = kind.metric() == SymbolMetric::kShifted ? 1 : 0;
            for (int k = 0; k < kind.depth(); ++k) {
                if (std::ldexp(1.0, base - k) <= r) {
                    const std::uint64_t keep = k == 0 ? 0 : symbol_mask(k);
                    const std::uint64_t flipped = (p.word() ^ (std::uint64_t{1} << k)) & (keep | (std::uint64_t{1} << k));
                    const std::uint64_t above = k + 1 >= 64 ? 0 : (rng.bits() & symbol_mask(kind.depth()) & ~symbol_mask(k + 1));
                    return Point::symbols(kind, flipped | above);
                }
            }
            return p;
        }
        case SpaceKind::Tag::kFinite: {
            if (r < 1.0 || kind.size() < 2) return p;
            const std::size_t shift = 1 + rng.index(kind.size() - 1);
            return Point::element(kind, (p.element() + shift) % kind.size());
        }
        case SpaceKind::Tag::kProduct: {
            Point l = displace(p.left(), r, rng);
            Point rr = displace(p.right(), r, rng);
            return Point::pair(kind, std::move(l), std::move(rr));
        }
    }
    throw DomainError("unreachable space tag");
}

// Text and JSON -------------------------------------------------------------

std::vector<std::string> point_fields(const Point& p) {
    switch (p.kind().tag()) {
        case SpaceKind::Tag::kInterval:
        case SpaceKind::Tag::kCircle: return {format_real(p.coord())};
        case SpaceKind::Tag::kSymbols: return {symbol_string(p)};
        case SpaceKind::Tag::kFinite: return {std::to_string(p.element())};
        case SpaceKind::Tag::kProduct: {
            auto out = point_fields(p.left());
            auto right = point_fields(p.right());
            out.insert(out.end(), right.begin(), right.end());
            return out;
        }
    }
    return {};
}

std::string format_point(const Point& p) {
    const auto fields = point_fields(p);
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

Point parse_point(const SpaceKind& kind, std::string_view text) {
    if (!text.empty() && text.front() == '{') {
        return point_from_json(nlohmann::json::parse(text), kind);
    }
    std::vector<std::string> leaves;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            leaves.push_back(current);
            current.clear();
        } else if (c != ' ') {
            current += c;
        }
    }
    leaves.push_back(current);
    std::size_t pos = 0;
    Point p = parse_leaves(kind, leaves, pos);
    if (pos != leaves.size()) throw DomainError("too many coordinates for " + kind.describe());
    return p;
}

nlohmann::json to_json(const SpaceKind& kind) {
    nlohmann::json j;
    j["type"] = kind.name();
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval:
            j["lo"] = kind.lo();
            j["hi"] = kind.hi();
            break;
        case SpaceKind::Tag::kCircle: break;
        case SpaceKind::Tag::kSymbols:
            j["depth"] = kind.depth();
            j["metric"] = kind.metric() == SymbolMetric::kShifted ? "shifted" : "standard";
            break;
        case SpaceKind::Tag::kFinite: j["n"] = kind.size(); break;
        case SpaceKind::Tag::kProduct:
            j["left"] = to_json(kind.left());
            j["right"] = to_json(kind.right());
            break;
    }
    return j;
}

SpaceKind space_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "interval") return SpaceKind::interval(j.value("lo", 0.0), j.value("hi", 1.0));
    if (type == "circle") return SpaceKind::circle();
    if (type == "symbols") {
        const std::string metric = j.value("metric", std::string("shifted"));
        if (metric != "shifted" && metric != "standard") throw DomainError("unknown symbol metric '" + metric + "'");
        return SpaceKind::symbols(j.value("depth", kMaxSymbolDepth),
                                  metric == "shifted" ? SymbolMetric::kShifted : SymbolMetric::kStandard);
    }
    if (type == "finite") return SpaceKind::finite(j.at("n").get<std::size_t>());
    if (type == "product") return SpaceKind::product(space_from_json(j.at("left")), space_from_json(j.at("right")));
    throw DomainError("unknown space type '" + type + "'");
}

nlohmann::json to_json(const Point& p) {
    nlohmann::json j;
    j["kind"] = p.kind().name();
    switch (p.kind().tag()) {
        case SpaceKind::Tag::kInterval:
        case SpaceKind::Tag::kCircle: j["value"] = p.coord(); break;
        case SpaceKind::Tag::kSymbols: j["value"] = symbol_string(p); break;
        case SpaceKind::Tag::kFinite: j["value"] = p.element(); break;
        case SpaceKind::Tag::kProduct: j["value"] = nlohmann::json::array({to_json(p.left()), to_json(p.right())}); break;
    }
    return j;
}

Point point_from_json(const nlohmann::json& j, const SpaceKind& kind) {
    const std::string name = j.at("kind").get<std::string>();
    if (name != kind.name()) throw DomainError("point kind '" + name + "' does not match " + kind.describe());
    const auto& v = j.at("value");
    switch (kind.tag()) {
        case SpaceKind::Tag::kInterval:
        case SpaceKind::Tag::kCircle: return Point::real(kind, v.get<double>());
        case SpaceKind::Tag::kSymbols: return Point::symbols(kind, v.get<std::string>());
        case SpaceKind::Tag::kFinite: return Point::element(kind, v.get<std::size_t>());
        case SpaceKind::Tag::kProduct: {
            if (!v.is_array() || v.size() != 2) throw DomainError("product point needs two components");
            return Point::pair(kind, point_from_json(v[0], kind.left()), point_from_json(v[1], kind.right()));
        }
    }
    throw DomainError("unreachable space tag");
}

}  // namespace ifs
