#include "copulalab/families.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "copulalab/parallel.hpp"

namespace copulalab::families {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

/// Copulas combine to copulas, anything certified-or-claimed quasi combines
/// to a quasi-copula, unknown inputs stay unknown.
ClassTag combine_tags(const std::vector<DependenceFunction>& members) {
    bool all_copula = true, all_quasi = true;
    for (const auto& f : members) {
        if (f.class_tag() != ClassTag::copula) all_copula = false;
        if (f.class_tag() == ClassTag::unverified) all_quasi = false;
    }
    if (all_copula) return ClassTag::copula;
    if (all_quasi) return ClassTag::quasi_copula;
    return ClassTag::unverified;
}

double w_lower(double u, double v) { return std::max(u + v - 1.0, 0.0); }

/// Validates that intervals share at most one endpoint; returns them sorted.
std::vector<OrdinalBlock> sorted_blocks(std::vector<OrdinalBlock> blocks, const char* who) {
    for (const auto& b : blocks) {
        require(b.lo >= 0.0 && b.hi <= 1.0 && b.lo < b.hi,
                std::string(who) + ": block [" + fmt(b.lo) + "," + fmt(b.hi) + "] is invalid");
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const OrdinalBlock& a, const OrdinalBlock& b) { return a.lo < b.lo; });
    for (std::size_t k = 1; k < blocks.size(); ++k)
        require(blocks[k - 1].hi <= blocks[k].lo, std::string(who) + ": overlapping intervals");
    return blocks;
}

}  // namespace

// ============================================================================
// Frechet bounds
// ============================================================================

DependenceFunction frechet(FrechetKind kind, int n) {
    require(n >= 2, "frechet: n must be at least 2");
    switch (kind) {
        case FrechetKind::W: {
            auto eval = [n](std::span<const double> u) {
                double s = 0.0;
                for (double c : u) s += c;
                return std::max(s - (n - 1), 0.0);
            };
            const ClassTag tag = (n == 2) ? ClassTag::copula : ClassTag::proper_quasi_copula;
            return DependenceFunction(n, eval, tag, "w" + std::to_string(n));
        }
        case FrechetKind::M: {
            auto eval = [](std::span<const double> u) {
                double s = u[0];
                for (double c : u.subspan(1)) s = std::min(s, c);
                return s;
            };
            return DependenceFunction(n, eval, ClassTag::copula, "m" + std::to_string(n));
        }
        case FrechetKind::Pi: {
            auto eval = [](std::span<const double> u) {
                double s = 1.0;
                for (double c : u) s *= c;
                return s;
            };
            DependenceFunction pi(n, eval, ClassTag::copula, "pi" + std::to_string(n));
            if (n == 2)
                return std::move(pi)
                    .with_kernel([](double, double v) { return v; })
                    .with_density([](double, double) { return 1.0; });
            return pi;
        }
    }
    throw std::invalid_argument("frechet: unknown kind");
}

// ============================================================================
// Ordinal sums and mixtures
// ============================================================================

DependenceFunction ordinal_sum(std::vector<OrdinalBlock> blocks) {
    auto sorted = sorted_blocks(std::move(blocks), "ordinal_sum");
    require(!sorted.empty(), "ordinal_sum: needs at least one block");
    const int n = sorted.front().component.dimension();
    require(n <= 8, "ordinal_sum: components above dimension 8 are unsupported");
    std::vector<DependenceFunction> components;
    std::vector<std::array<double, 2>> edges;
    components.reserve(sorted.size());
    for (auto& b : sorted) {
        require(b.component.dimension() == n, "ordinal_sum: component dimensions differ");
        edges.push_back({b.lo, b.hi});
        components.push_back(std::move(b.component));
    }
    const ClassTag tag = combine_tags(components);
    auto shared = std::make_shared<std::vector<DependenceFunction>>(std::move(components));
    auto eval = [shared, edges, n](std::span<const double> u) {
        double least = u[0];
        for (double c : u.subspan(1)) least = std::min(least, c);
        // Last block whose lower edge lies strictly below min{u}.
        auto it = std::upper_bound(edges.begin(), edges.end(), least,
                                   [](double x, const std::array<double, 2>& e) { return x < e[0]; });
        if (it != edges.begin()) {
            const auto& e = *(it - 1);
            if (least > e[0] && least < e[1]) {
                const double width = e[1] - e[0];
                double rescaled[8];
                for (int k = 0; k < n; ++k)
                    rescaled[k] = (std::min(u[static_cast<std::size_t>(k)], e[1]) - e[0]) / width;
                const std::size_t block = static_cast<std::size_t>((it - 1) - edges.begin());
                return e[0] + width * (*shared)[block](std::span<const double>(rescaled,
                                                                               static_cast<std::size_t>(n)));
            }
        }
        return least;
    };
    return DependenceFunction(n, eval, tag,
                              "ordinal_sum[" + std::to_string(edges.size()) + " blocks]");
}

DependenceFunction w_ordinal_sum(std::vector<OrdinalBlock> blocks) {
    auto sorted = sorted_blocks(std::move(blocks), "w_ordinal_sum");
    std::vector<DependenceFunction> components;
    std::vector<std::array<double, 2>> edges;
    for (auto& b : sorted) {
        require(b.component.dimension() == 2, "w_ordinal_sum: components must be 2-dimensional");
        edges.push_back({b.lo, b.hi});
        components.push_back(std::move(b.component));
    }
    const ClassTag tag = components.empty() ? ClassTag::copula : combine_tags(components);
    auto shared = std::make_shared<std::vector<DependenceFunction>>(std::move(components));
    auto eval = [shared, edges](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const double a = edges[k][0], b = edges[k][1];
            if (u >= a && u <= b && v >= 1.0 - b && v <= 1.0 - a) {
                const double width = b - a;
                const double su = std::clamp((u - a) / width, 0.0, 1.0);
                const double sv = std::clamp((v + b - 1.0) / width, 0.0, 1.0);
                return width * (*shared)[k](su, sv);
            }
        }
        return w_lower(u, v);
    };
    return DependenceFunction(2, eval, tag,
                              "w_ordinal_sum[" + std::to_string(edges.size()) + " blocks]");
}

DependenceFunction mix(double lambda, const DependenceFunction& f, const DependenceFunction& g) {
    require(lambda >= 0.0 && lambda <= 1.0, "mix: lambda must lie in [0,1]");
    require(f.dimension() == g.dimension(), "mix: dimensions differ");
    std::vector<DependenceFunction> pair{f, g};
    const ClassTag tag = combine_tags(pair);
    DependenceFunction fc = f, gc = g;
    auto eval = [lambda, fc, gc](std::span<const double> u) {
        return lambda * fc(u) + (1.0 - lambda) * gc(u);
    };
    DependenceFunction out(f.dimension(), eval, tag,
                           "mix(" + fmt(lambda) + "," + f.name() + "," + g.name() + ")");
    if (f.dimension() == 2 && f.exact_kernel() && g.exact_kernel()) {
        auto kf = *f.exact_kernel(), kg = *g.exact_kernel();
        out.set_kernel(
            [lambda, kf, kg](double u, double v) { return lambda * kf(u, v) + (1.0 - lambda) * kg(u, v); });
    }
    if (f.dimension() == 2 && f.exact_density() && g.exact_density()) {
        auto df = *f.exact_density(), dg = *g.exact_density();
        out.set_density(
            [lambda, df, dg](double u, double v) { return lambda * df(u, v) + (1.0 - lambda) * dg(u, v); });
    }
    return out;
}

DependenceFunction convex_mixture(std::vector<DependenceFunction> members,
                                  std::vector<double> weights) {
    require(!members.empty() && members.size() == weights.size(),
            "convex_mixture: one weight per member required");
    const int n = members.front().dimension();
    double total = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        require(members[k].dimension() == n, "convex_mixture: dimensions differ");
        require(weights[k] >= 0.0, "convex_mixture: negative weight");
        total += weights[k];
    }
    require(total > 0.0, "convex_mixture: weights sum to zero");
    for (double& w : weights) w /= total;
    const ClassTag tag = combine_tags(members);
    auto shared = std::make_shared<std::vector<DependenceFunction>>(std::move(members));
    auto eval = [shared, weights](std::span<const double> u) {
        double s = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * (*shared)[k](u);
        return s;
    };
    return DependenceFunction(n, eval, tag,
                              "mixture[" + std::to_string(weights.size()) + "]");
}

// ============================================================================
// Asymmetric shuffles
// ============================================================================

DependenceFunction c_theta(double theta) {
    require(theta >= 2.0 / 3.0 && theta <= 3.0 / 4.0,
            "c_theta: theta must lie in [2/3, 3/4], got " + fmt(theta));
    auto eval = [theta](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        if (u <= 1.0 - theta && v >= theta) return std::min(u, v - theta);
        if (u >= 1.0 - theta && v <= theta) return std::min(u + theta - 1.0, v);
        return w_lower(u, v);
    };
    return DependenceFunction(2, eval, ClassTag::copula, "c_theta(" + fmt(theta) + ")");
}

DependenceFunction phi_max_asym(const DependenceFunction& base) {
    require(base.dimension() == 2, "phi_max_asym: base must be 2-dimensional");
    DependenceFunction c = base;
    auto eval = [c](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        // Mass 2/3 uniform on the segment v = u - 1/3 ...
        const double segment = std::max(0.0, std::min({u - 1.0 / 3.0, v, 2.0 / 3.0}));
        // ... plus a 1/3-mass affine copy of the base in [0,1/3] x [2/3,1].
        const double x = std::min(3.0 * u, 1.0);
        const double y = std::clamp(3.0 * v - 2.0, 0.0, 1.0);
        return segment + c(x, y) / 3.0;
    };
    return DependenceFunction(2, eval, ClassTag::copula, "phi(" + base.name() + ")");
}

// ============================================================================
// Lipschitz-class families
// ============================================================================

DependenceFunction c_lip(double c) {
    require(c >= 0.0 && c <= 1.0, "c_lip: c must lie in [0,1], got " + fmt(c));
    auto eval = [c](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        return std::min({u, v, std::max((u + v - c) / (2.0 - c), 0.0)});
    };
    return DependenceFunction(2, eval, ClassTag::copula, "c_lip(" + fmt(c) + ")");
}

DependenceFunction d_lip(double a) {
    require(a >= 0.5 && a <= 1.0, "d_lip: a must lie in [1/2,1], got " + fmt(a));
    auto eval = [a](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        if (u + v <= 1.0) return std::min({u, v, (1.0 - a) * (u + v)});
        return std::min({u, v, a * (u + v) + 1.0 - 2.0 * a});
    };
    return DependenceFunction(2, eval, ClassTag::copula, "d_lip(" + fmt(a) + ")");
}

DependenceFunction c_lambda(double lambda, double c, double a) {
    require(lambda >= 0.0 && lambda <= 1.0, "c_lambda: lambda must lie in [0,1], got " + fmt(lambda));
    return mix(lambda, c_lip(c), d_lip(a));
}

AlmostDisjointIndex::AlmostDisjointIndex(double alpha) : alpha_(alpha), digits_(0) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("almost_disjoint: alpha must lie in [0,1]");
    if (alpha == 1.0) {
        digits_ = (~0ULL) >> 2;  // 0.111... = 1; the terminating form would collide with 0
        return;
    }
    // Standard binary expansion; dyadic rationals terminate.
    double x = alpha;
    for (int i = 0; i < 62; ++i) {
        x *= 2.0;
        const int digit = x >= 1.0 ? 1 : 0;
        x -= digit;
        if (digit) digits_ |= 1ULL << (61 - i);
    }
}

bool AlmostDisjointIndex::contains(std::uint64_t n) const {
    if (n < 2) return false;
    const int len = std::bit_width(n) - 1;  // digits after the leading 1
    if (len > 62) return false;
    for (int j = 0; j < len; ++j) {
        const std::uint64_t n_bit = (n >> (len - 1 - j)) & 1ULL;
        const std::uint64_t digit = (digits_ >> (61 - j)) & 1ULL;
        if (n_bit != digit) return false;
    }
    return true;
}

std::vector<std::uint64_t> AlmostDisjointIndex::elements_up_to(std::uint64_t limit) const {
    std::vector<std::uint64_t> out;
    for (int k = 1; k <= 62; ++k) {
        const std::uint64_t prefix = digits_ >> (62 - k);
        const std::uint64_t encoded = (1ULL << k) | prefix;
        if (encoded > limit) break;
        out.push_back(encoded);
    }
    return out;
}

DependenceFunction a_alpha(const AlmostDisjointIndex& index, double c, double a, int depth) {
    require(depth >= 1, "a_alpha: depth must be at least 1");
    const DependenceFunction upper = c_lip(c);
    const DependenceFunction lower = d_lip(a);
    std::vector<OrdinalBlock> blocks;
    blocks.reserve(static_cast<std::size_t>(depth));
    for (int n = depth; n >= 1; --n) {
        const bool member = index.contains(static_cast<std::uint64_t>(n));
        blocks.push_back({1.0 / (n + 1), 1.0 / n, member ? upper : lower});
    }
    DependenceFunction sum = ordinal_sum(std::move(blocks));
    auto eval = [sum](std::span<const double> uv) { return sum(uv); };
    return DependenceFunction(2, eval, ClassTag::copula,
                              "a_alpha(" + fmt(index.alpha()) + ",c=" + fmt(c) + ",a=" + fmt(a) +
                                  ",depth=" + std::to_string(depth) + ")");
}

// ============================================================================
// Mass-redistribution transformations
// ============================================================================

TransformationMatrix::TransformationMatrix(std::vector<std::vector<double>> rows) {
    require(!rows.empty() && !rows.front().empty(), "TransformationMatrix: empty matrix");
    const std::size_t columns = rows.front().size();
    double total = 0.0;
    for (const auto& row : rows) {
        require(row.size() == columns, "TransformationMatrix: ragged rows");
        for (double e : row) {
            require(e >= 0.0, "TransformationMatrix: negative entry");
            total += e;
        }
    }
    require(std::abs(total - 1.0) <= 1e-12, "TransformationMatrix: entries must sum to 1");
    // Input rows read top-to-bottom as written; store bottom-to-top so that
    // row index 0 is the bottom strip of the unit square.
    entries_.assign(rows.rbegin(), rows.rend());

    row_edges_.assign(entries_.size() + 1, 0.0);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        double sum = 0.0;
        for (double e : entries_[i]) sum += e;
        require(sum > 0.0, "TransformationMatrix: zero row");
        row_edges_[i + 1] = row_edges_[i] + sum;
    }
    column_edges_.assign(columns + 1, 0.0);
    for (std::size_t j = 0; j < columns; ++j) {
        double sum = 0.0;
        for (const auto& row : entries_) sum += row[j];
        require(sum > 0.0, "TransformationMatrix: zero column");
        column_edges_[j + 1] = column_edges_[j] + sum;
    }
    row_edges_.back() = 1.0;
    column_edges_.back() = 1.0;
}

double TransformationMatrix::entry(int row, int column) const {
    return entries_[static_cast<std::size_t>(row)][static_cast<std::size_t>(column)];
}

TransformationMatrix corner_matrix(double r) {
    require(r > 0.0 && r < 0.5, "corner_matrix: r must lie in (0, 1/2), got " + fmt(r));
    const double h = r / 2.0;
    return TransformationMatrix({{h, 0.0, h}, {0.0, 1.0 - 2.0 * r, 0.0}, {h, 0.0, h}});
}

TransformationMatrix corner_matrix(double r, double a) {
    require(r > 0.0 && r < 0.5, "corner_matrix: r must lie in (0, 1/2), got " + fmt(r));
    require(a > 0.0 && a < r, "corner_matrix: a must lie in (0, r), got " + fmt(a));
    return TransformationMatrix(
        {{r - a, 0.0, a}, {0.0, 1.0 - 2.0 * r, 0.0}, {a, 0.0, r - a}});
}

DependenceFunction apply_transformation(const TransformationMatrix& t,
                                        const DependenceFunction& base) {
    require(base.dimension() == 2, "apply_transformation: base must be 2-dimensional");
    const int rows = t.row_count(), cols = t.column_count();
    std::vector<double> entries(static_cast<std::size_t>(rows * cols));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            entries[static_cast<std::size_t>(i * cols + j)] = t.entry(i, j);
    const std::vector<double> p = t.column_edges(), q = t.row_edges();
    DependenceFunction c = base;
    auto eval = [entries, p, q, rows, cols, c](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        double value = 0.0;
        for (int i = 0; i < rows; ++i) {
            const double sv =
                std::clamp((v - q[static_cast<std::size_t>(i)]) /
                               (q[static_cast<std::size_t>(i + 1)] - q[static_cast<std::size_t>(i)]),
                           0.0, 1.0);
            if (sv == 0.0) continue;
            for (int j = 0; j < cols; ++j) {
                const double weight = entries[static_cast<std::size_t>(i * cols + j)];
                if (weight == 0.0) continue;
                const double su =
                    std::clamp((u - p[static_cast<std::size_t>(j)]) /
                                   (p[static_cast<std::size_t>(j + 1)] - p[static_cast<std::size_t>(j)]),
                               0.0, 1.0);
                if (su == 0.0) continue;
                value += weight * c(su, sv);
            }
        }
        return value;
    };
    const ClassTag tag =
        base.class_tag() == ClassTag::copula ? ClassTag::copula : ClassTag::unverified;
    return DependenceFunction(2, eval, tag, "transform(" + base.name() + ")");
}

namespace {

/// Prefix sums that let one transformation application cost a single
/// recursive evaluation: T(C)(x,y) = full + su*col_strip + sv*row_strip
/// + t_IJ * C(su, sv) inside the located block.
struct TransformTables {
    int rows = 0, cols = 0;
    std::vector<double> entry;      // rows*cols
    std::vector<double> full;       // (rows+1)*(cols+1): sums below-left
    std::vector<double> col_strip;  // same extents: sum_{i<I} t[i][J]
    std::vector<double> row_strip;  // sum_{j<J} t[I][j]
    std::vector<double> p, q;       // strip edges

    explicit TransformTables(const TransformationMatrix& t)
        : rows(t.row_count()), cols(t.column_count()), p(t.column_edges()), q(t.row_edges()) {
        entry.assign(static_cast<std::size_t>(rows * cols), 0.0);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) entry[idx(i, j, cols)] = t.entry(i, j);
        full.assign(static_cast<std::size_t>((rows + 1) * (cols + 1)), 0.0);
        col_strip.assign(full.size(), 0.0);
        row_strip.assign(full.size(), 0.0);
        for (int i = 0; i <= rows; ++i)
            for (int j = 0; j <= cols; ++j) {
                double f = 0.0;
                for (int a = 0; a < i; ++a)
                    for (int b = 0; b < j; ++b) f += entry[idx(a, b, cols)];
                full[idx(i, j, cols + 1)] = f;
                double cstrip = 0.0;
                if (j < cols)
                    for (int a = 0; a < i; ++a) cstrip += entry[idx(a, j, cols)];
                col_strip[idx(i, j, cols + 1)] = cstrip;
                double rstrip = 0.0;
                if (i < rows)
                    for (int b = 0; b < j; ++b) rstrip += entry[idx(i, b, cols)];
                row_strip[idx(i, j, cols + 1)] = rstrip;
            }
    }

    static std::size_t idx(int i, int j, int width) {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(j);
    }

    static int locate(const std::vector<double>& edges, double x) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        const int raw = static_cast<int>(it - edges.begin()) - 1;
        return std::clamp(raw, 0, static_cast<int>(edges.size()) - 2);
    }

    /// T^depth(Pi^2)(x, y), evaluated by descending through the blocks.
    double iterate_product_seed(int depth, double x, double y) const {
        double acc = 0.0, mult = 1.0;
        for (int d = 0; d < depth; ++d) {
            const int j = locate(p, x);
            const int i = locate(q, y);
            const double su = (x - p[static_cast<std::size_t>(j)]) /
                              (p[static_cast<std::size_t>(j + 1)] - p[static_cast<std::size_t>(j)]);
            const double sv = (y - q[static_cast<std::size_t>(i)]) /
                              (q[static_cast<std::size_t>(i + 1)] - q[static_cast<std::size_t>(i)]);
            acc += mult * (full[idx(i, j, cols + 1)] + su * col_strip[idx(i, j, cols + 1)] +
                           sv * row_strip[idx(i, j, cols + 1)]);
            mult *= entry[idx(i, j, cols)];
            if (mult == 0.0) return acc;
            x = su;
            y = sv;
        }
        return acc + mult * x * y;
    }

    /// One application on a stored grid; reads the previous iterate through
    /// bilinear interpolation.
    double apply_grid(const std::vector<double>& grid, int m, double x, double y) const {
        const int j = locate(p, x);
        const int i = locate(q, y);
        const double su = (x - p[static_cast<std::size_t>(j)]) /
                          (p[static_cast<std::size_t>(j + 1)] - p[static_cast<std::size_t>(j)]);
        const double sv = (y - q[static_cast<std::size_t>(i)]) /
                          (q[static_cast<std::size_t>(i + 1)] - q[static_cast<std::size_t>(i)]);
        double value = full[idx(i, j, cols + 1)] + su * col_strip[idx(i, j, cols + 1)] +
                       sv * row_strip[idx(i, j, cols + 1)];
        const double weight = entry[idx(i, j, cols)];
        if (weight != 0.0) value += weight * bilinear(grid, m, su, sv);
        return value;
    }

    static double bilinear(const std::vector<double>& grid, int m, double x, double y) {
        const int side = m + 1;
        const int i = std::min(static_cast<int>(x * m), m - 1);
        const int j = std::min(static_cast<int>(y * m), m - 1);
        const double fu = x * m - i, fv = y * m - j;
        const double g00 = grid[static_cast<std::size_t>(i * side + j)];
        const double g01 = grid[static_cast<std::size_t>(i * side + j + 1)];
        const double g10 = grid[static_cast<std::size_t>((i + 1) * side + j)];
        const double g11 = grid[static_cast<std::size_t>((i + 1) * side + j + 1)];
        return (1.0 - fu) * ((1.0 - fv) * g00 + fv * g01) + fu * ((1.0 - fv) * g10 + fv * g11);
    }
};

constexpr int kExactDepthCap = 12;
constexpr int kMemoResolution = 1024;  // 1025^2 nodes
constexpr int kProbeResolution = 256;  // 257^2 probe lattice

double probe_max_change(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

}  // namespace

InvariantCopulaResult invariant_copula(const TransformationMatrix& t, double tol,
                                       int max_iterations) {
    require(tol > 0.0, "invariant_copula: tolerance must be positive");
    require(max_iterations >= 1, "invariant_copula: max_iterations must be at least 1");
    auto tables = std::make_shared<TransformTables>(t);

    const int probe_side = kProbeResolution + 1;
    auto probe_exact = [&](int depth) {
        std::vector<double> values(static_cast<std::size_t>(probe_side * probe_side));
        parallel_over_rows(static_cast<std::size_t>(probe_side), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const double x = static_cast<double>(i) / kProbeResolution;
                for (int j = 0; j < probe_side; ++j)
                    values[i * static_cast<std::size_t>(probe_side) + static_cast<std::size_t>(j)] =
                        tables->iterate_product_seed(depth, x, static_cast<double>(j) / kProbeResolution);
            }
        });
        return values;
    };

    // Phase 1: exact evaluator composition.
    std::vector<double> previous = probe_exact(0);
    for (int depth = 1; depth <= kExactDepthCap && depth <= max_iterations; ++depth) {
        std::vector<double> current = probe_exact(depth);
        const double change = probe_max_change(current, previous);
        if (change < tol) {
            const double residual = probe_max_change(probe_exact(depth + 1), current);
            auto eval = [tables, depth](std::span<const double> uv) {
                return tables->iterate_product_seed(depth, uv[0], uv[1]);
            };
            return {DependenceFunction(2, eval, ClassTag::copula, "invariant"), residual, depth,
                    true};
        }
        previous = std::move(current);
    }
    if (max_iterations <= kExactDepthCap) {
        // Iteration budget exhausted before the memoized phase.
        const double residual =
            probe_max_change(probe_exact(max_iterations + 1), probe_exact(max_iterations));
        const int depth = max_iterations;
        auto eval = [tables, depth](std::span<const double> uv) {
            return tables->iterate_product_seed(depth, uv[0], uv[1]);
        };
        return {DependenceFunction(2, eval, ClassTag::copula, "invariant"), residual, depth, false};
    }

    // Phase 2: memoize the depth-12 iterate and keep applying on the grid.
    const int m = kMemoResolution;
    const int side = m + 1;
    std::vector<double> grid(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
    parallel_over_rows(static_cast<std::size_t>(side), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double x = static_cast<double>(i) / m;
            for (int j = 0; j < side; ++j)
                grid[i * static_cast<std::size_t>(side) + static_cast<std::size_t>(j)] =
                    tables->iterate_product_seed(kExactDepthCap, x, static_cast<double>(j) / m);
        }
    });

    const int probe_stride = m / kProbeResolution;
    auto probe_of_grid = [&](const std::vector<double>& g) {
        std::vector<double> values(static_cast<std::size_t>(probe_side * probe_side));
        for (int i = 0; i < probe_side; ++i)
            for (int j = 0; j < probe_side; ++j)
                values[static_cast<std::size_t>(i * probe_side + j)] =
                    g[static_cast<std::size_t>((i * probe_stride) * side + j * probe_stride)];
        return values;
    };

    int iterations = std::min(kExactDepthCap, max_iterations);
    bool converged = false;
    std::vector<double> next(grid.size());
    while (iterations < max_iterations) {
        parallel_over_rows(static_cast<std::size_t>(side), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const double x = static_cast<double>(i) / m;
                for (int j = 0; j < side; ++j)
                    next[i * static_cast<std::size_t>(side) + static_cast<std::size_t>(j)] =
                        tables->apply_grid(grid, m, x, static_cast<double>(j) / m);
            }
        });
        ++iterations;
        const double change = probe_max_change(probe_of_grid(next), probe_of_grid(grid));
        grid.swap(next);
        if (change < tol) {
            converged = true;
            break;
        }
    }

    // Attach the honest residual sup |C - T(C)| on the probe lattice.
    std::vector<double> applied(grid.size());
    parallel_over_rows(static_cast<std::size_t>(side), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double x = static_cast<double>(i) / m;
            for (int j = 0; j < side; ++j)
                applied[i * static_cast<std::size_t>(side) + static_cast<std::size_t>(j)] =
                    tables->apply_grid(grid, m, x, static_cast<double>(j) / m);
        }
    });
    const double residual = probe_max_change(probe_of_grid(applied), probe_of_grid(grid));

    DependenceFunction interpolant =
        grid_interpolant(GridFunction(2, m, std::move(grid)), ClassTag::copula, "invariant");
    return {std::move(interpolant), residual, iterations, converged};
}

// ============================================================================
// Interval shuffles
// ============================================================================

SStructure::SStructure(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    require(!blocks_.empty(), "SStructure: needs at least one block");
    for (int axis = 0; axis < 2; ++axis) {
        std::vector<std::array<double, 2>> intervals;
        intervals.reserve(blocks_.size());
        double total = 0.0;
        for (const auto& b : blocks_) {
            const auto& iv = axis == 0 ? b.first : b.second;
            require(iv[0] >= 0.0 && iv[1] <= 1.0 && iv[0] < iv[1], "SStructure: invalid interval");
            intervals.push_back(iv);
            total += iv[1] - iv[0];
        }
        require(std::abs(total - 1.0) <= 1e-9, "SStructure: coordinate lengths must sum to 1");
        std::sort(intervals.begin(), intervals.end());
        for (std::size_t k = 1; k < intervals.size(); ++k)
            require(intervals[k - 1][1] <= intervals[k][0] + 1e-15,
                    "SStructure: intervals overlap");
    }
    for (const auto& b : blocks_)
        require(std::abs((b.first[1] - b.first[0]) - (b.second[1] - b.second[0])) <= 1e-12,
                "SStructure: block side lengths differ");
}

DependenceFunction s_copula(const SStructure& structure, const DependenceFunction& base) {
    require(base.dimension() == 2, "s_copula: base must be 2-dimensional");
    const std::vector<SStructure::Block> blocks = structure.blocks();
    DependenceFunction c = base;
    auto eval = [blocks, c](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        double value = 0.0;
        for (const auto& b : blocks) {
            const double len = b.first[1] - b.first[0];
            const double su = std::clamp((u - b.first[0]) / len, 0.0, 1.0);
            if (su == 0.0) continue;
            const double sv = std::clamp((v - b.second[0]) / len, 0.0, 1.0);
            if (sv == 0.0) continue;
            if (su == 1.0 && sv == 1.0) {
                value += len;  // block fully covered
            } else {
                value += len * c(su, sv);
            }
        }
        return value;
    };
    const ClassTag tag =
        base.class_tag() == ClassTag::copula ? ClassTag::copula : ClassTag::unverified;
    return DependenceFunction(2, eval, tag, "s_copula(" + base.name() + ")");
}

SStructure interleaved_structure(int blocks_per_axis) {
    require(blocks_per_axis >= 2, "interleaved_structure: N must be at least 2");
    const int N = blocks_per_axis;
    const double cells = static_cast<double>(N) * static_cast<double>(N);
    std::vector<SStructure::Block> blocks;
    blocks.reserve(static_cast<std::size_t>(N * N));
    for (int n = 1; n <= N * N; ++n) {
        const int j = (n - 1) / N + 1;
        const int k = (n - 1) % N + 1;
        const int slot = N * (k - 1) + j;  // base-N digit swap of n
        blocks.push_back({{(n - 1) / cells, n / cells}, {(slot - 1) / cells, slot / cells}});
    }
    return SStructure(std::move(blocks));
}

SStructure diagonal_structure(int blocks_per_axis) {
    require(blocks_per_axis >= 2, "diagonal_structure: N must be at least 2");
    const int N = blocks_per_axis;
    const double cells = static_cast<double>(N) * static_cast<double>(N);
    std::vector<SStructure::Block> blocks;
    blocks.reserve(static_cast<std::size_t>(N * N));
    for (int n = 1; n <= N * N; ++n)
        blocks.push_back({{(n - 1) / cells, n / cells}, {(n - 1) / cells, n / cells}});
    return SStructure(std::move(blocks));
}

DependenceFunction theta_shuffle(const DependenceFunction& base, int blocks_per_axis) {
    DependenceFunction out = s_copula(interleaved_structure(blocks_per_axis), base);
    return DependenceFunction(2, [out](std::span<const double> uv) { return out(uv); },
                              out.class_tag(),
                              "theta_shuffle(" + base.name() + "," + std::to_string(blocks_per_axis) + ")");
}

DependenceFunction psi_diagonal(const DependenceFunction& base, int blocks_per_axis) {
    DependenceFunction out = s_copula(diagonal_structure(blocks_per_axis), base);
    return DependenceFunction(2, [out](std::span<const double> uv) { return out(uv); },
                              out.class_tag(),
                              "psi_diagonal(" + base.name() + "," + std::to_string(blocks_per_axis) + ")");
}

// ============================================================================
// Proper quasi-copula constructions
// ============================================================================

DependenceFunction q_c_quasi(const DependenceFunction& base) {
    require(base.dimension() == 2, "q_c_quasi: base must be 2-dimensional");
    DependenceFunction c = base;
    auto eval = [c](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        constexpr double third = 1.0 / 3.0;
        constexpr double two_thirds = 2.0 / 3.0;
        if (u >= third && u <= two_thirds && v >= third && v <= two_thirds)
            return u + v - c(3.0 * u - 1.0, 3.0 * v - 1.0) / 3.0 - two_thirds;
        if (std::abs(u - v) < third)
            return std::max({0.0, u - third, v - third, u + v - 1.0});
        return std::min(u, v);
    };
    return DependenceFunction(2, eval, ClassTag::proper_quasi_copula, "q_c(" + base.name() + ")");
}

DependenceFunction lift_to_n(const DependenceFunction& q2, int n) {
    require(q2.dimension() == 2, "lift_to_n: argument must be 2-dimensional");
    require(n >= 3, "lift_to_n: n must be at least 3");
    DependenceFunction q = q2;
    auto eval = [q](std::span<const double> u) {
        double value = q(u[0], u[1]);
        for (double c : u.subspan(2)) value *= c;
        return value;
    };
    return DependenceFunction(n, eval, ClassTag::proper_quasi_copula,
                              "lift(" + q2.name() + "," + std::to_string(n) + ")");
}

CheckReport validate_diagonal(const Diagonal& d, int probe_points, double tol) {
    require(probe_points >= 3, "validate_diagonal: need at least 3 probe points");
    CheckReport report;
    report.resolution = probe_points;
    report.tolerance = tol;
    report.checked_property = "diagonal-axioms";
    double worst = std::abs(d.delta(1.0) - 1.0);
    double worst_t = 1.0;
    double prev = d.delta(0.0);
    const double step = 1.0 / (probe_points - 1);
    for (int i = 0; i < probe_points; ++i) {
        const double t = static_cast<double>(i) / (probe_points - 1);
        const double value = d.delta(t);
        double violation = std::max(value - t, -value);  // 0 <= delta(t) <= t
        if (i > 0) {
            violation = std::max(violation, prev - value);              // increasing
            violation = std::max(violation, std::abs(value - prev) - 2.0 * step);  // 2-Lipschitz
        }
        if (violation > worst) {
            worst = violation;
            worst_t = t;
        }
        prev = value;
    }
    report.worst_violation = worst;
    report.passed = worst <= tol;
    report.witness = UnitPoint(worst_t, worst_t);
    return report;
}

DependenceFunction diagonal_copula(const Diagonal& d) {
    const CheckReport axioms = validate_diagonal(d);
    if (!axioms.passed)
        throw std::invalid_argument("diagonal_copula: diagonal axioms violated (worst " +
                                    fmt(axioms.worst_violation) + ")");
    auto delta = d.delta;
    auto eval = [delta](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        return std::min({u, v, 0.5 * (delta(u) + delta(v))});
    };
    return DependenceFunction(2, eval, ClassTag::copula, "k_delta");
}

Diagonal diagonal_of(const DependenceFunction& q) {
    require(q.dimension() == 2, "diagonal_of: argument must be 2-dimensional");
    DependenceFunction f = q;
    return Diagonal{[f](double t) { return f(t, t); }};
}

DependenceFunction omega_tilde(const DependenceFunction& base, double t0,
                               const DependenceFunction& q) {
    require(base.dimension() == 2, "omega_tilde: base must be 2-dimensional");
    require(q.dimension() == 2, "omega_tilde: q must be 2-dimensional");
    require(t0 > 0.0 && t0 < 1.0, "omega_tilde: t0 must lie in (0,1)");
    DependenceFunction c = base;
    DependenceFunction splice = q;
    auto rect_volume = [c](double x1, double x2, double y1, double y2) {
        return c(x2, y2) - c(x1, y2) - c(x2, y1) + c(x1, y1);
    };
    const double vr = rect_volume(0.0, t0, t0, 1.0);
    if (vr <= 1e-12)
        throw std::invalid_argument(
            "omega_tilde: rectangle volume vanishes (diagonal fixes t0); construction undefined");
    auto eval = [c, splice, rect_volume, vr, t0](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        if (u <= t0 && v >= t0) {
            const double f = std::clamp(rect_volume(0.0, u, t0, 1.0) / vr, 0.0, 1.0);
            const double g = std::clamp(rect_volume(0.0, t0, t0, v) / vr, 0.0, 1.0);
            return vr * splice(f, g) + c(u, t0);
        }
        return c(u, v);
    };
    const ClassTag tag = splice.class_tag() == ClassTag::proper_quasi_copula
                             ? ClassTag::proper_quasi_copula
                             : ClassTag::quasi_copula;
    return DependenceFunction(2, eval, tag,
                              "omega_tilde(" + base.name() + ",t0=" + fmt(t0) + "," + q.name() + ")");
}

// ============================================================================
// Oscillating density family
// ============================================================================

DependenceFunction c_n_oscillating(int n) {
    require(n >= 1, "c_n_oscillating: n must be at least 1");
    constexpr double tau = 2.0 * std::numbers::pi;
    const double nd = static_cast<double>(n);
    const double scale = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi * nd);
    auto eval = [nd, scale](std::span<const double> uv) {
        const double u = uv[0], v = uv[1];
        return u * v + (1.0 - std::cos(tau * u)) * (1.0 - std::cos(tau * nd * v)) * scale;
    };
    const double kernel_scale = 1.0 / (4.0 * std::numbers::pi * nd);
    return DependenceFunction(2, eval, ClassTag::copula, "c_osc(" + std::to_string(n) + ")")
        .with_kernel([nd, kernel_scale](double x, double y) {
            return y + std::sin(tau * x) * (1.0 - std::cos(tau * nd * y)) * kernel_scale;
        })
        .with_density([nd](double u, double v) {
            return 1.0 + 0.5 * std::sin(tau * u) * std::sin(tau * nd * v);
        });
}

}  // namespace copulalab::families
