#include "copulalab/witness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "copulalab/families.hpp"
#include "copulalab/metrics.hpp"
#include "json.hpp"

namespace copulalab::witness {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

// ============================================================================
// Linear independence
// ============================================================================

std::string IndependenceReport::to_json() const {
    nlohmann::json j{{"family_size", family_size},
                     {"sample_count", sample_count},
                     {"numerical_rank", numerical_rank},
                     {"pivot_floor", pivot_floor},
                     {"independent", independent}};
    return j.dump();
}

IndependenceReport independence_rank(const std::vector<DependenceFunction>& family,
                                     std::size_t samples, std::uint64_t seed, double tol) {
    require(family.size() >= 2, "independence_rank: need at least 2 family members");
    require(samples >= family.size(), "independence_rank: need at least as many samples as members");
    const int n = family.front().dimension();
    for (const auto& f : family)
        require(f.dimension() == n, "independence_rank: family dimensions differ");

    // Seeded sample points, one coordinate stream shared by all members.
    Lcg64 rng(seed);
    std::vector<std::vector<double>> points(samples, std::vector<double>(static_cast<std::size_t>(n)));
    for (auto& p : points)
        for (double& c : p) c = rng.next_unit();

    const std::size_t k = family.size();
    std::vector<double> matrix(k * samples);
    for (std::size_t row = 0; row < k; ++row)
        for (std::size_t col = 0; col < samples; ++col)
            matrix[row * samples + col] = family[row](points[col]);

    // Elimination with full pivot search; pivots below tol * |first pivot|
    // count as zero.
    std::size_t rank = 0;
    double first_pivot = 0.0;
    double pivot_floor = 0.0;
    std::vector<std::size_t> rows(k);
    for (std::size_t i = 0; i < k; ++i) rows[i] = i;

    for (std::size_t step = 0; step < k; ++step) {
        double best = 0.0;
        std::size_t best_row = step, best_col = 0;
        for (std::size_t r = step; r < k; ++r)
            for (std::size_t c = 0; c < samples; ++c) {
                const double a = std::abs(matrix[rows[r] * samples + c]);
                if (a > best) {
                    best = a;
                    best_row = r;
                    best_col = c;
                }
            }
        if (step == 0) first_pivot = best;
        if (best <= tol * first_pivot || best == 0.0) break;
        pivot_floor = best;
        ++rank;
        std::swap(rows[step], rows[best_row]);
        const double* pivot_row = &matrix[rows[step] * samples];
        const double pivot = pivot_row[best_col];
        for (std::size_t r = step + 1; r < k; ++r) {
            double* target = &matrix[rows[r] * samples];
            const double factor = target[best_col] / pivot;
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < samples; ++c) target[c] -= factor * pivot_row[c];
        }
    }

    IndependenceReport report;
    report.family_size = k;
    report.sample_count = samples;
    report.numerical_rank = rank;
    report.pivot_floor = pivot_floor;
    report.independent = rank == k;
    return report;
}

// ============================================================================
// Support regions
// ============================================================================

namespace {

/// Separating-axis test between a convex polygon and an axis-aligned box.
/// Touching counts as intersecting.
bool polygon_intersects_box(const Polygon& poly, double x0, double x1, double y0, double y1) {
    const auto& v = poly.vertices;
    if (v.empty()) return false;

    // Box axes.
    double px_min = v[0][0], px_max = v[0][0], py_min = v[0][1], py_max = v[0][1];
    for (const auto& p : v) {
        px_min = std::min(px_min, p[0]);
        px_max = std::max(px_max, p[0]);
        py_min = std::min(py_min, p[1]);
        py_max = std::max(py_max, p[1]);
    }
    if (px_max < x0 || px_min > x1 || py_max < y0 || py_min > y1) return false;

    // Polygon edge normals.
    const std::array<std::array<double, 2>, 4> corners{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        const double nx = -(b[1] - a[1]);
        const double ny = b[0] - a[0];
        if (nx == 0.0 && ny == 0.0) continue;
        double poly_min = nx * v[0][0] + ny * v[0][1], poly_max = poly_min;
        for (const auto& p : v) {
            const double d = nx * p[0] + ny * p[1];
            poly_min = std::min(poly_min, d);
            poly_max = std::max(poly_max, d);
        }
        double box_min = nx * corners[0][0] + ny * corners[0][1], box_max = box_min;
        for (const auto& c : corners) {
            const double d = nx * c[0] + ny * c[1];
            box_min = std::min(box_min, d);
            box_max = std::max(box_max, d);
        }
        if (poly_max < box_min || poly_min > box_max) return false;
    }
    return true;
}

/// Clips a convex polygon to the unit square (half-plane by half-plane);
/// the result is convex with vertices inside [0,1]^2.
Polygon clip_to_unit_square(Polygon poly) {
    struct HalfPlane {
        int axis;
        double limit;
        bool keep_below;
    };
    const HalfPlane planes[4] = {{0, 0.0, false}, {0, 1.0, true}, {1, 0.0, false}, {1, 1.0, true}};
    for (const auto& plane : planes) {
        if (poly.vertices.empty()) break;
        auto inside = [&plane](const std::array<double, 2>& p) {
            return plane.keep_below ? p[plane.axis] <= plane.limit : p[plane.axis] >= plane.limit;
        };
        std::vector<std::array<double, 2>> kept;
        const std::size_t count = poly.vertices.size();
        for (std::size_t i = 0; i < count; ++i) {
            const auto& a = poly.vertices[i];
            const auto& b = poly.vertices[(i + 1) % count];
            const bool a_in = inside(a), b_in = inside(b);
            if (a_in) kept.push_back(a);
            if (a_in != b_in) {
                const double t = (plane.limit - a[plane.axis]) / (b[plane.axis] - a[plane.axis]);
                std::array<double, 2> cut = a;
                cut[plane.axis] = plane.limit;
                cut[1 - plane.axis] = a[1 - plane.axis] + t * (b[1 - plane.axis] - a[1 - plane.axis]);
                kept.push_back(cut);
            }
        }
        poly.vertices = std::move(kept);
    }
    return poly;
}

/// Andrew monotone chain over a handful of points.
Polygon convex_hull(std::vector<std::array<double, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return Polygon{pts};
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return Polygon{std::move(hull)};
}

/// Sum of cell volumes filtered by a cell predicate.
double mass_over_cells(const DependenceFunction& f, int m,
                       const std::function<bool(double, double, double, double)>& include) {
    const GridFunction grid = discretize(f, m);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x0 = static_cast<double>(i) / m, x1 = static_cast<double>(i + 1) / m;
        for (int j = 0; j < m; ++j) {
            const double y0 = static_cast<double>(j) / m, y1 = static_cast<double>(j + 1) / m;
            if (!include(x0, x1, y0, y1)) continue;
            total += grid.at(i + 1, j + 1) - grid.at(i, j + 1) - grid.at(i + 1, j) + grid.at(i, j);
        }
    }
    return total;
}

}  // namespace

bool RegionSpec::intersects_cell(double x0, double x1, double y0, double y1) const {
    for (const auto& poly : polygons)
        if (polygon_intersects_box(poly, x0, x1, y0, y1)) return true;
    return false;
}

RegionSpec parse_regions(const std::string& text) {
    RegionSpec region;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Polygon poly;
        std::istringstream words(line);
        std::string token;
        while (words >> token) {
            const auto comma = token.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("parse_regions: expected x,y pairs, got '" + token + "'");
            double x = 0.0, y = 0.0;
            try {
                x = std::stod(token.substr(0, comma));
                y = std::stod(token.substr(comma + 1));
            } catch (const std::exception&) {
                throw std::invalid_argument("parse_regions: malformed coordinate '" + token + "'");
            }
            if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
                throw std::invalid_argument("parse_regions: vertex outside the unit square");
            poly.vertices.push_back({x, y});
        }
        if (poly.vertices.size() < 3)
            throw std::invalid_argument("parse_regions: polygons need at least 3 vertices");
        region.polygons.push_back(std::move(poly));
    }
    return region;
}

RegionSpec segment_tube(std::array<double, 2> a, std::array<double, 2> b, double eps) {
    require(eps > 0.0, "segment_tube: eps must be positive");
    std::vector<std::array<double, 2>> corners;
    for (const auto& p : {a, b})
        for (int sx : {-1, 1})
            for (int sy : {-1, 1}) corners.push_back({p[0] + sx * eps, p[1] + sy * eps});
    Polygon hull = clip_to_unit_square(convex_hull(std::move(corners)));
    if (hull.vertices.size() < 3)
        throw std::invalid_argument("segment_tube: tube degenerates inside the unit square");
    return RegionSpec{{std::move(hull)}};
}

RegionSpec c_theta_support_band() {
    RegionSpec region;
    region.polygons.push_back(
        Polygon{{{0.0, 2.0 / 3.0}, {0.0, 3.0 / 4.0}, {1.0 / 4.0, 1.0}, {1.0 / 3.0, 1.0}}});
    region.polygons.push_back(
        Polygon{{{1.0 / 4.0, 0.0}, {1.0 / 3.0, 0.0}, {1.0, 3.0 / 4.0}, {1.0, 2.0 / 3.0}}});
    return region;
}

RegionSpec c_theta_carrier(double theta, double eps) {
    RegionSpec region;
    auto upper = segment_tube({0.0, theta}, {1.0 - theta, 1.0}, eps);
    auto lower = segment_tube({1.0 - theta, 0.0}, {1.0, theta}, eps);
    region.polygons.push_back(std::move(upper.polygons.front()));
    region.polygons.push_back(std::move(lower.polygons.front()));
    return region;
}

double support_outside_mass(const DependenceFunction& f, const RegionSpec& region,
                            int resolution) {
    require(f.dimension() == 2, "support_outside_mass: defined for n = 2 only");
    require(resolution >= 2, "support_outside_mass: resolution must be at least 2");
    return mass_over_cells(f, resolution, [&region](double x0, double x1, double y0, double y1) {
        return !region.intersects_cell(x0, x1, y0, y1);
    });
}

std::pair<double, double> singularity_witness(const DependenceFunction& f,
                                              const DependenceFunction& g,
                                              const RegionSpec& carrier_f,
                                              const RegionSpec& carrier_g, int resolution) {
    require(f.dimension() == 2 && g.dimension() == 2, "singularity_witness: n = 2 only");
    auto on_region = [resolution](const DependenceFunction& h, const RegionSpec& region) {
        return mass_over_cells(h, resolution,
                               [&region](double x0, double x1, double y0, double y1) {
                                   return region.intersects_cell(x0, x1, y0, y1);
                               });
    };
    return {on_region(f, carrier_g), on_region(g, carrier_f)};
}

// ============================================================================
// Class-stability sweeps
// ============================================================================

CheckReport convex_sweep(const std::vector<DependenceFunction>& family,
                         const std::function<CheckReport(const DependenceFunction&)>& class_check,
                         int trials, std::uint64_t seed) {
    require(!family.empty(), "convex_sweep: family must be non-empty");
    require(trials >= 1, "convex_sweep: trials must be at least 1");
    CheckReport worst;
    bool first = true;
    for (int t = 0; t < trials; ++t) {
        Lcg64 rng(seed + static_cast<std::uint64_t>(t));
        std::vector<double> weights(family.size());
        for (double& w : weights) w = rng.next_unit() + 1e-12;
        CheckReport report = class_check(families::convex_mixture(family, weights));
        if (first || report.worst_violation > worst.worst_violation) {
            worst = std::move(report);
            first = false;
        }
    }
    return worst;
}

double nowhere_dense_escape(const DependenceFunction& f, double eps, int resolution) {
    require(f.dimension() == 2, "nowhere_dense_escape: defined for n = 2 only");
    require(eps >= 0.0 && eps <= 1.0, "nowhere_dense_escape: eps must lie in [0,1]");
    const double base_asym = metrics::asymmetry(f, resolution).value;
    if (std::abs(base_asym - 1.0 / 3.0) > 2.0 / resolution + 1e-9)
        throw std::invalid_argument(
            "nowhere_dense_escape: argument is not certified maximally asymmetric");
    const DependenceFunction mixture =
        families::mix(1.0 - eps, f, families::frechet(families::FrechetKind::Pi, 2));
    return metrics::asymmetry(mixture, resolution).value;
}

LipschitzBoundaryReport lipschitz_class_boundary(const DependenceFunction& f, double p,
                                                 double delta_p, int resolution, double tol) {
    require(delta_p > 0.0, "lipschitz_class_boundary: delta_p must be positive");
    LipschitzBoundaryReport report;
    report.at_p = check_p_lipschitz(f, p, resolution, tol);
    report.above_p = check_p_lipschitz(f, p + delta_p, resolution, tol);
    report.boundary_located = report.at_p.passed && !report.above_p.passed;
    return report;
}

// ============================================================================
// Fractal dimension equation
// ============================================================================

namespace {

double dimension_equation(double r, double s) {
    return 4.0 * std::pow(r, s) + std::pow(1.0 - 2.0 * r, s) - 1.0;
}

}  // namespace

double hausdorff_dimension(double r) {
    require(r > 0.0 && r < 0.5, "hausdorff_dimension: r must lie strictly inside (0, 1/2)");
    double lo = 1.0, hi = 2.0;
    // Decreasing in s: positive at 1 (value 2r), negative at 2 (value 4r(2r-1)).
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (dimension_equation(r, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double r_for_dimension(double s) {
    require(s > 1.0 && s < 2.0, "r_for_dimension: s must lie strictly inside (1, 2)");
    const double r_lo = 1e-9, r_hi = 0.5 - 1e-9;

    // The map r -> s is monotone on the implemented range; verify before
    // inverting rather than assuming.
    double previous = hausdorff_dimension(0.5 * 1.0 / 101.0);
    for (int i = 2; i <= 100; ++i) {
        const double r = 0.5 * static_cast<double>(i) / 101.0;
        const double value = hausdorff_dimension(r);
        if (value <= previous)
            throw std::runtime_error("r_for_dimension: dimension map is not strictly increasing");
        previous = value;
    }

    double lo = r_lo, hi = r_hi;
    if (s <= hausdorff_dimension(lo) || s >= hausdorff_dimension(hi))
        throw std::invalid_argument("r_for_dimension: s outside the invertible range");
    for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (hausdorff_dimension(mid) < s)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace copulalab::witness
