#include "copulalab/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "copulalab/parallel.hpp"
#include "json.hpp"

namespace copulalab {

namespace {

constexpr int kMaxGridDimension = 4;  // (m+1)^n cost cap for lattice sweeps

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Advances a row-major multi-index over {0,...,extent}^n; false on wrap.
bool next_index(std::vector<int>& index, int extent) {
    for (int k = static_cast<int>(index.size()) - 1; k >= 0; --k) {
        if (index[static_cast<std::size_t>(k)] < extent) {
            ++index[static_cast<std::size_t>(k)];
            std::fill(index.begin() + k + 1, index.end(), 0);
            return true;
        }
    }
    return false;
}

nlohmann::json witness_to_json(const std::variant<std::monostate, UnitPoint, NBox>& w) {
    if (std::holds_alternative<UnitPoint>(w)) {
        const auto& p = std::get<UnitPoint>(w);
        return {{"point", std::vector<double>(p.coords().begin(), p.coords().end())}};
    }
    if (std::holds_alternative<NBox>(w)) {
        const auto& b = std::get<NBox>(w);
        return {{"box_lower", std::vector<double>(b.lower().coords().begin(), b.lower().coords().end())},
                {"box_upper", std::vector<double>(b.upper().coords().begin(), b.upper().coords().end())}};
    }
    return nullptr;
}

}  // namespace

// ============================================================================
// Domain types
// ============================================================================

std::string to_string(ClassTag tag) {
    switch (tag) {
        case ClassTag::copula: return "copula";
        case ClassTag::quasi_copula: return "quasi-copula";
        case ClassTag::proper_quasi_copula: return "proper-quasi-copula";
        case ClassTag::unverified: return "unverified";
    }
    return "unverified";
}

UnitPoint::UnitPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    require(coords_.size() >= 2, "UnitPoint: dimension must be at least 2");
    for (double c : coords_)
        require(c >= 0.0 && c <= 1.0, "UnitPoint: coordinate outside [0,1]");
}

NBox::NBox(UnitPoint lower, UnitPoint upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    require(lower_.dimension() == upper_.dimension(), "NBox: corner dimensions differ");
    for (int k = 0; k < lower_.dimension(); ++k)
        require(lower_[k] <= upper_[k], "NBox: lower corner exceeds upper corner");
}

bool NBox::degenerate() const {
    for (int k = 0; k < dimension(); ++k)
        if (lower_[k] == upper_[k]) return true;
    return false;
}

DependenceFunction::DependenceFunction(int dimension, Evaluator evaluator, ClassTag tag,
                                       std::string name)
    : dimension_(dimension), evaluator_(std::move(evaluator)), tag_(tag), name_(std::move(name)) {
    require(dimension_ >= 2, name_ + ": dimension must be at least 2");
    require(static_cast<bool>(evaluator_), name_ + ": evaluator must be callable");
}

double DependenceFunction::operator()(std::span<const double> coords) const {
    if (static_cast<int>(coords.size()) != dimension_)
        throw std::invalid_argument(name_ + ": expected " + std::to_string(dimension_) +
                                    " coordinates, got " + std::to_string(coords.size()));
    return evaluator_(coords);
}

double DependenceFunction::operator()(double u, double v) const {
    const double uv[2] = {u, v};
    return (*this)(std::span<const double>(uv, 2));
}

DependenceFunction&& DependenceFunction::with_kernel(Kernel2D k) && {
    set_kernel(std::move(k));
    return std::move(*this);
}

DependenceFunction&& DependenceFunction::with_density(Density2D d) && {
    set_density(std::move(d));
    return std::move(*this);
}

void DependenceFunction::set_kernel(Kernel2D k) {
    require(dimension_ == 2, name_ + ": exact kernels are 2-dimensional");
    kernel_ = std::move(k);
}

void DependenceFunction::set_density(Density2D d) {
    require(dimension_ == 2, name_ + ": exact densities are 2-dimensional");
    density_ = std::move(d);
}

void DependenceFunction::certify(ClassTag tag, int resolution, double tolerance) {
    tag_ = tag;
    certification_ = Certification{tag, resolution, tolerance};
}

GridFunction::GridFunction(int dimension, int resolution, std::vector<double> values)
    : dimension_(dimension), resolution_(resolution), values_(std::move(values)) {
    require(dimension_ >= 2 && dimension_ <= kMaxGridDimension,
            "GridFunction: dimension must be in [2,4]");
    require(resolution_ >= 2, "GridFunction: resolution must be at least 2");
    std::size_t expected = 1;
    for (int k = 0; k < dimension_; ++k) expected *= static_cast<std::size_t>(resolution_ + 1);
    require(values_.size() == expected, "GridFunction: value count must be (m+1)^n");
    for (double& v : values_) v = std::clamp(v, 0.0, 1.0);  // ingest clamp, eps_store = 0
}

std::size_t GridFunction::flat_index(std::span<const int> index) const {
    require(static_cast<int>(index.size()) == dimension_, "GridFunction: index dimension mismatch");
    std::size_t flat = 0;
    for (int k = 0; k < dimension_; ++k) {
        int i = index[static_cast<std::size_t>(k)];
        require(i >= 0 && i <= resolution_, "GridFunction: index out of range");
        flat = flat * static_cast<std::size_t>(resolution_ + 1) + static_cast<std::size_t>(i);
    }
    return flat;
}

double GridFunction::at(std::span<const int> index) const { return values_[flat_index(index)]; }

double GridFunction::at(int i, int j) const {
    const int ij[2] = {i, j};
    return at(std::span<const int>(ij, 2));
}

DensityGrid::DensityGrid(int resolution, std::vector<double> cell_density,
                         std::optional<DependenceFunction::Density2D> exact, double tolerance)
    : resolution_(resolution), cells_(std::move(cell_density)), exact_(std::move(exact)) {
    require(resolution_ >= 2, "DensityGrid: resolution must be at least 2");
    std::size_t m = static_cast<std::size_t>(resolution_);
    require(cells_.size() == m * m, "DensityGrid: cell count must be m*m");
    double mass = 0.0;
    for (double& d : cells_) {
        require(d >= -tolerance, "DensityGrid: negative cell density");
        d = std::max(d, 0.0);
    }
    const double cell_area = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            row += cells_[i * m + j];
            col += cells_[j * m + i];
        }
        require(std::abs(row / static_cast<double>(m) - 1.0) <= tolerance,
                "DensityGrid: first margin is not uniform");
        require(std::abs(col / static_cast<double>(m) - 1.0) <= tolerance,
                "DensityGrid: second margin is not uniform");
        mass += row * cell_area;
    }
    require(std::abs(mass - 1.0) <= tolerance, "DensityGrid: total mass is not 1");
}

double DensityGrid::at(int i, int j) const {
    require(i >= 0 && i < resolution_ && j >= 0 && j < resolution_, "DensityGrid: index out of range");
    return cells_[static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution_) +
                  static_cast<std::size_t>(j)];
}

std::string CheckReport::to_json() const {
    nlohmann::json j{{"passed", passed},
                     {"resolution", resolution},
                     {"tolerance", tolerance},
                     {"worst_violation", worst_violation},
                     {"checked_property", checked_property},
                     {"witness", witness_to_json(witness)}};
    return j.dump();
}

// ============================================================================
// Evaluation and volumes
// ============================================================================

double evaluate(const DependenceFunction& f, const UnitPoint& p) {
    if (p.dimension() != f.dimension())
        throw std::invalid_argument("evaluate: dimension mismatch between function and point");
    return f(p.coords());
}

double box_volume(const DependenceFunction& f, const NBox& box) {
    if (box.dimension() != f.dimension())
        throw std::invalid_argument("box_volume: dimension mismatch between function and box");
    if (box.degenerate()) return 0.0;
    const int n = f.dimension();
    std::vector<double> vertex(static_cast<std::size_t>(n));
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        int lower_count = 0;
        for (int k = 0; k < n; ++k) {
            if (mask & (1u << k)) {
                vertex[static_cast<std::size_t>(k)] = box.upper()[k];
            } else {
                vertex[static_cast<std::size_t>(k)] = box.lower()[k];
                ++lower_count;
            }
        }
        const double sign = (lower_count % 2 == 0) ? 1.0 : -1.0;
        total += sign * f(vertex);
    }
    return total;
}

// ============================================================================
// Grids
// ============================================================================

GridFunction discretize(const DependenceFunction& f, int resolution) {
    require(resolution >= 2, "discretize: resolution must be at least 2");
    require(f.dimension() <= kMaxGridDimension, "discretize: grid operations support n <= 4");
    const int n = f.dimension();
    const int m = resolution;
    const std::size_t nodes_per_slab = [&] {
        std::size_t s = 1;
        for (int k = 1; k < n; ++k) s *= static_cast<std::size_t>(m + 1);
        return s;
    }();
    std::vector<double> values(nodes_per_slab * static_cast<std::size_t>(m + 1));
    parallel_over_rows(static_cast<std::size_t>(m + 1), [&](std::size_t begin, std::size_t end) {
        std::vector<double> coords(static_cast<std::size_t>(n));
        std::vector<int> rest(static_cast<std::size_t>(n - 1), 0);
        for (std::size_t i = begin; i < end; ++i) {
            coords[0] = static_cast<double>(i) / m;
            std::fill(rest.begin(), rest.end(), 0);
            std::size_t offset = i * nodes_per_slab;
            do {
                for (int k = 1; k < n; ++k)
                    coords[static_cast<std::size_t>(k)] =
                        static_cast<double>(rest[static_cast<std::size_t>(k - 1)]) / m;
                values[offset++] = f(coords);
            } while (next_index(rest, m));
        }
    });
    return GridFunction(n, m, std::move(values));
}

void write_grid(const GridFunction& grid, std::ostream& os) {
    os << grid.dimension() << ' ' << grid.resolution() << '\n';
    for (double v : grid.values()) os << format_double(v) << '\n';
}

void write_grid_file(const GridFunction& grid, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_grid_file: cannot open " + path);
    write_grid(grid, os);
    if (!os) throw std::runtime_error("write_grid_file: write failed for " + path);
}

GridFunction read_grid(std::istream& is) {
    int n = 0, m = 0;
    if (!(is >> n >> m)) throw std::runtime_error("read_grid: malformed header");
    if (n < 2 || n > kMaxGridDimension || m < 2)
        throw std::runtime_error("read_grid: header out of range");
    std::size_t count = 1;
    for (int k = 0; k < n; ++k) count *= static_cast<std::size_t>(m + 1);
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i)
        if (!(is >> values[i])) throw std::runtime_error("read_grid: truncated value list");
    return GridFunction(n, m, std::move(values));
}

GridFunction read_grid_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_grid_file: cannot open " + path);
    return read_grid(is);
}

DependenceFunction grid_interpolant(GridFunction grid, ClassTag tag, std::string name) {
    const int n = grid.dimension();
    const int m = grid.resolution();
    auto shared = std::make_shared<GridFunction>(std::move(grid));
    auto eval = [shared, n, m](std::span<const double> x) {
        int base_index[kMaxGridDimension];
        double frac[kMaxGridDimension];
        for (int k = 0; k < n; ++k) {
            double scaled = x[static_cast<std::size_t>(k)] * m;
            int cell = std::min(static_cast<int>(scaled), m - 1);
            double t = scaled - cell;
            if (t > 1.0 - 1e-12 && cell + 1 <= m - 1) {  // snap to the next node
                ++cell;
                t = 0.0;
            }
            base_index[k] = cell;
            frac[k] = std::clamp(t, 0.0, 1.0);
        }
        double value = 0.0;
        int corner[kMaxGridDimension];
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            double weight = 1.0;
            for (int k = 0; k < n; ++k) {
                const bool upper = mask & (1u << k);
                corner[k] = base_index[k] + (upper ? 1 : 0);
                weight *= upper ? frac[k] : (1.0 - frac[k]);
            }
            if (weight != 0.0)
                value += weight * shared->at(std::span<const int>(corner, static_cast<std::size_t>(n)));
        }
        return value;
    };
    return DependenceFunction(n, eval, tag, std::move(name));
}

DensityGrid make_density_grid(const DependenceFunction& f, int resolution, double tolerance) {
    require(f.dimension() == 2, "make_density_grid: density grids are 2-dimensional");
    require(resolution >= 2, "make_density_grid: resolution must be at least 2");
    const int m = resolution;
    std::vector<double> cells(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    if (f.exact_density()) {
        const auto& density = *f.exact_density();
        parallel_over_rows(static_cast<std::size_t>(m), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const double u = (static_cast<double>(i) + 0.5) / m;
                for (int j = 0; j < m; ++j)
                    cells[i * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] =
                        density(u, (j + 0.5) / static_cast<double>(m));
            }
        });
        return DensityGrid(m, std::move(cells), *f.exact_density(), tolerance);
    }
    GridFunction grid = discretize(f, m);
    const double scale = static_cast<double>(m) * static_cast<double>(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double volume = grid.at(i + 1, j + 1) - grid.at(i, j + 1) -
                                  grid.at(i + 1, j) + grid.at(i, j);
            cells[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                  static_cast<std::size_t>(j)] = volume * scale;
        }
    return DensityGrid(m, std::move(cells), std::nullopt, tolerance);
}

// ============================================================================
// Axiom checks
// ============================================================================

namespace {

/// Shared violation tracker; first hit in scan order wins ties.
struct WorstTracker {
    double worst = -std::numeric_limits<double>::infinity();
    std::variant<std::monostate, UnitPoint, NBox> witness;

    void offer_point(double violation, const std::vector<double>& coords) {
        if (violation > worst) {
            worst = violation;
            witness = UnitPoint(coords);
        }
    }
    void offer_box(double violation, const std::vector<double>& lo, const std::vector<double>& hi) {
        if (violation > worst) {
            worst = violation;
            witness = NBox(UnitPoint(lo), UnitPoint(hi));
        }
    }
};

/// Grounded-boundary and uniform-margin residuals at lattice nodes.
void sweep_boundary_and_margins(const DependenceFunction& f, int m, WorstTracker& tracker) {
    const int n = f.dimension();
    std::vector<double> coords(static_cast<std::size_t>(n));
    // Grounded: any coordinate equal to 0 forces the value 0.
    std::vector<int> rest(static_cast<std::size_t>(n - 1), 0);
    for (int axis = 0; axis < n; ++axis) {
        std::fill(rest.begin(), rest.end(), 0);
        do {
            int r = 0;
            for (int k = 0; k < n; ++k)
                coords[static_cast<std::size_t>(k)] =
                    (k == axis) ? 0.0
                                : static_cast<double>(rest[static_cast<std::size_t>(r++)]) / m;
            tracker.offer_point(std::abs(f(coords)), coords);
        } while (next_index(rest, m));
    }
    // Margins: all coordinates 1 except one running coordinate.
    for (int axis = 0; axis < n; ++axis) {
        for (int i = 0; i <= m; ++i) {
            const double u = static_cast<double>(i) / m;
            for (int k = 0; k < n; ++k)
                coords[static_cast<std::size_t>(k)] = (k == axis) ? u : 1.0;
            tracker.offer_point(std::abs(f(coords) - u), coords);
        }
    }
}

/// Fills one lattice slab (first coordinate fixed at i/m).
void fill_slab(const DependenceFunction& f, int m, int slab_i, std::vector<double>& slab) {
    const int n = f.dimension();
    parallel_over_rows(static_cast<std::size_t>(m + 1), [&](std::size_t begin, std::size_t end) {
        std::vector<double> coords(static_cast<std::size_t>(n));
        std::vector<int> rest(static_cast<std::size_t>(n - 1), 0);
        const std::size_t span = slab.size() / static_cast<std::size_t>(m + 1);
        for (std::size_t j = begin; j < end; ++j) {
            coords[0] = static_cast<double>(slab_i) / m;
            rest[0] = static_cast<int>(j);
            std::fill(rest.begin() + 1, rest.end(), 0);
            std::size_t offset = j * span;
            do {
                for (int k = 1; k < n; ++k)
                    coords[static_cast<std::size_t>(k)] =
                        static_cast<double>(rest[static_cast<std::size_t>(k - 1)]) / m;
                slab[offset++] = f(coords);
            } while (next_index(rest, m) && rest[0] == static_cast<int>(j));
        }
    });
}

}  // namespace

CheckReport check_copula_axioms(const DependenceFunction& f, int resolution, double tol) {
    require(resolution >= 2, "check_copula_axioms: resolution must be at least 2");
    require(f.dimension() <= kMaxGridDimension, "check_copula_axioms: grid operations support n <= 4");
    const int n = f.dimension();
    const int m = resolution;

    WorstTracker tracker;
    sweep_boundary_and_margins(f, m, tracker);

    // Cell-volume sweep, streaming two lattice slabs along the first axis.
    std::size_t slab_size = 1;
    for (int k = 1; k < n; ++k) slab_size *= static_cast<std::size_t>(m + 1);
    std::vector<double> lower_slab(slab_size), upper_slab(slab_size);

    const int rest_dims = n - 1;
    std::vector<std::size_t> stride(static_cast<std::size_t>(rest_dims), 1);
    for (int k = rest_dims - 2; k >= 0; --k)
        stride[static_cast<std::size_t>(k)] =
            stride[static_cast<std::size_t>(k + 1)] * static_cast<std::size_t>(m + 1);
    std::vector<std::size_t> corner_offset(1u << rest_dims);
    std::vector<double> corner_sign(1u << rest_dims);
    for (std::uint32_t mask = 0; mask < (1u << rest_dims); ++mask) {
        std::size_t offset = 0;
        for (int k = 0; k < rest_dims; ++k)
            if (mask & (1u << k)) offset += stride[static_cast<std::size_t>(k)];
        corner_offset[mask] = offset;
        const int lower_count = rest_dims - std::popcount(mask);
        corner_sign[mask] = (lower_count % 2 == 0) ? 1.0 : -1.0;
    }

    fill_slab(f, m, 0, lower_slab);
    std::vector<int> cell(static_cast<std::size_t>(rest_dims), 0);
    std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
        fill_slab(f, m, i + 1, upper_slab);
        std::fill(cell.begin(), cell.end(), 0);
        do {
            std::size_t base = 0;
            for (int k = 0; k < rest_dims; ++k)
                base += static_cast<std::size_t>(cell[static_cast<std::size_t>(k)]) *
                        stride[static_cast<std::size_t>(k)];
            double volume = 0.0;
            for (std::uint32_t mask = 0; mask < (1u << rest_dims); ++mask) {
                const std::size_t at = base + corner_offset[mask];
                volume += corner_sign[mask] * (upper_slab[at] - lower_slab[at]);
            }
            if (-volume > tracker.worst) {
                lo[0] = static_cast<double>(i) / m;
                hi[0] = static_cast<double>(i + 1) / m;
                for (int k = 0; k < rest_dims; ++k) {
                    lo[static_cast<std::size_t>(k + 1)] =
                        static_cast<double>(cell[static_cast<std::size_t>(k)]) / m;
                    hi[static_cast<std::size_t>(k + 1)] =
                        static_cast<double>(cell[static_cast<std::size_t>(k)] + 1) / m;
                }
                tracker.offer_box(-volume, lo, hi);
            }
        } while (next_index(cell, m - 1));
        lower_slab.swap(upper_slab);
    }

    CheckReport report;
    report.resolution = m;
    report.tolerance = tol;
    report.worst_violation = tracker.worst;
    report.witness = std::move(tracker.witness);
    report.passed = tracker.worst <= tol;
    report.checked_property = "copula-axioms";
    return report;
}

CheckReport check_quasicopula_axioms(const DependenceFunction& f, int resolution, double tol) {
    require(resolution >= 2, "check_quasicopula_axioms: resolution must be at least 2");
    require(f.dimension() <= kMaxGridDimension,
            "check_quasicopula_axioms: grid operations support n <= 4");
    const int n = f.dimension();
    const int m = resolution;
    const double step = 1.0 / m;

    WorstTracker tracker;
    sweep_boundary_and_margins(f, m, tracker);

    std::size_t slab_size = 1;
    for (int k = 1; k < n; ++k) slab_size *= static_cast<std::size_t>(m + 1);
    std::vector<double> previous(slab_size), current(slab_size);

    const int rest_dims = n - 1;
    std::vector<std::size_t> stride(static_cast<std::size_t>(rest_dims), 1);
    for (int k = rest_dims - 2; k >= 0; --k)
        stride[static_cast<std::size_t>(k)] =
            stride[static_cast<std::size_t>(k + 1)] * static_cast<std::size_t>(m + 1);

    std::vector<int> node(static_cast<std::size_t>(rest_dims), 0);
    std::vector<double> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    auto offer_pair = [&](double delta, int i, int moved_axis) {
        // moved_axis: 0 for the slab axis, k >= 1 for a within-slab axis.
        const double monotony = -delta;
        const double lipschitz = delta - step;
        const double violation = std::max(monotony, lipschitz);
        if (violation <= tracker.worst) return;
        lo[0] = hi[0] = static_cast<double>(i) / m;
        for (int k = 0; k < rest_dims; ++k)
            lo[static_cast<std::size_t>(k + 1)] = hi[static_cast<std::size_t>(k + 1)] =
                static_cast<double>(node[static_cast<std::size_t>(k)]) / m;
        hi[static_cast<std::size_t>(moved_axis)] += step;
        tracker.offer_box(violation, lo, hi);
    };

    for (int i = 0; i <= m; ++i) {
        fill_slab(f, m, i, current);
        std::fill(node.begin(), node.end(), 0);
        do {
            std::size_t base = 0;
            for (int k = 0; k < rest_dims; ++k)
                base += static_cast<std::size_t>(node[static_cast<std::size_t>(k)]) *
                        stride[static_cast<std::size_t>(k)];
            if (i > 0) offer_pair(current[base] - previous[base], i - 1, 0);
            for (int k = 0; k < rest_dims; ++k) {
                if (node[static_cast<std::size_t>(k)] == m) continue;
                const std::size_t next = base + stride[static_cast<std::size_t>(k)];
                offer_pair(current[next] - current[base], i, k + 1);
            }
        } while (next_index(node, m));
        previous.swap(current);
    }

    CheckReport report;
    report.resolution = m;
    report.tolerance = tol;
    report.worst_violation = tracker.worst;
    report.witness = std::move(tracker.witness);
    report.passed = tracker.worst <= tol;
    report.checked_property = "quasi-copula-axioms";
    return report;
}

CheckReport check_p_lipschitz(const DependenceFunction& f, double p, int resolution, double tol,
                              std::size_t sample_pairs, std::uint64_t seed) {
    require(f.dimension() == 2, "check_p_lipschitz: defined for n = 2 only");
    require(p >= 1.0, "check_p_lipschitz: p must be at least 1");
    require(resolution >= 2, "check_p_lipschitz: resolution must be at least 2");
    const int m = resolution;
    if (m > 128 && sample_pairs == 0)
        throw std::invalid_argument(
            "check_p_lipschitz: resolution above 128 requires sampled mode (sample_pairs > 0)");

    GridFunction grid = discretize(f, m);
    const std::size_t side = static_cast<std::size_t>(m + 1);
    const auto& values = grid.values();

    // ||x - y||_p depends only on the absolute index differences; tabulate.
    std::vector<double> step_pow(side);
    for (std::size_t k = 0; k < side; ++k)
        step_pow[k] = std::pow(static_cast<double>(k) / m, p);
    std::vector<double> norm(side * side);
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b)
            norm[a * side + b] = std::pow(step_pow[a] + step_pow[b], 1.0 / p);

    double worst = -std::numeric_limits<double>::infinity();
    std::size_t worst_a = 0, worst_b = 0;
    auto offer = [&](std::size_t a, std::size_t b) {
        const std::size_t i1 = a / side, j1 = a % side, i2 = b / side, j2 = b % side;
        const std::size_t di = i1 > i2 ? i1 - i2 : i2 - i1;
        const std::size_t dj = j1 > j2 ? j1 - j2 : j2 - j1;
        const double excess = std::abs(values[a] - values[b]) - norm[di * side + dj];
        if (excess > worst) {
            worst = excess;
            worst_a = a;
            worst_b = b;
        }
    };

    if (sample_pairs == 0) {
        const std::size_t total = side * side;
        for (std::size_t a = 0; a < total; ++a)
            for (std::size_t b = a + 1; b < total; ++b) offer(a, b);
    } else {
        Lcg64 rng(seed);
        for (std::size_t s = 0; s < sample_pairs; ++s) {
            const std::size_t a = static_cast<std::size_t>(rng.next_u64() % (side * side));
            const std::size_t b = static_cast<std::size_t>(rng.next_u64() % (side * side));
            if (a == b) continue;
            offer(a, b);
        }
    }

    CheckReport report;
    report.resolution = m;
    report.tolerance = tol;
    report.worst_violation = worst;
    report.passed = worst <= tol;
    report.checked_property = "p-lipschitz";
    const double u1 = static_cast<double>(worst_a / side) / m, v1 = static_cast<double>(worst_a % side) / m;
    const double u2 = static_cast<double>(worst_b / side) / m, v2 = static_cast<double>(worst_b % side) / m;
    report.witness = NBox(UnitPoint(std::min(u1, u2), std::min(v1, v2)),
                          UnitPoint(std::max(u1, u2), std::max(v1, v2)));
    return report;
}

}  // namespace copulalab
