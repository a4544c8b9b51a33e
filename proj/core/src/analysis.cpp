#include "fpblock/analysis.hpp"

#include "fpblock/block_solver.hpp"
#include "fpblock/error.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>

namespace fpblock {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double arccosh(double x) {
    x = std::max(x, 1.0 - 1e-15);
    x = std::max(x, 1.0);
    return std::log(x + std::sqrt(x * x - 1.0));
}

void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    const double inv = 1.0 / std::sqrt(s);
    for (double& x : v) x *= inv;
}

void require_same_grid(const DensityField& u, const DensityField& ref) {
    if (!u.grid.matches(ref.grid)) {
        throw DimensionError("error metric on mismatched grids: " + u.grid.describe() + " vs " +
                             ref.grid.describe());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

KernelBasis laplacian_kernel_basis(int n) {
    if (n < 5 || n % 2 == 0) {
        throw PreconditionError("laplacian_kernel_basis needs an odd N >= 5, got " +
                                std::to_string(n));
    }
    const double h = 1.0 / (n - 1);
    const double two_pi = 2.0 * std::numbers::pi;
    KernelBasis basis;
    basis.n = n;

    auto add = [&](BasisLabel label, auto&& value) {
        std::vector<double> v(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = value(i * h, j * h);
        }
        normalize(v);
        basis.vectors.push_back(std::move(v));
        basis.labels.push_back(label);
    };

    for (int p = 1; p <= 8; ++p) {
        const bool sine = p % 2 == 1;
        const int k_max = sine ? (n - 3) / 2 : (n - 1) / 2;
        for (int k = 1; k <= k_max; ++k) {
            const double w = two_pi * k;
            const double c = arccosh(2.0 - std::cos(w * h)) / h;
            auto trig = [sine, w](double s) { return sine ? std::sin(w * s) : std::cos(w * s); };
            // Growing exponentials are rescaled by e^{-c}; normalization absorbs it.
            switch ((p - 1) / 2) {
                case 0:
                    add({'k', k, p}, [&](double x, double y) { return trig(x) * std::exp(c * (y - 1.0)); });
                    break;
                case 1:
                    add({'k', k, p}, [&](double x, double y) { return trig(x) * std::exp(-c * y); });
                    break;
                case 2:
                    add({'k', k, p}, [&](double x, double y) { return trig(y) * std::exp(c * (x - 1.0)); });
                    break;
                default:
                    add({'k', k, p}, [&](double x, double y) { return trig(y) * std::exp(-c * x); });
                    break;
            }
        }
    }
    add({'l', 0, 1}, [](double, double) { return 1.0; });
    add({'l', 0, 2}, [](double x, double) { return x; });
    add({'l', 0, 3}, [](double, double y) { return y; });
    add({'l', 0, 4}, [](double x, double y) { return x * y; });

    // Lexicographic order of labels.
    std::vector<std::size_t> order(basis.labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return basis.labels[a] < basis.labels[b]; });
    KernelBasis sorted;
    sorted.n = n;
    for (auto i : order) {
        sorted.vectors.push_back(std::move(basis.vectors[i]));
        sorted.labels.push_back(basis.labels[i]);
    }
    return sorted;
}

std::vector<double> qr_diagonals(const KernelBasis& basis) {
    if (basis.vectors.empty()) return {};
    const auto rows = static_cast<Eigen::Index>(basis.vectors.front().size());
    const auto cols = static_cast<Eigen::Index>(basis.vectors.size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        m.col(c) = Eigen::Map<const Eigen::VectorXd>(basis.vectors[c].data(), rows);
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const auto& r = qr.matrixQR();
    std::vector<double> diag(static_cast<std::size_t>(std::min(rows, cols)));
    for (std::size_t i = 0; i < diag.size(); ++i) {
        diag[i] = std::abs(r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    }
    return diag;
}

// ---------------------------------------------------------------------------

bool in_boundary_layer(const Grid& grid, const MultiIndex& idx, int thickness) {
    for (int k = 0; k < grid.dim(); ++k) {
        if (idx[k] < thickness || idx[k] >= grid.n(k) - thickness) return true;
    }
    return false;
}

std::vector<AngleReport> principal_angles(const InteriorOperator& op,
                                          const std::vector<int>& thicknesses) {
    const Grid& g = op.grid();
    for (int k = 0; k < g.dim(); ++k) {
        if (g.n(k) > kMaxAngleSide) {
            throw ConfigurationError("principal_angles supports grid sides up to " +
                                     std::to_string(kMaxAngleSide) + "; " + g.describe());
        }
    }
    if (op.cols() > kDenseSvdCap) {
        throw ConfigurationError("principal_angles: operator exceeds the dense SVD cap");
    }
    for (int t : thicknesses) {
        if (t < 1) throw PreconditionError("boundary layer thickness must be at least 1");
    }

    const auto rows = static_cast<Eigen::Index>(op.rows());
    const auto cols = static_cast<Eigen::Index>(op.cols());
    const auto dense = op.to_dense();
    const Eigen::Map<const RowMatrix> a(dense.data(), rows, cols);
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double largest = sigma.size() ? sigma.maxCoeff() : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > 1e-10 * largest) ++rank;
    }
    const Eigen::Index nullity = cols - rank;
    std::string warning;
    if (nullity != cols - rows) {
        warning = "numerical nullity " + std::to_string(nullity) + " differs from cols - rows = " +
                  std::to_string(cols - rows);
    }
    const Eigen::MatrixXd kernel = svd.matrixV().rightCols(nullity);

    std::vector<AngleReport> reports;
    for (int t : thicknesses) {
        std::vector<Eigen::Index> layer;
        for (std::size_t c = 0; c < g.size(); ++c) {
            if (in_boundary_layer(g, g.unflat(c), t)) layer.push_back(static_cast<Eigen::Index>(c));
        }
        Eigen::MatrixXd cross(static_cast<Eigen::Index>(layer.size()), nullity);
        for (std::size_t i = 0; i < layer.size(); ++i) {
            cross.row(static_cast<Eigen::Index>(i)) = kernel.row(layer[i]);
        }
        std::vector<double> cosines(static_cast<std::size_t>(nullity), 0.0);
        if (cross.rows() > 0 && nullity > 0) {
            const Eigen::BDCSVD<Eigen::MatrixXd> csvd(cross);
            const auto& s = csvd.singularValues();
            for (Eigen::Index i = 0; i < s.size(); ++i) {
                cosines[static_cast<std::size_t>(i)] = std::clamp(s[i], 0.0, 1.0);
            }
        }
        AngleReport rep;
        rep.thickness = t;
        rep.warning = warning;
        double sum = 0.0;
        for (double c : cosines) {
            rep.angles.push_back(std::acos(c));
            sum += c;
        }
        std::sort(rep.angles.begin(), rep.angles.end());
        rep.p_d = cosines.empty() ? 0.0 : sum / static_cast<double>(cosines.size());
        reports.push_back(std::move(rep));
    }
    return reports;
}

AngleReport principal_angles(const InteriorOperator& op, int thickness) {
    return principal_angles(op, std::vector<int>{thickness}).front();
}

double boundary_weight_rho(const DensityField& e, int thickness) {
    if (thickness < 1) throw PreconditionError("boundary layer thickness must be at least 1");
    const Grid& g = e.grid;
    double layer = 0.0, total = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double sq = e.values[c] * e.values[c];
        total += sq;
        if (in_boundary_layer(g, g.unflat(c), thickness)) layer += sq;
    }
    if (total == 0.0) throw UndefinedRatioError("boundary weight of a zero field is undefined");
    return std::sqrt(layer / total);
}

// ---------------------------------------------------------------------------

DensityField difference(const DensityField& u, const DensityField& ref) {
    require_same_grid(u, ref);
    DensityField e(u.grid);
    for (std::size_t i = 0; i < e.values.size(); ++i) e.values[i] = u.values[i] - ref.values[i];
    return e;
}

double discrete_l2_error(const DensityField& u, const DensityField& ref) {
    require_same_grid(u, ref);
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double d = u.values[i] - ref.values[i];
        s += d * d;
    }
    return std::sqrt(s * u.grid.cell_volume());
}

double discrete_h1_error(const DensityField& u, const DensityField& ref) {
    const DensityField e = difference(u, ref);
    const Grid& g = e.grid;
    const double h = g.h();
    double l2 = 0.0, grad = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        l2 += e.values[c] * e.values[c];
        const MultiIndex idx = g.unflat(c);
        for (int k = 0; k < g.dim(); ++k) {
            if (idx[k] + 1 >= g.n(k)) continue;
            const double d = (e.values[c + g.stride(k)] - e.values[c]) / h;
            grad += d * d;
        }
    }
    return std::sqrt((l2 + grad) * g.cell_volume());
}

// ---------------------------------------------------------------------------

std::uint64_t samples_for_mesh(int n, double samples_per_cell) {
    return static_cast<std::uint64_t>(std::llround(samples_per_cell * n * n));
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceConfig& cfg) {
    const ModelSpec model = ring_model(cfg.epsilon);
    const RingDensity exact(cfg.epsilon);
    const bool wants_overlap =
        std::find(cfg.methods.begin(), cfg.methods.end(), "overlap") != cfg.methods.end();
    const int inflation = wants_overlap ? cfg.iota : 0;

    std::vector<ConvergenceRow> rows;
    for (int n : cfg.mesh_sizes) {
        if (n % cfg.block_cells != 0) {
            throw ConfigurationError("mesh size " + std::to_string(n) +
                                     " is not a multiple of the block size " +
                                     std::to_string(cfg.block_cells));
        }
        const Grid core = Grid::cube(2, cfg.lo, cfg.hi, n);
        const Grid sampled = core.inflated(inflation);

        SamplerConfig sc;
        sc.dt = cfg.dt;
        sc.n_samples = samples_for_mesh(n, cfg.samples_per_cell);
        sc.burn_in = cfg.burn_in;
        sc.seed = cfg.seed + static_cast<std::uint64_t>(n);
        sc.n_chains = cfg.chains;
        sc.parallel = cfg.parallel;
        const auto sample_start = std::chrono::steady_clock::now();
        const DensityField v_ext = histogram_to_density(accumulate_histogram(model, sampled, sc));
        const double sampling_seconds = seconds_since(sample_start);

        CellRange core_range = core.full_range().shifted({inflation, inflation, 0});
        const DensityField v = restrict_field(v_ext, core_range);
        const DensityField reference = DensityField::sample(core, exact);

        BlockSolveConfig bc;
        bc.partition.grid = core;
        bc.partition.blocks_per_dim = {n / cfg.block_cells, n / cfg.block_cells, 1};
        bc.solve_opts = cfg.solve_opts;
        bc.parallel = cfg.parallel;

        for (const auto& method : cfg.methods) {
            const auto start = std::chrono::steady_clock::now();
            DensityField u = [&]() -> DensityField {
                if (method == "mc") return v;
                if (method == "plain") return solve_blocks(model, v, bc).field;
                if (method == "overlap") return solve_overlapping(model, v_ext, bc, cfg.iota).field;
                if (method == "shift") return solve_shifting(model, v, bc, cfg.schedule).field;
                throw ConfigurationError("unknown convergence method '" + method + "'");
            }();
            ConvergenceRow row;
            row.n = n;
            row.method = method;
            row.samples = sc.n_samples;
            row.seconds = method == "mc" ? sampling_seconds : seconds_since(start);
            row.l2 = discrete_l2_error(u, reference);
            row.h1 = discrete_h1_error(u, reference);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    os << "n,method,samples,l2,h1,seconds\n";
    const auto old = os.precision(10);
    for (const auto& r : rows) {
        os << r.n << ',' << r.method << ',' << r.samples << ',' << r.l2 << ',' << r.h1 << ','
           << r.seconds << '\n';
    }
    os.precision(old);
}

}  // namespace fpblock
