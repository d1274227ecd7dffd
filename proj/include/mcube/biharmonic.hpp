#pragma once

#include "mcube/signed_permutation.hpp"
#include "mcube/spectral.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace mcube {

constexpr int kLayoutVersion = 1;
constexpr int kMax3DResolution = 20;

enum class RowRole { Interior, Neumann, Dirichlet };

/// Boundary-augmented collocation operator of the 2D/3D biharmonic equation on
/// the unit cube [-1/2,1/2]^dim (other sizes are handled by rescaling the data). Outer-layer rows carry Neumann conditions
/// (averaged over the faces a node lies on), second-layer rows carry Dirichlet
/// conditions at the nearest boundary node(s) (averaged), interior rows carry
/// the biharmonic stencil times N^-4.
class BiharmonicOperator {
public:
    BiharmonicOperator(int dim, int N);

    int dim() const { return dim_; }
    int N() const { return N_; }
    int size() const { return n_; }
    const SpectralMesh1D& mesh() const { return mesh_; }
    double interior_scale() const { return scale_; }

    RowRole role(int node) const { return roles_[node]; }
    /// Counts of (interior, Neumann, Dirichlet) rows.
    std::array<int, 3> role_counts() const;

    std::array<int, 3> coords(int node) const;
    int node(const std::array<int, 3>& c) const;
    /// Boundary faces containing an outer-layer node (FaceLabel axis < dim).
    std::vector<FaceLabel> faces_of(int node) const;
    /// Boundary nodes whose Dirichlet values a second-layer row averages.
    std::vector<int> dirichlet_targets(int node) const;
    /// Index of a boundary node within the data array of face f.
    int face_local(FaceLabel f, int node) const;
    int face_size() const { return dim_ == 2 ? N_ : N_ * N_; }

    /// Nonzero entries of row r, sorted by column, duplicates merged.
    std::vector<std::pair<int, double>> row(int r) const;

private:
    int dim_, N_, n_;
    double scale_;
    SpectralMesh1D mesh_;
    Eigen::MatrixXd D2_, D4_;
    std::vector<RowRole> roles_;
};

/// Data of one boundary-value problem in physical units on a cube of side L.
struct BiharmonicData {
    double L = 1.0;
    std::vector<double> dirichlet;             // N^dim values, boundary nodes read
    std::vector<std::vector<double>> neumann;  // per FaceLabel::index(): outward normal derivative
    std::vector<double> source;                // N^dim values or empty (zero)

    static BiharmonicData zeros(int dim, int N, double L);
};

struct BoundaryResiduals {
    double dirichlet = 0;  // max |U - dirichlet| over boundary nodes
    double neumann = 0;    // max |dU/dn - neumann| over face nodes
};

struct FactorOptions {
    std::string cache_dir;  // empty: no disk cache
};

/// Dense LU (partial pivoting) of a BiharmonicOperator, column-major.
class FactoredBiharmonic {
public:
    FactoredBiharmonic(int dim, int N);

    const BiharmonicOperator& op() const { return op_; }
    bool cache_hit() const { return cache_hit_; }
    double factor_seconds() const { return seconds_; }
    const std::string& cache_path() const { return path_; }

    /// max row sum / min |U_ii|.
    double condition_estimate() const;
    /// Spot check of P*O = L*U on a few rows, relative to sum_k |L_rk||U_kc|.
    double reconstruction_error() const;

    /// LU solve followed by one step of iterative refinement (residual
    /// accumulated in extended precision against the operator rows).
    std::vector<double> solve(const BiharmonicData& d) const;
    std::vector<std::vector<double>> solve(const std::vector<BiharmonicData>& d) const;
    BoundaryResiduals residuals(const BiharmonicData& d, const std::vector<double>& U) const;

    const std::vector<double>& lu() const { return lu_; }
    const std::vector<int>& pivots() const { return ipiv_; }

private:
    friend std::shared_ptr<const FactoredBiharmonic> factor(int, int, const FactorOptions&);
    void compute();
    bool load(const std::string& path);
    void save(const std::string& path) const;
    std::vector<double> rhs(const BiharmonicData& d) const;
    void build_rows() const;

    BiharmonicOperator op_;
    std::vector<double> lu_;
    std::vector<int> ipiv_;
    double max_row_sum_ = 0;
    bool cache_hit_ = false;
    double seconds_ = 0;
    std::string path_;
    // operator rows in CSR form, built on first solve
    mutable std::once_flag rows_once_;
    mutable std::vector<std::int64_t> row_ptr_;
    mutable std::vector<int> col_;
    mutable std::vector<double> val_;
};

/// Factorization for (dim, N): loaded from the disk cache or computed (and then
/// written to the cache). Corrupt cache files are recomputed and overwritten.
/// Concurrent calls for one key inside a process, or across processes sharing
/// the cache directory, factor only once.
std::shared_ptr<const FactoredBiharmonic> factor(int dim, int N, const FactorOptions& opt);

/// `bihar_<dim>d_N<N>_v<layout>.lu`
std::string cache_file_name(int dim, int N);
/// Flag value, else $MCUBE_CACHE_DIR, else empty.
std::string resolve_cache_dir(const std::string& flag);

struct CacheEntry {
    std::string path;
    std::uintmax_t bytes = 0;
};
std::vector<CacheEntry> list_cache(const std::string& dir);
int clear_cache(const std::string& dir);  // returns number of files removed

}  // namespace mcube
