#include "mcube/biharmonic.hpp"

#include "mcube/errors.hpp"

#include <lapacke.h>
#include <zlib.h>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>

namespace mcube {

static_assert(std::endian::native == std::endian::little, "cache files are little-endian");

namespace fs = std::filesystem;

BiharmonicOperator::BiharmonicOperator(int dim, int N)
    : dim_(dim), N_(N), n_(dim == 2 ? N * N : N * N * N), scale_(std::pow(double(N), -4)),
      mesh_(build_mesh(N, 1.0))
{
    if (dim != 2 && dim != 3) throw UsageError("biharmonic operator dimension must be 2 or 3");
    D2_ = mesh_.D * mesh_.D;
    D4_ = D2_ * D2_;
    roles_.resize(n_);
    for (int r = 0; r < n_; ++r) {
        const auto c = coords(r);
        bool outer = false, second = false;
        for (int a = 0; a < dim_; ++a) {
            outer = outer || c[a] == 0 || c[a] == N - 1;
            second = second || c[a] == 1 || c[a] == N - 2;
        }
        roles_[r] = outer ? RowRole::Neumann : (second ? RowRole::Dirichlet : RowRole::Interior);
    }
}

std::array<int, 3> BiharmonicOperator::role_counts() const
{
    std::array<int, 3> n{0, 0, 0};
    for (RowRole r : roles_) ++n[static_cast<int>(r)];
    return n;
}

std::array<int, 3> BiharmonicOperator::coords(int node) const
{
    return {node % N_, (node / N_) % N_, dim_ == 3 ? node / (N_ * N_) : 0};
}

int BiharmonicOperator::node(const std::array<int, 3>& c) const
{
    return c[0] + N_ * (c[1] + (dim_ == 3 ? N_ * c[2] : 0));
}

std::vector<FaceLabel> BiharmonicOperator::faces_of(int node) const
{
    std::vector<FaceLabel> f;
    const auto c = coords(node);
    for (int a = 0; a < dim_; ++a) {
        if (c[a] == 0) f.push_back({a, -1});
        if (c[a] == N_ - 1) f.push_back({a, 1});
    }
    return f;
}

std::vector<int> BiharmonicOperator::dirichlet_targets(int node) const
{
    std::vector<int> t;
    const auto c = coords(node);
    for (int a = 0; a < dim_; ++a) {
        if (c[a] != 1 && c[a] != N_ - 2) continue;
        auto q = c;
        q[a] = c[a] == 1 ? 0 : N_ - 1;
        t.push_back(this->node(q));
    }
    return t;
}

int BiharmonicOperator::face_local(FaceLabel f, int node) const
{
    const auto c = coords(node);
    if (dim_ == 2) return c[1 - f.axis];
    const int b = f.axis == 0 ? 1 : 0;
    const int d = f.axis == 2 ? 1 : 2;
    return c[b] + N_ * c[d];
}

std::vector<std::pair<int, double>> BiharmonicOperator::row(int r) const
{
    std::vector<std::pair<int, double>> e;
    const auto c = coords(r);
    switch (roles_[r]) {
    case RowRole::Interior:
        for (int a = 0; a < dim_; ++a) {
            auto q = c;
            for (int m = 0; m < N_; ++m) {
                q[a] = m;
                e.emplace_back(node(q), scale_ * D4_(c[a], m));
            }
        }
        for (int a = 0; a < dim_; ++a) {
            for (int b = a + 1; b < dim_; ++b) {
                auto q = c;
                for (int m1 = 0; m1 < N_; ++m1) {
                    q[a] = m1;
                    for (int m2 = 0; m2 < N_; ++m2) {
                        q[b] = m2;
                        e.emplace_back(node(q), scale_ * 2.0 * D2_(c[a], m1) * D2_(c[b], m2));
                    }
                }
            }
        }
        break;
    case RowRole::Neumann: {
        const auto faces = faces_of(r);
        const double w = 1.0 / faces.size();
        for (const FaceLabel& f : faces) {
            auto q = c;
            for (int m = 0; m < N_; ++m) {
                q[f.axis] = m;
                e.emplace_back(node(q), w * f.sign * mesh_.D(c[f.axis], m));
            }
        }
        break;
    }
    case RowRole::Dirichlet: {
        const auto t = dirichlet_targets(r);
        for (int q : t) e.emplace_back(q, 1.0 / t.size());
        break;
    }
    }
    std::sort(e.begin(), e.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<int, double>> merged;
    for (const auto& [col, v] : e) {
        if (!merged.empty() && merged.back().first == col) merged.back().second += v;
        else merged.emplace_back(col, v);
    }
    return merged;
}

BiharmonicData BiharmonicData::zeros(int dim, int N, double L)
{
    BiharmonicData d;
    d.L = L;
    const int n = dim == 2 ? N * N : N * N * N;
    const int fs = dim == 2 ? N : N * N;
    d.dirichlet.assign(n, 0.0);
    d.neumann.assign(2 * dim, std::vector<double>(fs, 0.0));
    return d;
}

FactoredBiharmonic::FactoredBiharmonic(int dim, int N) : op_(dim, N) {}

void FactoredBiharmonic::compute()
{
    const std::size_t n = op_.size();
    lu_.assign(n * n, 0.0);
    max_row_sum_ = 0;
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0;
        for (const auto& [c, v] : op_.row(static_cast<int>(r))) {
            lu_[static_cast<std::size_t>(c) * n + r] = v;
            s += std::abs(v);
        }
        max_row_sum_ = std::max(max_row_sum_, s);
    }
    ipiv_.assign(n, 0);
    const lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), static_cast<lapack_int>(n),
                                           lu_.data(), static_cast<lapack_int>(n), ipiv_.data());
    if (info != 0)
        throw NumericalError("factor", "LU factorization failed for dim=" + std::to_string(op_.dim()) +
                                           " N=" + std::to_string(op_.N()) + " (info=" + std::to_string(info) + ")");
}

namespace {

constexpr char kMagic[8] = {'M', 'C', 'B', 'H', 'L', 'U', '\0', '\1'};

struct CacheHeader {
    char magic[8];
    std::uint32_t version;
    std::uint32_t dim;
    std::uint32_t N;
    std::uint32_t reserved;
    std::uint64_t n;
    double max_row_sum;
    std::uint32_t crc;
    std::uint32_t reserved2;
};

std::uint32_t checksum(const std::vector<double>& lu, const std::vector<int>& piv)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    auto feed = [&crc](const void* p, std::size_t bytes) {
        const auto* b = static_cast<const Bytef*>(p);
        while (bytes > 0) {
            const uInt chunk = static_cast<uInt>(std::min<std::size_t>(bytes, 1u << 30));
            crc = crc32(crc, b, chunk);
            b += chunk;
            bytes -= chunk;
        }
    };
    feed(lu.data(), lu.size() * sizeof(double));
    feed(piv.data(), piv.size() * sizeof(int));
    return static_cast<std::uint32_t>(crc);
}

// Serializes factorization per key inside the process and across processes.
class KeyLock {
public:
    KeyLock(const std::string& key, const std::string& lock_file)
    {
        static std::mutex registry;
        static std::map<std::string, std::unique_ptr<std::mutex>> locks;
        {
            std::lock_guard<std::mutex> g(registry);
            auto& m = locks[key];
            if (!m) m = std::make_unique<std::mutex>();
            mutex_ = m.get();
        }
        mutex_->lock();
        if (!lock_file.empty()) {
            fd_ = ::open(lock_file.c_str(), O_CREAT | O_RDWR, 0644);
            if (fd_ >= 0) ::flock(fd_, LOCK_EX);
        }
    }
    ~KeyLock()
    {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
        mutex_->unlock();
    }
    KeyLock(const KeyLock&) = delete;
    KeyLock& operator=(const KeyLock&) = delete;

private:
    std::mutex* mutex_ = nullptr;
    int fd_ = -1;
};

}  // namespace

bool FactoredBiharmonic::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    CacheHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    const std::size_t n = op_.size();
    if (!in || std::memcmp(h.magic, kMagic, 8) != 0 || h.version != kLayoutVersion ||
        h.dim != static_cast<std::uint32_t>(op_.dim()) || h.N != static_cast<std::uint32_t>(op_.N()) || h.n != n)
        return false;
    std::vector<double> lu(n * n);
    std::vector<int> piv(n);
    in.read(reinterpret_cast<char*>(lu.data()), static_cast<std::streamsize>(lu.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(piv.data()), static_cast<std::streamsize>(piv.size() * sizeof(int)));
    if (!in || checksum(lu, piv) != h.crc) return false;
    lu_ = std::move(lu);
    ipiv_ = std::move(piv);
    max_row_sum_ = h.max_row_sum;
    return true;
}

void FactoredBiharmonic::save(const std::string& path) const
{
    CacheHeader h{};
    std::memcpy(h.magic, kMagic, 8);
    h.version = kLayoutVersion;
    h.dim = op_.dim();
    h.N = op_.N();
    h.n = op_.size();
    h.max_row_sum = max_row_sum_;
    h.crc = checksum(lu_, ipiv_);
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return;  // cache is best effort
        out.write(reinterpret_cast<const char*>(&h), sizeof h);
        out.write(reinterpret_cast<const char*>(lu_.data()), static_cast<std::streamsize>(lu_.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(ipiv_.data()), static_cast<std::streamsize>(ipiv_.size() * sizeof(int)));
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            return;
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) fs::remove(tmp, ec);
}

std::string cache_file_name(int dim, int N)
{
    return "bihar_" + std::to_string(dim) + "d_N" + std::to_string(N) + "_v" + std::to_string(kLayoutVersion) + ".lu";
}

std::string resolve_cache_dir(const std::string& flag)
{
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("MCUBE_CACHE_DIR")) return env;
    return {};
}

std::shared_ptr<const FactoredBiharmonic> factor(int dim, int N, const FactorOptions& opt)
{
    auto f = std::make_shared<FactoredBiharmonic>(dim, N);
    std::string path;
    if (!opt.cache_dir.empty()) {
        std::error_code ec;
        fs::create_directories(opt.cache_dir, ec);
        path = (fs::path(opt.cache_dir) / cache_file_name(dim, N)).string();
    }
    const auto t0 = std::chrono::steady_clock::now();
    KeyLock lock(path.empty() ? cache_file_name(dim, N) : path, path.empty() ? std::string() : path + ".lock");
    bool hit = !path.empty() && f->load(path);
    if (hit && !(f->reconstruction_error() < 1e-12)) hit = false;
    if (!hit) {
        f->compute();
        const double err = f->reconstruction_error();
        if (!(err < 1e-12))
            throw NumericalError("factor", "LU reconstruction check failed (" + std::to_string(err) + ")");
        if (!path.empty()) f->save(path);
    }
    f->cache_hit_ = hit;
    f->path_ = path;
    f->seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return f;
}

double FactoredBiharmonic::condition_estimate() const
{
    const std::size_t n = op_.size();
    double min_diag = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) min_diag = std::min(min_diag, std::abs(lu_[i * n + i]));
    if (min_diag == 0) throw NumericalError("condition_estimate", "zero pivot in U");
    return max_row_sum_ / min_diag;
}

double FactoredBiharmonic::reconstruction_error() const
{
    const int n = op_.size();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = 0; i < n; ++i) std::swap(perm[i], perm[ipiv_[i] - 1]);
    const int rows[] = {0, n / 7, n / 3, n / 2, (2 * n) / 3, n - 1};
    double worst = 0;
    std::vector<double> lu_row(n), mag(n), orig(n);
    for (int r : rows) {
        std::fill(lu_row.begin(), lu_row.end(), 0.0);
        std::fill(mag.begin(), mag.end(), 0.0);
        std::fill(orig.begin(), orig.end(), 0.0);
        for (int k = 0; k <= r; ++k) {
            const double l = k == r ? 1.0 : lu_[static_cast<std::size_t>(k) * n + r];
            if (l == 0) continue;
            for (int c = k; c < n; ++c) {
                const double u = lu_[static_cast<std::size_t>(c) * n + k];
                lu_row[c] += l * u;
                mag[c] += std::abs(l * u);
            }
        }
        for (const auto& [c, v] : op_.row(perm[r])) orig[c] = v;
        double scale = 0, diff = 0;
        for (int c = 0; c < n; ++c) {
            scale = std::max(scale, mag[c]);
            diff = std::max(diff, std::abs(lu_row[c] - orig[c]));
        }
        worst = std::max(worst, scale > 0 ? diff / scale : diff);
    }
    return worst;
}

std::vector<double> FactoredBiharmonic::rhs(const BiharmonicData& d) const
{
    const int n = op_.size();
    const double ratio = d.L;  // physical side over the unit side the operator lives on
    if (static_cast<int>(d.dirichlet.size()) != n || static_cast<int>(d.neumann.size()) != 2 * op_.dim() ||
        (!d.source.empty() && static_cast<int>(d.source.size()) != n))
        throw NumericalError("solve", "boundary data has the wrong shape");
    for (const auto& f : d.neumann)
        if (static_cast<int>(f.size()) != op_.face_size()) throw NumericalError("solve", "Neumann face data has the wrong size");
    std::vector<double> b(n, 0.0);
    for (int r = 0; r < n; ++r) {
        switch (op_.role(r)) {
        case RowRole::Interior:
            b[r] = d.source.empty() ? 0.0 : op_.interior_scale() * std::pow(ratio, 4) * d.source[r];
            break;
        case RowRole::Neumann: {
            const auto faces = op_.faces_of(r);
            double s = 0;
            for (const FaceLabel& f : faces) s += d.neumann[f.index()][op_.face_local(f, r)];
            b[r] = ratio * s / faces.size();
            break;
        }
        case RowRole::Dirichlet: {
            const auto t = op_.dirichlet_targets(r);
            double s = 0;
            for (int q : t) s += d.dirichlet[q];
            b[r] = s / t.size();
            break;
        }
        }
        if (!std::isfinite(b[r])) throw NumericalError("solve", "non-finite boundary or source data");
    }
    return b;
}

void FactoredBiharmonic::build_rows() const
{
    std::call_once(rows_once_, [this] {
        const int n = op_.size();
        row_ptr_.assign(n + 1, 0);
        col_.clear();
        val_.clear();
        for (int r = 0; r < n; ++r) {
            for (const auto& [c, v] : op_.row(r)) {
                col_.push_back(c);
                val_.push_back(v);
            }
            row_ptr_[r + 1] = static_cast<std::int64_t>(col_.size());
        }
    });
}

std::vector<std::vector<double>> FactoredBiharmonic::solve(const std::vector<BiharmonicData>& d) const
{
    const int n = op_.size();
    const int m = static_cast<int>(d.size());
    if (m == 0) return {};
    std::vector<double> B(static_cast<std::size_t>(n) * m);
    for (int j = 0; j < m; ++j) {
        const auto b = rhs(d[j]);
        std::copy(b.begin(), b.end(), B.begin() + static_cast<std::size_t>(j) * n);
    }
    std::vector<double> X = B;
    lapack_int info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, m, lu_.data(), n, ipiv_.data(), X.data(), n);
    if (info != 0) throw NumericalError("solve", "triangular solve failed (info=" + std::to_string(info) + ")");

    // one refinement step: X += LU^{-1} (B - A X)
    build_rows();
    std::vector<double> R(B.size());
    for (int j = 0; j < m; ++j) {
        const double* x = X.data() + static_cast<std::size_t>(j) * n;
        const double* b = B.data() + static_cast<std::size_t>(j) * n;
        double* r = R.data() + static_cast<std::size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            long double s = b[i];
            for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                s -= static_cast<long double>(val_[k]) * x[col_[k]];
            r[i] = static_cast<double>(s);
        }
    }
    info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, m, lu_.data(), n, ipiv_.data(), R.data(), n);
    if (info != 0) throw NumericalError("solve", "triangular solve failed (info=" + std::to_string(info) + ")");
    for (std::size_t k = 0; k < X.size(); ++k) X[k] += R[k];

    std::vector<std::vector<double>> out(m);
    for (int j = 0; j < m; ++j) {
        out[j].assign(X.begin() + static_cast<std::size_t>(j) * n, X.begin() + static_cast<std::size_t>(j + 1) * n);
        for (double v : out[j])
            if (!std::isfinite(v)) throw NumericalError("solve", "non-finite solution");
    }
    return out;
}

std::vector<double> FactoredBiharmonic::solve(const BiharmonicData& d) const
{
    return solve(std::vector<BiharmonicData>{d}).front();
}

BoundaryResiduals FactoredBiharmonic::residuals(const BiharmonicData& d, const std::vector<double>& U) const
{
    BoundaryResiduals res;
    const int n = op_.size(), N = op_.N();
    const double scale = 1.0 / d.L;
    for (int r = 0; r < n; ++r) {
        const auto faces = op_.faces_of(r);
        if (faces.empty()) continue;
        res.dirichlet = std::max(res.dirichlet, std::abs(U[r] - d.dirichlet[r]));
        const auto c = op_.coords(r);
        for (const FaceLabel& f : faces) {
            auto q = c;
            double du = 0;
            for (int m = 0; m < N; ++m) {
                q[f.axis] = m;
                du += op_.mesh().D(c[f.axis], m) * U[op_.node(q)];
            }
            du *= scale * f.sign;
            res.neumann = std::max(res.neumann, std::abs(du - d.neumann[f.index()][op_.face_local(f, r)]));
        }
    }
    return res;
}

std::vector<CacheEntry> list_cache(const std::string& dir)
{
    std::vector<CacheEntry> out;
    std::error_code ec;
    if (dir.empty() || !fs::is_directory(dir, ec)) return out;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("bihar_", 0) == 0 && e.path().extension() == ".lu")
            out.push_back({e.path().string(), e.file_size(ec)});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return out;
}

int clear_cache(const std::string& dir)
{
    int n = 0;
    std::error_code ec;
    if (dir.empty() || !fs::is_directory(dir, ec)) return 0;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("bihar_", 0) != 0) continue;
        const bool factors = e.path().extension() == ".lu";
        if (fs::remove(e.path(), ec) && factors) ++n;
    }
    return n;
}

}  // namespace mcube
