#include "mbsed/sectors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>

namespace mbsed {

namespace {

constexpr double kGroupingTolerance = 1e-8;
constexpr std::uint64_t kCacheMagic = 0x4d42534543543031ull; // "MBSECT01"

// Full S^2 decomposition of every magnetisation block; columns sorted by
// descending S.
struct Decomposition {
    int n_atoms = 0;
    std::vector<SectorBlock> blocks;
};

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

Decomposition decompose(int n) {
    Decomposition d;
    d.n_atoms = n;
    for (int k = 0; k <= n; ++k) {
        SectorBlock blk;
        blk.up_count = k;
        blk.states = states_with_up_count(n, k);
        const Matrix s2 = total_spin_squared_block(n, blk.states);
        Eigen::SelfAdjointEigenSolver<Matrix> es(s2);
        if (es.info() != Eigen::Success) throw HamiltonianError("S^2 diagonalisation failed");
        const auto m = s2.rows();
        blk.vectors.resize(m, m);
        blk.total_spin.resize(static_cast<std::size_t>(m));
        // Eigenvalues ascend; reverse so the largest S comes first.
        for (Eigen::Index c = 0; c < m; ++c) {
            const Eigen::Index src = m - 1 - c;
            const double ev = es.eigenvalues()[src];
            const double s = 0.5 * (std::sqrt(1.0 + 4.0 * ev) - 1.0);
            const double label = std::round(2.0 * s) / 2.0;
            if (std::abs(label * (label + 1.0) - ev) > kGroupingTolerance)
                throw HamiltonianError("S^2 eigenvalue " + std::to_string(ev) + " is not of the form S(S+1)");
            blk.vectors.col(c) = es.eigenvectors().col(src);
            blk.total_spin[static_cast<std::size_t>(c)] = label;
        }
        d.blocks.push_back(std::move(blk));
    }
    return d;
}

std::filesystem::path cache_file(const std::filesystem::path& dir, int n) {
    return dir / ("spin_sectors_N" + std::to_string(n) + ".bin");
}

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::ifstream& is, T& v) {
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

void save(const Decomposition& d, const std::filesystem::path& file) {
    std::filesystem::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) return; // caching is best effort
        put(os, kCacheMagic);
        put(os, std::int32_t(d.n_atoms));
        for (const auto& b : d.blocks) {
            put(os, std::int64_t(b.vectors.rows()));
            os.write(reinterpret_cast<const char*>(b.vectors.data()),
                     static_cast<std::streamsize>(sizeof(double) * b.vectors.size()));
            os.write(reinterpret_cast<const char*>(b.total_spin.data()),
                     static_cast<std::streamsize>(sizeof(double) * b.total_spin.size()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
}

std::optional<Decomposition> load(int n, const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) return std::nullopt;
    std::uint64_t magic = 0;
    std::int32_t stored_n = 0;
    if (!get(is, magic) || magic != kCacheMagic || !get(is, stored_n) || stored_n != n) return std::nullopt;
    Decomposition d;
    d.n_atoms = n;
    for (int k = 0; k <= n; ++k) {
        SectorBlock blk;
        blk.up_count = k;
        blk.states = states_with_up_count(n, k);
        std::int64_t rows = 0;
        if (!get(is, rows) || rows != static_cast<std::int64_t>(blk.states.size())) return std::nullopt;
        blk.vectors.resize(rows, rows);
        blk.total_spin.resize(static_cast<std::size_t>(rows));
        is.read(reinterpret_cast<char*>(blk.vectors.data()),
                static_cast<std::streamsize>(sizeof(double) * blk.vectors.size()));
        is.read(reinterpret_cast<char*>(blk.total_spin.data()),
                static_cast<std::streamsize>(sizeof(double) * blk.total_spin.size()));
        if (!is) return std::nullopt;
        d.blocks.push_back(std::move(blk));
    }
    return d;
}

std::shared_ptr<const Decomposition> decomposition(int n, const std::optional<std::filesystem::path>& dir) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const Decomposition>> memo;
    std::lock_guard lock(mutex);
    if (auto it = memo.find(n); it != memo.end()) return it->second;

    std::optional<std::filesystem::path> where = dir;
    if (!where) {
        if (const char* env = std::getenv("MBSED_CACHE_DIR"); env && *env) where = std::filesystem::path(env);
    }
    std::shared_ptr<const Decomposition> d;
    if (where) {
        if (auto loaded = load(n, cache_file(*where, n))) d = std::make_shared<const Decomposition>(std::move(*loaded));
    }
    if (!d) {
        d = std::make_shared<const Decomposition>(decompose(n));
        if (where) save(*d, cache_file(*where, n));
    }
    memo.emplace(n, d);
    return d;
}

} // namespace

std::size_t sector_dimension(int n, int m) {
    double total = 0.0;
    for (int j = 0; j <= m && 2 * j <= n; ++j) {
        const double s = 0.5 * n - j;
        const double mult = binomial(n, j) - binomial(n, j - 1);
        total += (2.0 * s + 1.0) * mult;
    }
    return static_cast<std::size_t>(total);
}

SpinSectorBasis spin_sector_basis(int n, int m, const std::optional<std::filesystem::path>& cache_dir) {
    if (n < 1 || n > kMaxAtoms) throw HamiltonianError("spin sectors: N out of range");
    if (m < 0) throw HamiltonianError("spin sectors: truncation must be >= 0");
    m = std::min(m, SpinSectorBasis::full_truncation(n));
    const auto d = decomposition(n, cache_dir);
    const double s_min = 0.5 * n - m;

    SpinSectorBasis basis;
    basis.n_atoms = n;
    basis.truncation = m;
    for (const auto& full : d->blocks) {
        SectorBlock blk;
        blk.up_count = full.up_count;
        blk.states = full.states;
        Eigen::Index kept = 0;
        while (kept < static_cast<Eigen::Index>(full.total_spin.size()) &&
               full.total_spin[static_cast<std::size_t>(kept)] >= s_min - 0.25)
            ++kept;
        blk.vectors = full.vectors.leftCols(kept);
        blk.total_spin.assign(full.total_spin.begin(), full.total_spin.begin() + kept);
        basis.blocks.push_back(std::move(blk));
    }
    return basis;
}

std::size_t SpinSectorBasis::dimension() const {
    std::size_t d = 0;
    for (const auto& b : blocks) d += static_cast<std::size_t>(b.vectors.cols());
    return d;
}

Matrix SpinSectorBasis::dense() const {
    const auto full = static_cast<Eigen::Index>(std::size_t{1} << n_atoms);
    Matrix out = Matrix::Zero(full, static_cast<Eigen::Index>(dimension()));
    Eigen::Index col = 0;
    for (const auto& b : blocks) {
        for (Eigen::Index c = 0; c < b.vectors.cols(); ++c, ++col)
            for (Eigen::Index r = 0; r < b.vectors.rows(); ++r) out(b.states[r], col) = b.vectors(r, c);
    }
    return out;
}

std::vector<int> SpinSectorBasis::column_up_counts() const {
    std::vector<int> out;
    for (const auto& b : blocks) out.insert(out.end(), static_cast<std::size_t>(b.vectors.cols()), b.up_count);
    return out;
}

HamiltonianMatrix project(const HamiltonianMatrix& h, const SpinSectorBasis& basis) {
    if (h.basis != BasisKind::FullProduct) throw HamiltonianError("project needs a product-basis Hamiltonian");
    if (h.n_atoms != basis.n_atoms) throw HamiltonianError("project: atom number mismatch");
    const Matrix b = basis.dense();
    HamiltonianMatrix out = h;
    out.basis = BasisKind::SpinSector;
    out.h = b.transpose() * h.h * b;
    return out;
}

Matrix project_block(const MzBlock& block, const SectorBlock& sector) {
    if (block.up_count != sector.up_count) throw HamiltonianError("project_block: magnetisation mismatch");
    return sector.vectors.transpose() * block.h * sector.vectors;
}

} // namespace mbsed
