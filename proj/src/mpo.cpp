#include "thermalab/mpo.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "thermalab/errors.hpp"

namespace thermalab {

namespace {

using SiteTensor = Mpo::SiteTensor;

// (l*d_out*d_in) x dr unfolding.
MatrixXcd unfold_right(const SiteTensor& t) {
    MatrixXcd m(t.dl * t.d_out * t.d_in, t.dr);
    for (Index row = 0; row < m.rows(); ++row)
        for (Index r = 0; r < t.dr; ++r)
            m(row, r) = t.data[static_cast<std::size_t>(row * t.dr + r)];
    return m;
}

// dl x (d_out*d_in*dr) unfolding.
MatrixXcd unfold_left(const SiteTensor& t) {
    MatrixXcd m(t.dl, t.d_out * t.d_in * t.dr);
    const Index w = t.d_out * t.d_in * t.dr;
    for (Index l = 0; l < t.dl; ++l)
        for (Index col = 0; col < w; ++col)
            m(l, col) = t.data[static_cast<std::size_t>(l * w + col)];
    return m;
}

SiteTensor fold_right(const MatrixXcd& m, Index dl, Index d_out, Index d_in) {
    SiteTensor t(dl, d_out, d_in, m.cols());
    for (Index row = 0; row < m.rows(); ++row)
        for (Index r = 0; r < m.cols(); ++r)
            t.data[static_cast<std::size_t>(row * t.dr + r)] = m(row, r);
    return t;
}

SiteTensor fold_left(const MatrixXcd& m, Index d_out, Index d_in, Index dr) {
    SiteTensor t(m.rows(), d_out, d_in, dr);
    const Index w = d_out * d_in * dr;
    for (Index l = 0; l < m.rows(); ++l)
        for (Index col = 0; col < w; ++col)
            t.data[static_cast<std::size_t>(l * w + col)] = m(l, col);
    return t;
}

} // namespace

Mpo::Mpo(std::vector<SiteTensor> tensors) : tensors_(std::move(tensors)) {
    if (tensors_.empty()) throw std::invalid_argument("MPO needs at least one site");
    if (tensors_.front().dl != 1 || tensors_.back().dr != 1)
        throw std::invalid_argument("boundary bond dimensions must be 1");
    for (std::size_t v = 0; v + 1 < tensors_.size(); ++v)
        if (tensors_[v].dr != tensors_[v + 1].dl)
            throw std::invalid_argument("adjacent bond dimensions disagree");
}

Mpo Mpo::identity(int sites, int local_dim) {
    std::vector<SiteTensor> ts;
    for (int v = 0; v < sites; ++v) {
        SiteTensor t(1, local_dim, local_dim, 1);
        for (Index i = 0; i < local_dim; ++i) t.at(0, i, i, 0) = 1.0;
        ts.push_back(std::move(t));
    }
    return Mpo(std::move(ts));
}

std::vector<int> Mpo::local_dims() const {
    std::vector<int> d;
    for (const auto& t : tensors_) d.push_back(static_cast<int>(t.d_out));
    return d;
}

std::vector<Index> Mpo::bond_dims() const {
    std::vector<Index> d;
    d.push_back(tensors_.front().dl);
    for (const auto& t : tensors_) d.push_back(t.dr);
    return d;
}

Index Mpo::max_bond() const {
    Index m = 1;
    for (const auto& t : tensors_) m = std::max(m, t.dr);
    return m;
}

MatrixXcd Mpo::contract_dense() const {
    // partial[(I,J), r] built site by site; I,J are the accumulated physical
    // multi-indices (row-major, site 0 most significant).
    MatrixXcd partial = MatrixXcd::Ones(1, 1);
    Index dim = 1;
    for (const auto& t : tensors_) {
        const Index nd = dim * t.d_out;
        MatrixXcd next = MatrixXcd::Zero(nd * nd, t.dr);
        for (Index ij = 0; ij < dim * dim; ++ij) {
            const Index big_i = ij / dim, big_j = ij % dim;
            for (Index l = 0; l < t.dl; ++l) {
                const Complex p = partial(ij, l);
                if (p == Complex(0, 0)) continue;
                for (Index i = 0; i < t.d_out; ++i)
                    for (Index j = 0; j < t.d_in; ++j)
                        for (Index r = 0; r < t.dr; ++r) {
                            const Complex x = t.at(l, i, j, r);
                            if (x == Complex(0, 0)) continue;
                            next((big_i * t.d_out + i) * nd + (big_j * t.d_in + j), r) += p * x;
                        }
            }
        }
        partial = std::move(next);
        dim = nd;
    }
    MatrixXcd out(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) out(i, j) = partial(i * dim + j, 0);
    return out;
}

Complex Mpo::trace() const {
    Eigen::RowVectorXcd w = Eigen::RowVectorXcd::Ones(1);
    for (const auto& t : tensors_) {
        MatrixXcd transfer = MatrixXcd::Zero(t.dl, t.dr);
        for (Index l = 0; l < t.dl; ++l)
            for (Index i = 0; i < t.d_out; ++i)
                for (Index r = 0; r < t.dr; ++r) transfer(l, r) += t.at(l, i, i, r);
        w = w * transfer;
    }
    return w(0);
}

double Mpo::frobenius_norm() const {
    // <M, M> via the doubled transfer.
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for (const auto& t : tensors_) {
        MatrixXcd next = MatrixXcd::Zero(t.dr, t.dr);
        for (Index l = 0; l < t.dl; ++l)
            for (Index lp = 0; lp < t.dl; ++lp) {
                const Complex e = env(l, lp);
                if (e == Complex(0, 0)) continue;
                for (Index i = 0; i < t.d_out; ++i)
                    for (Index j = 0; j < t.d_in; ++j)
                        for (Index r = 0; r < t.dr; ++r) {
                            const Complex a = t.at(l, i, j, r);
                            if (a == Complex(0, 0)) continue;
                            for (Index rp = 0; rp < t.dr; ++rp)
                                next(r, rp) += e * a * std::conj(t.at(lp, i, j, rp));
                        }
            }
        env = std::move(next);
    }
    return std::sqrt(std::max(0.0, env(0, 0).real()));
}

Mpo Mpo::add(const Mpo& other) const {
    if (num_sites() != other.num_sites())
        throw std::invalid_argument("MPO sum needs equal site counts");
    const int n = num_sites();
    std::vector<SiteTensor> ts;
    for (int v = 0; v < n; ++v) {
        const auto& a = tensors_[v];
        const auto& b = other.tensors_[v];
        if (a.d_out != b.d_out || a.d_in != b.d_in)
            throw std::invalid_argument("MPO sum needs equal physical dimensions");
        const Index dl = (v == 0) ? 1 : a.dl + b.dl;
        const Index dr = (v == n - 1) ? 1 : a.dr + b.dr;
        SiteTensor t(dl, a.d_out, a.d_in, dr);
        for (Index l = 0; l < a.dl; ++l)
            for (Index i = 0; i < a.d_out; ++i)
                for (Index j = 0; j < a.d_in; ++j)
                    for (Index r = 0; r < a.dr; ++r) t.at(l, i, j, r) += a.at(l, i, j, r);
        const Index lo = (v == 0) ? 0 : a.dl;
        const Index ro = (v == n - 1) ? 0 : a.dr;
        for (Index l = 0; l < b.dl; ++l)
            for (Index i = 0; i < b.d_out; ++i)
                for (Index j = 0; j < b.d_in; ++j)
                    for (Index r = 0; r < b.dr; ++r)
                        t.at(lo + l, i, j, ro + r) += b.at(l, i, j, r);
        ts.push_back(std::move(t));
    }
    return Mpo(std::move(ts));
}

Mpo Mpo::scaled(Complex factor) const {
    std::vector<SiteTensor> ts = tensors_;
    for (auto& x : ts.front().data) x *= factor;
    return Mpo(std::move(ts));
}

Mpo mpo_multiply(const Mpo& a, const Mpo& b) {
    if (a.num_sites() != b.num_sites())
        throw std::invalid_argument("MPO product needs equal site counts");
    std::vector<SiteTensor> ts;
    for (int v = 0; v < a.num_sites(); ++v) {
        const auto& ta = a.tensors()[v];
        const auto& tb = b.tensors()[v];
        if (ta.d_in != tb.d_out) throw std::invalid_argument("physical dimension mismatch");
        SiteTensor t(ta.dl * tb.dl, ta.d_out, tb.d_in, ta.dr * tb.dr);
        for (Index la = 0; la < ta.dl; ++la)
            for (Index lb = 0; lb < tb.dl; ++lb)
                for (Index i = 0; i < ta.d_out; ++i)
                    for (Index s = 0; s < ta.d_in; ++s)
                        for (Index ra = 0; ra < ta.dr; ++ra) {
                            const Complex x = ta.at(la, i, s, ra);
                            if (x == Complex(0, 0)) continue;
                            for (Index j = 0; j < tb.d_in; ++j)
                                for (Index rb = 0; rb < tb.dr; ++rb)
                                    t.at(la * tb.dl + lb, i, j, ra * tb.dr + rb) +=
                                        x * tb.at(lb, s, j, rb);
                        }
        ts.push_back(std::move(t));
    }
    return Mpo(std::move(ts));
}

Mpo mpo_adjoint(const Mpo& m) {
    std::vector<SiteTensor> ts;
    for (const auto& t : m.tensors()) {
        SiteTensor out(t.dl, t.d_in, t.d_out, t.dr);
        for (Index l = 0; l < t.dl; ++l)
            for (Index i = 0; i < t.d_out; ++i)
                for (Index j = 0; j < t.d_in; ++j)
                    for (Index r = 0; r < t.dr; ++r)
                        out.at(l, j, i, r) = std::conj(t.at(l, i, j, r));
        ts.push_back(std::move(out));
    }
    return Mpo(std::move(ts));
}

namespace {

CompressionResult compress_impl(const Mpo& input, Index max_bond, double svd_floor,
                                double rel_floor) {
    const int n = input.num_sites();
    std::vector<SiteTensor> ts = input.tensors();

    // Right-to-left orthogonalization (LQ via QR of the adjoint).
    for (int v = n - 1; v > 0; --v) {
        MatrixXcd m = unfold_left(ts[v]); // dl x (d_out d_in dr)
        const Index k = std::min(m.rows(), m.cols());
        Eigen::HouseholderQR<MatrixXcd> qr(m.adjoint());
        MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(m.cols(), k);
        MatrixXcd rfac = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        // m = (rfac)^dagger * q^dagger
        ts[v] = fold_left(q.adjoint(), ts[v].d_out, ts[v].d_in, ts[v].dr);
        MatrixXcd carry = rfac.adjoint(); // dl x k
        MatrixXcd left = unfold_right(ts[v - 1]);
        ts[v - 1] = fold_right(left * carry, ts[v - 1].dl, ts[v - 1].d_out, ts[v - 1].d_in);
    }

    // Left-to-right truncating sweep.
    double err2 = 0.0;
    for (int v = 0; v < n - 1; ++v) {
        MatrixXcd m = unfold_right(ts[v]); // (dl d_out d_in) x dr
        Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        double floor = svd_floor;
        if (rel_floor > 0 && sv.size() > 0) floor = std::max(floor, rel_floor * sv(0));
        Index keep = 0;
        for (Index i = 0; i < sv.size(); ++i)
            if (sv(i) > floor && keep < max_bond) ++keep;
        keep = std::max<Index>(keep, 1);
        for (Index i = keep; i < sv.size(); ++i) err2 += sv(i) * sv(i);

        MatrixXcd u = svd.matrixU().leftCols(keep);
        MatrixXcd carry =
            sv.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
        ts[v] = fold_right(u, ts[v].dl, ts[v].d_out, ts[v].d_in);
        MatrixXcd right = unfold_left(ts[v + 1]);
        ts[v + 1] = fold_left(carry * right, ts[v + 1].d_out, ts[v + 1].d_in, ts[v + 1].dr);
    }

    CompressionResult out{Mpo(std::move(ts)), std::sqrt(err2)};
    return out;
}

} // namespace

CompressionResult mpo_compress(const Mpo& m, Index max_bond, double svd_floor) {
    if (max_bond < 1) throw std::invalid_argument("max_bond must be at least 1");
    return compress_impl(m, max_bond, svd_floor, 0.0);
}

CompressionResult mpo_round_relative(const Mpo& m, double rel_floor) {
    return compress_impl(m, std::numeric_limits<Index>::max(), 0.0, rel_floor);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {
constexpr char kMagic[8] = {'T', 'L', 'A', 'B', 'M', 'P', 'O', '1'};
}

void save_mpo(const Mpo& m, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "MPO files are little-endian");
    nlohmann::json header;
    header["format_version"] = 1;
    header["sites"] = m.num_sites();
    header["local_dims"] = m.local_dims();
    std::vector<long long> bonds;
    for (Index b : m.bond_dims()) bonds.push_back(b);
    header["bond_dims"] = bonds;
    const std::string hs = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t len = static_cast<std::uint32_t>(hs.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& t : m.tensors())
        out.write(reinterpret_cast<const char*>(t.data.data()),
                  static_cast<std::streamsize>(t.data.size() * sizeof(Complex)));
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Mpo load_mpo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("'" + path + "' is not an MPO file");
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string hs(len, '\0');
    in.read(hs.data(), len);
    auto header = nlohmann::json::parse(hs);
    if (header.at("format_version").get<int>() != 1)
        throw std::runtime_error("unsupported MPO format version");
    const int sites = header.at("sites").get<int>();
    const auto local_dims = header.at("local_dims").get<std::vector<int>>();
    const auto bonds = header.at("bond_dims").get<std::vector<long long>>();
    if (static_cast<int>(local_dims.size()) != sites ||
        static_cast<int>(bonds.size()) != sites + 1)
        throw std::runtime_error("inconsistent MPO header");

    std::vector<Mpo::SiteTensor> ts;
    for (int v = 0; v < sites; ++v) {
        Mpo::SiteTensor t(bonds[v], local_dims[v], local_dims[v], bonds[v + 1]);
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(Complex)));
        ts.push_back(std::move(t));
    }
    if (!in) throw std::runtime_error("truncated MPO file '" + path + "'");
    return Mpo(std::move(ts));
}

} // namespace thermalab
