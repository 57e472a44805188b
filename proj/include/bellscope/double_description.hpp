#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "linalg.hpp"
#include "numeric.hpp"
#include "polytope.hpp"

namespace bellscope {

/// Fixed-size bitset with word-level subset tests.
class RowSet {
  public:
    RowSet() = default;
    explicit RowSet(std::size_t bits) : words_((bits + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

    static RowSet intersection(const RowSet &a, const RowSet &b) {
        RowSet r;
        r.words_.resize(a.words_.size());
        for (std::size_t i = 0; i < a.words_.size(); ++i)
            r.words_[i] = a.words_[i] & b.words_[i];
        return r;
    }

    static std::size_t intersection_count(const RowSet &a, const RowSet &b) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < a.words_.size(); ++i)
            c += static_cast<std::size_t>(__builtin_popcountll(a.words_[i] & b.words_[i]));
        return c;
    }

    bool subset_of(const RowSet &o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i])
                return false;
        return true;
    }

    template <class F> void for_each(F &&f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            auto bits = words_[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                f(w * 64 + static_cast<std::size_t>(b));
                bits &= bits - 1;
            }
        }
    }

    friend bool operator==(const RowSet &, const RowSet &) = default;

  private:
    std::vector<std::uint64_t> words_;
};

struct DDOptions {
    double budget_seconds = 0;   // 0: unlimited
    std::string checkpoint_path; // written when the budget runs out
    std::string resume_path;     // state to resume from
    bool reverse_insertion = false;
    unsigned threads = 1;
};

/// Double description method for the pointed cone { x : row . x >= 0 }.
/// Rows are homogeneous integer constraints; the result is the set of
/// extreme rays as primitive integer vectors.
class DoubleDescription {
  public:
    DoubleDescription(std::vector<std::vector<long>> rows, DDOptions opts = {})
        : rows_(std::move(rows)), opts_(std::move(opts)) {
        if (rows_.empty())
            throw PreconditionError("double description needs at least one constraint");
        dim_ = rows_.front().size();
    }

    std::vector<IntegerVector> run() {
        auto start = std::chrono::steady_clock::now();
        if (!opts_.resume_path.empty())
            load_checkpoint(opts_.resume_path);
        else
            initialize();
        const std::size_t first = processed_;
        while (processed_ < order_.size()) {
            // at least one row per run, so chained resumes always advance
            if (opts_.budget_seconds > 0 && processed_ > first) {
                double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (elapsed > opts_.budget_seconds) {
                    if (!opts_.checkpoint_path.empty())
                        save_checkpoint(opts_.checkpoint_path);
                    throw BudgetExhaustedError("double description exceeded its budget after " +
                                                   std::to_string(processed_) + " of " +
                                                   std::to_string(order_.size()) + " constraints",
                                               opts_.checkpoint_path);
                }
            }
            add_row(processed_);
            ++processed_;
        }
        std::vector<IntegerVector> out;
        out.reserve(rays_.size());
        for (auto &r : rays_)
            out.push_back(r.x);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t max_intermediate_rays() const { return max_rays_; }

  private:
    struct Ray {
        IntegerVector x;
        RowSet zeros; // positions (in insertion order) of tight processed rows
    };

    Integer eval(std::size_t row, const IntegerVector &x) const {
        Integer acc = 0;
        const auto &a = rows_[row];
        for (std::size_t j = 0; j < dim_; ++j) {
            long c = a[j];
            if (c > 0)
                mpz_addmul_ui(acc.get_mpz_t(), x[j].get_mpz_t(), static_cast<unsigned long>(c));
            else if (c < 0)
                mpz_submul_ui(acc.get_mpz_t(), x[j].get_mpz_t(), static_cast<unsigned long>(-c));
        }
        return acc;
    }

    void initialize() {
        // Insertion order: lexicographic on the rows (optionally reversed);
        // the first `dim_` independent rows form the initial simplicial cone.
        std::vector<std::size_t> idx(rows_.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return rows_[a] < rows_[b]; });
        if (opts_.reverse_insertion)
            std::reverse(idx.begin(), idx.end());
        IncrementalBasis basis(dim_);
        std::vector<std::size_t> initial, rest;
        for (auto i : idx) {
            IntegerVector v(rows_[i].begin(), rows_[i].end());
            if (initial.size() < dim_ && basis.add(v))
                initial.push_back(i);
            else
                rest.push_back(i);
        }
        if (initial.size() < dim_)
            throw PreconditionError("constraint rows do not span the space; the cone is not pointed");
        order_ = initial;
        order_.insert(order_.end(), rest.begin(), rest.end());

        // Rays of { x : A0 x >= 0 } are the columns of A0^{-1}.
        std::vector<RationalVector> a0(dim_, RationalVector(dim_));
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                a0[i][j] = rows_[initial[i]][j];
        for (std::size_t c = 0; c < dim_; ++c) {
            RationalVector e(dim_);
            e[c] = 1;
            auto col = solve(a0, e);
            if (!col)
                throw PreconditionError("singular initial basis");
            Ray r{to_primitive_integers(*col), RowSet(order_.size())};
            for (std::size_t i = 0; i < dim_; ++i)
                if (i != c)
                    r.zeros.set(i);
            rays_.push_back(std::move(r));
        }
        processed_ = dim_;
    }

    void add_row(std::size_t pos) {
        const std::size_t row = order_[pos];
        std::vector<Integer> value(rays_.size());
        std::vector<std::size_t> plus, minus, zero;
        for (std::size_t i = 0; i < rays_.size(); ++i) {
            value[i] = eval(row, rays_[i].x);
            int s = sgn(value[i]);
            (s > 0 ? plus : s < 0 ? minus : zero).push_back(i);
        }
        if (minus.empty()) {
            for (auto i : zero)
                rays_[i].zeros.set(pos);
            return;
        }

        // Inverted index: rays tight on each processed row.
        std::vector<std::vector<std::uint32_t>> tight(pos);
        for (std::size_t i = 0; i < rays_.size(); ++i)
            rays_[i].zeros.for_each([&](std::size_t b) {
                if (b < pos)
                    tight[b].push_back(static_cast<std::uint32_t>(i));
            });

        const std::size_t need = dim_ - 2;
        auto adjacent = [&](std::size_t p, std::size_t q, const RowSet &common) {
            // Scan the shortest tight-list among the common rows.
            std::size_t best = std::numeric_limits<std::size_t>::max(), best_len = best;
            common.for_each([&](std::size_t b) {
                if (tight[b].size() < best_len) {
                    best_len = tight[b].size();
                    best = b;
                }
            });
            if (best == std::numeric_limits<std::size_t>::max())
                return true;
            for (auto r : tight[best]) {
                if (r == p || r == q)
                    continue;
                if (common.subset_of(rays_[r].zeros))
                    return false;
            }
            return true;
        };

        auto work = [&](std::size_t begin, std::size_t end, std::vector<Ray> &out) {
            for (std::size_t pi = begin; pi < end; ++pi) {
                const std::size_t p = plus[pi];
                for (auto q : minus) {
                    if (RowSet::intersection_count(rays_[p].zeros, rays_[q].zeros) < need)
                        continue;
                    RowSet common = RowSet::intersection(rays_[p].zeros, rays_[q].zeros);
                    if (!adjacent(p, q, common))
                        continue;
                    Ray nr;
                    nr.x.resize(dim_);
                    const Integer &vp = value[p];
                    Integer vq = -value[q];
                    for (std::size_t j = 0; j < dim_; ++j)
                        nr.x[j] = vp * rays_[q].x[j] + vq * rays_[p].x[j];
                    make_primitive(nr.x);
                    common.set(pos);
                    nr.zeros = std::move(common);
                    out.push_back(std::move(nr));
                }
            }
        };

        std::vector<Ray> created;
        unsigned threads = std::max(1u, opts_.threads);
        if (threads == 1 || plus.size() < 2 * threads) {
            work(0, plus.size(), created);
        } else {
            std::vector<std::vector<Ray>> parts(threads);
            std::vector<std::thread> pool;
            std::size_t chunk = (plus.size() + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t) {
                std::size_t b = std::min(plus.size(), t * chunk), e = std::min(plus.size(), b + chunk);
                pool.emplace_back([&, b, e, t] { work(b, e, parts[t]); });
            }
            for (auto &th : pool)
                th.join();
            for (auto &part : parts)
                for (auto &r : part)
                    created.push_back(std::move(r));
        }

        std::vector<Ray> next;
        next.reserve(plus.size() + zero.size() + created.size());
        for (std::size_t i = 0; i < rays_.size(); ++i) {
            int s = sgn(value[i]);
            if (s > 0) {
                next.push_back(std::move(rays_[i]));
            } else if (s == 0) {
                rays_[i].zeros.set(pos);
                next.push_back(std::move(rays_[i]));
            }
        }
        for (auto &r : created)
            next.push_back(std::move(r));
        rays_ = std::move(next);
        max_rays_ = std::max(max_rays_, rays_.size());
    }

    std::uint64_t fingerprint() const {
        std::uint64_t h = 1469598103934665603ull;
        for (const auto &r : rows_)
            for (long v : r) {
                h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
                h *= 1099511628211ull;
            }
        return h;
    }

    void save_checkpoint(const std::string &path) const {
        nlohmann::json j;
        j["format"] = "bellscope-dd-checkpoint-1";
        j["fingerprint"] = std::to_string(fingerprint());
        j["order"] = order_;
        j["processed"] = processed_;
        auto &rays = j["rays"] = nlohmann::json::array();
        for (const auto &r : rays_) {
            nlohmann::json v = nlohmann::json::array();
            for (const auto &x : r.x)
                v.push_back(x.get_str());
            rays.push_back(std::move(v));
        }
        std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            out << j.dump();
            if (!out)
                throw Error("cannot write checkpoint " + tmp);
        }
        std::rename(tmp.c_str(), path.c_str());
    }

    void load_checkpoint(const std::string &path) {
        std::ifstream in(path);
        if (!in)
            throw Error("cannot read checkpoint " + path);
        nlohmann::json j = nlohmann::json::parse(in);
        if (j.at("format") != "bellscope-dd-checkpoint-1")
            throw ParseError("not a double-description checkpoint: " + path);
        if (j.at("fingerprint").get<std::string>() != std::to_string(fingerprint()))
            throw PreconditionError("checkpoint " + path + " belongs to a different input");
        order_ = j.at("order").get<std::vector<std::size_t>>();
        processed_ = j.at("processed").get<std::size_t>();
        rays_.clear();
        for (const auto &v : j.at("rays")) {
            Ray r{IntegerVector{}, RowSet(order_.size())};
            for (const auto &x : v)
                r.x.emplace_back(x.get<std::string>());
            for (std::size_t pos = 0; pos < processed_; ++pos)
                if (sgn(eval(order_[pos], r.x)) == 0)
                    r.zeros.set(pos);
            rays_.push_back(std::move(r));
        }
    }

    std::vector<std::vector<long>> rows_;
    DDOptions opts_;
    std::size_t dim_ = 0;
    std::vector<std::size_t> order_;
    std::size_t processed_ = 0;
    std::vector<Ray> rays_;
    std::size_t max_rays_ = 0;
};

/// Facets of conv(vertices) computed inside the affine hull. Each facet is
/// expressed in the ambient coordinates with zero coefficients outside the
/// hull's pivot coordinates; hull equalities are reported separately.
struct FacetEnumeration {
    std::vector<Inequality> facets;
    std::vector<std::pair<RationalVector, Rational>> equalities;
    std::size_t hull_dimension = 0;
    std::size_t max_intermediate_rays = 0;
};

namespace detail {

inline std::vector<long> to_long_row(std::span<const Rational> v) {
    auto ints = to_primitive_integers(v);
    std::vector<long> out;
    out.reserve(ints.size());
    for (const auto &x : ints) {
        if (!x.fits_slong_p())
            throw TooLargeError("coordinate does not fit a machine integer");
        out.push_back(x.get_si());
    }
    return out;
}

} // namespace detail

inline FacetEnumeration facet_enumeration(const Polytope &poly, const DDOptions &opts = {}) {
    const auto &hull = poly.hull();
    FacetEnumeration res;
    res.equalities = hull.equalities;
    res.hull_dimension = hull.dimension();
    const std::size_t d = hull.dimension();
    if (d == 0)
        return res;
    std::vector<std::vector<long>> rows;
    rows.reserve(poly.size());
    for (const auto &v : poly.vertices()) {
        RationalVector h;
        h.reserve(d + 1);
        h.push_back(1);
        for (auto c : hull.pivots)
            h.push_back(v[c]);
        rows.push_back(detail::to_long_row(h));
    }
    DoubleDescription dd(std::move(rows), opts);
    auto rays = dd.run();
    res.max_intermediate_rays = dd.max_intermediate_rays();
    for (const auto &x : rays) {
        // x0 + x'.y >= 0  <=>  (-x').y <= x0
        Inequality f;
        f.coeffs.assign(poly.ambient_dimension(), Rational(0));
        for (std::size_t j = 0; j < d; ++j)
            f.coeffs[hull.pivots[j]] = Rational(-x[j + 1]);
        f.bound = Rational(x[0]);
        f.param = poly.param();
        f.symmetric_basis = poly.symmetric_basis();
        f.provenance = "facet-enumeration";
        res.facets.push_back(normalized(std::move(f)));
    }
    std::sort(res.facets.begin(), res.facets.end());
    return res;
}

} // namespace bellscope
