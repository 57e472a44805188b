#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "numeric.hpp"

namespace bellscope {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    RationalVector x;        // primal solution when feasible
    Rational objective = 0;  // value of the maximized objective
    // When infeasible: y with y.A_j <= 0 for every column j and y.b > 0.
    RationalVector farkas;
};

/// Exact dense-tableau simplex for { A x = b, x >= 0 }, optionally
/// maximizing `objective . x`. Dantzig pricing, falling back to Bland's rule
/// after a run of degenerate pivots.
class ExactSimplex {
  public:
    ExactSimplex(const std::vector<RationalVector> &a, const RationalVector &b)
        : rows_(a.size()), cols_(a.empty() ? 0 : a.front().size()) {
        sign_.assign(rows_, 1);
        tab_.assign(rows_, RationalVector(cols_ + rows_ + 1));
        for (std::size_t i = 0; i < rows_; ++i) {
            if (a[i].size() != cols_)
                throw DimensionMismatchError("ragged constraint matrix");
            if (sgn(b[i]) < 0)
                sign_[i] = -1;
            for (std::size_t j = 0; j < cols_; ++j)
                if (sgn(a[i][j]) != 0)
                    tab_[i][j] = sign_[i] > 0 ? a[i][j] : Rational(-a[i][j]);
            tab_[i][cols_ + i] = 1;
            tab_[i][rhs()] = sign_[i] > 0 ? b[i] : Rational(-b[i]);
        }
        basis_.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            basis_[i] = cols_ + i;
    }

    LpResult solve(const RationalVector *objective = nullptr) {
        LpResult res;
        // Phase 1: minimize the sum of artificials.
        RationalVector cost(cols_ + rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            cost[cols_ + i] = 1;
        set_costs(cost);
        run(/*allow_artificial=*/false);
        if (sgn(tab_obj_[rhs()]) != 0) {
            // tab_obj_[rhs()] holds -(phase-1 optimum); y_i = 1 - reduced cost of artificial i.
            res.status = LpStatus::Infeasible;
            res.farkas.resize(rows_);
            for (std::size_t i = 0; i < rows_; ++i) {
                Rational y = 1 - tab_obj_[cols_ + i];
                res.farkas[i] = sign_[i] > 0 ? y : Rational(-y);
            }
            return res;
        }
        drive_out_artificials();
        if (objective) {
            RationalVector c2(cols_ + rows_);
            for (std::size_t j = 0; j < cols_; ++j)
                c2[j] = -(*objective)[j];
            set_costs(c2);
            if (!run(false)) {
                res.status = LpStatus::Unbounded;
                return res;
            }
        }
        res.status = LpStatus::Optimal;
        res.x.assign(cols_, Rational(0));
        for (std::size_t i = 0; i < rows_; ++i)
            if (basis_[i] < cols_)
                res.x[basis_[i]] = tab_[i][rhs()];
        if (objective)
            res.objective = dot(*objective, res.x);
        return res;
    }

  private:
    std::size_t rhs() const { return cols_ + rows_; }

    void set_costs(const RationalVector &cost) {
        cost_ = cost;
        tab_obj_.assign(cols_ + rows_ + 1, Rational(0));
        for (std::size_t j = 0; j < cols_ + rows_; ++j)
            tab_obj_[j] = cost[j];
        for (std::size_t i = 0; i < rows_; ++i) {
            const Rational &cb = cost[basis_[i]];
            if (sgn(cb) == 0)
                continue;
            for (std::size_t j = 0; j <= rhs(); ++j)
                if (sgn(tab_[i][j]) != 0)
                    tab_obj_[j] -= cb * tab_[i][j];
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        Rational inv = 1 / tab_[r][c];
        auto &prow = tab_[r];
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j <= rhs(); ++j)
            if (sgn(prow[j]) != 0) {
                prow[j] *= inv;
                nz.push_back(j);
            }
        auto eliminate = [&](RationalVector &row) {
            if (sgn(row[c]) == 0)
                return;
            Rational f = row[c];
            for (auto j : nz)
                row[j] -= f * prow[j];
        };
        for (std::size_t i = 0; i < rows_; ++i)
            if (i != r)
                eliminate(tab_[i]);
        eliminate(tab_obj_);
        basis_[r] = c;
    }

    // Returns false on unboundedness.
    bool run(bool allow_artificial) {
        std::size_t limit = allow_artificial ? cols_ + rows_ : cols_;
        int degenerate_run = 0;
        while (true) {
            bool bland = degenerate_run > 50;
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j) {
                if (sgn(tab_obj_[j]) >= 0)
                    continue;
                if (enter == limit || (!bland && tab_obj_[j] < tab_obj_[enter]))
                    enter = j;
                if (bland)
                    break;
            }
            if (enter == limit)
                return true;
            std::size_t leave = rows_;
            Rational best;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (sgn(tab_[i][enter]) <= 0)
                    continue;
                Rational ratio = tab_[i][rhs()] / tab_[i][enter];
                if (leave == rows_ || ratio < best ||
                    (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows_)
                return false;
            degenerate_run = sgn(best) == 0 ? degenerate_run + 1 : 0;
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < rows_; ++i) {
            if (basis_[i] < cols_)
                continue;
            for (std::size_t j = 0; j < cols_; ++j)
                if (sgn(tab_[i][j]) != 0) {
                    pivot(i, j);
                    break;
                }
        }
    }

    std::size_t rows_, cols_;
    std::vector<int> sign_;
    std::vector<RationalVector> tab_;
    RationalVector tab_obj_;
    RationalVector cost_;
    std::vector<std::size_t> basis_;
};

inline LpResult solve_lp(const std::vector<RationalVector> &a, const RationalVector &b,
                         const RationalVector *objective = nullptr) {
    ExactSimplex lp(a, b);
    return lp.solve(objective);
}

/// Convex-combination test: weights w >= 0 with sum w = 1 and sum w_i p_i = q,
/// or a separating functional (g, g0) with g.p_i <= g0 for all i and g.q > g0.
struct ConvexMembership {
    bool inside = false;
    RationalVector weights;
    RationalVector separator;
    Rational separator_bound;
};

inline ConvexMembership convex_membership(const std::vector<const RationalVector *> &points,
                                          const RationalVector &q) {
    const std::size_t dim = q.size();
    std::vector<RationalVector> a(dim + 1, RationalVector(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j) {
        for (std::size_t i = 0; i < dim; ++i)
            a[i][j] = (*points[j])[i];
        a[dim][j] = 1;
    }
    RationalVector b(q);
    b.push_back(1);
    auto res = solve_lp(a, b);
    ConvexMembership out;
    if (res.status == LpStatus::Optimal) {
        out.inside = true;
        out.weights = std::move(res.x);
        return out;
    }
    // y.(p_j,1) <= 0 for all j and y.(q,1) > 0: g = y[0..dim), g0 = -y[dim].
    out.separator.assign(res.farkas.begin(), res.farkas.begin() + static_cast<long>(dim));
    out.separator_bound = -res.farkas[dim];
    return out;
}

} // namespace bellscope
