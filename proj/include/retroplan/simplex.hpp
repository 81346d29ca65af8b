#pragma once
// Bounded-variable revised simplex for the MILP relaxations.
//
// Two-phase method: artificial columns are added only for rows whose slack
// cannot start basic within its own bounds, phase 1 drives the signed sum of
// artificials to zero, then phase 2 minimizes the real objective with the
// artificials fixed at zero. The basis inverse is kept as a sparse LU
// factorization (Eigen SparseLU) plus product-form eta updates, refactored on
// a fixed pivot cadence. Pricing is devex with a reference-weight reset at
// every refactorization; after a long run of degenerate pivots the solver
// drops to Bland's rule, which guarantees termination.
//
// Rows are equilibrated by power-of-two max-abs scaling so the factorization
// sees coefficients in [0.5, 1); powers of two keep the scaled data exactly
// representable. Reported duals are mapped back to the unscaled rows and
// follow the d(objective)/d(rhs) sign convention.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "retroplan/errors.hpp"
#include "retroplan/model.hpp"

namespace retroplan {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpOptions {
    double feas_tol = 1e-7;
    double dual_tol = 1e-7;
    double pivot_tol = 1e-9;
    int refactor_every = 50;
    long max_iters = 2000000;
};

struct LpResult {
    LpStatus status = LpStatus::iteration_limit;
    double objective = 0;
    std::vector<double> x;      // structural columns, model order
    std::vector<double> duals;  // per row: d(objective) / d(rhs)
    long iterations = 0;
};

namespace detail {

class BoundedSimplex {
    enum class VStat : uint8_t { lower, upper, basic, free0 };
    struct Eta {
        int r;
        double dr;
        std::vector<std::pair<int, double>> rest;  // off-pivot entries of the direction
    };

public:
    BoundedSimplex(const MilpModel& model, const LpOptions& opt) : model_(model), opt_(opt) {
        m_ = static_cast<int>(model.rows.size());
        nstruct_ = static_cast<int>(model.vars.size());
        build();
    }

    LpResult run() {
        LpResult res;
        for (int j = 0; j < ncols_; ++j)
            if (lo_[j] > up_[j] + opt_.feas_tol) {
                res.status = LpStatus::infeasible;
                return res;
            }
        if (m_ == 0) return solve_unconstrained();

        // phase 1
        if (!arts_.empty()) {
            std::fill(c_.begin(), c_.end(), 0.0);
            for (const auto& [col, sign] : arts_) c_[col] = sign;
            refactorize();
            LpStatus st = iterate(res.iterations);
            if (st == LpStatus::iteration_limit) return res;
            if (st == LpStatus::unbounded) throw NumericalBreakdown("phase 1 became unbounded");
            double infeas = 0;
            for (const auto& [col, sign] : arts_) infeas += sign * xval_[col];
            double b_l1 = 0;
            for (int i = 0; i < m_; ++i) b_l1 += std::abs(b_[i]);
            if (infeas > opt_.feas_tol * (1.0 + b_l1)) {
                res.status = LpStatus::infeasible;
                return res;
            }
            evict_basic_artificials();
            for (const auto& [col, sign] : arts_) {
                lo_[col] = up_[col] = 0;
                if (status_[col] != VStat::basic) {
                    status_[col] = VStat::lower;
                    xval_[col] = 0;
                }
            }
        }

        // phase 2
        for (int j = 0; j < ncols_; ++j) c_[j] = j < nstruct_ ? model_.vars[j].obj : 0.0;
        refactorize();
        LpStatus st = iterate(res.iterations);
        res.status = st;
        if (st != LpStatus::optimal) return res;

        res.x.resize(nstruct_);
        res.objective = model_.obj_constant;
        for (int j = 0; j < nstruct_; ++j) {
            double v = std::clamp(xval_[j], lo_[j], std::min(up_[j], kInf));
            res.x[j] = v;
            res.objective += model_.vars[j].obj * v;
        }
        Eigen::VectorXd cb(m_);
        for (int k = 0; k < m_; ++k) cb[k] = c_[basis_[k]];
        Eigen::VectorXd y = btran(cb);
        res.duals.resize(m_);
        for (int i = 0; i < m_; ++i) res.duals[i] = scale_[i] * y[i];
        return res;
    }

private:
    static constexpr double kInfBound = 0.5 * kInf;

    void build() {
        // row scaling by nearest power of two of the max-abs coefficient
        scale_.assign(m_, 1.0);
        for (int i = 0; i < m_; ++i) {
            double mx = 0;
            for (const auto& [c, v] : model_.rows[i].coeffs) mx = std::max(mx, std::abs(v));
            if (mx > 0) {
                int e;
                std::frexp(mx, &e);
                scale_[i] = std::ldexp(1.0, -e + 1);  // scaled max-abs lands in [0.5, 1)
            }
        }

        // structural columns in CSC layout
        std::vector<int> count(nstruct_, 0);
        size_t nnz = 0;
        for (const auto& row : model_.rows) {
            nnz += row.coeffs.size();
            for (const auto& [c, v] : row.coeffs) ++count[c];
        }
        colstart_.assign(nstruct_ + 1, 0);
        for (int j = 0; j < nstruct_; ++j) colstart_[j + 1] = colstart_[j] + count[j];
        rowidx_.resize(nnz);
        colval_.resize(nnz);
        std::vector<int> fill(colstart_.begin(), colstart_.end() - 1);
        b_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            const auto& row = model_.rows[i];
            b_[i] = row.rhs * scale_[i];
            for (const auto& [c, v] : row.coeffs) {
                rowidx_[fill[c]] = i;
                colval_[fill[c]] = v * scale_[i];
                ++fill[c];
            }
        }

        // bounds: structural, then one slack per row
        art_start_ = nstruct_ + m_;
        ncols_ = art_start_;
        lo_.resize(ncols_);
        up_.resize(ncols_);
        for (int j = 0; j < nstruct_; ++j) {
            lo_[j] = model_.vars[j].lower;
            up_[j] = model_.vars[j].upper;
        }
        for (int i = 0; i < m_; ++i) {
            switch (model_.rows[i].sense) {
                case Sense::le: lo_[nstruct_ + i] = 0, up_[nstruct_ + i] = kInf; break;
                case Sense::ge: lo_[nstruct_ + i] = -kInf, up_[nstruct_ + i] = 0; break;
                case Sense::eq: lo_[nstruct_ + i] = 0, up_[nstruct_ + i] = 0; break;
            }
        }

        status_.assign(ncols_, VStat::lower);
        xval_.assign(ncols_, 0.0);
        for (int j = 0; j < ncols_; ++j) {
            if (lo_[j] > -kInfBound)
                status_[j] = VStat::lower, xval_[j] = lo_[j];
            else if (up_[j] < kInfBound)
                status_[j] = VStat::upper, xval_[j] = up_[j];
            else
                status_[j] = VStat::free0, xval_[j] = 0.0;
        }

        // starting basis: the row's slack when it fits its own bounds at the
        // nonbasic point, an artificial column otherwise
        std::vector<double> resid(b_.begin(), b_.end());
        for (int j = 0; j < nstruct_; ++j)
            if (xval_[j] != 0.0)
                for (int p = colstart_[j]; p < colstart_[j + 1]; ++p)
                    resid[rowidx_[p]] -= colval_[p] * xval_[j];
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            int s = nstruct_ + i;
            if (resid[i] >= lo_[s] && resid[i] <= up_[s]) {
                basis_[i] = s;
                status_[s] = VStat::basic;
                xval_[s] = resid[i];
            } else {
                double sign = resid[i] >= 0 ? 1.0 : -1.0;
                int a = ncols_;
                lo_.push_back(sign > 0 ? 0.0 : -kInf);
                up_.push_back(sign > 0 ? kInf : 0.0);
                status_.push_back(VStat::basic);
                xval_.push_back(resid[i]);
                art_row_.push_back(i);
                arts_.emplace_back(a, sign);
                basis_[i] = a;
                ++ncols_;
            }
        }
        c_.assign(ncols_, 0.0);
        w_.assign(ncols_, 1.0);
    }

    template <class F>
    void for_col(int j, F&& f) const {
        if (j < nstruct_) {
            for (int p = colstart_[j]; p < colstart_[j + 1]; ++p) f(rowidx_[p], colval_[p]);
        } else if (j < art_start_) {
            f(j - nstruct_, 1.0);
        } else {
            f(art_row_[j - art_start_], 1.0);
        }
    }

    Eigen::VectorXd col_dense(int j) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
        for_col(j, [&](int i, double a) { v[i] += a; });
        return v;
    }

    void refactorize() {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(colstart_.back() / std::max(1, nstruct_) * m_ + m_);
        for (int k = 0; k < m_; ++k)
            for_col(basis_[k], [&](int i, double a) { trips.emplace_back(i, k, a); });
        Eigen::SparseMatrix<double> B(m_, m_);
        B.setFromTriplets(trips.begin(), trips.end());
        lu_.compute(B);
        if (lu_.info() != Eigen::Success) {
            // a run of marginal pivots can leave the basis numerically
            // singular; back up to the last good one and raise the pivot floor
            if (restoring_ || !have_snap_ || ++refail_ > 3)
                throw NumericalBreakdown("basis factorization failed");
            basis_ = snap_basis_;
            status_ = snap_status_;
            xval_ = snap_xval_;
            piv_scale_ *= 1e3;
            restoring_ = true;
            refactorize();
            restoring_ = false;
            return;
        }
        etas_.clear();
        pivots_since_refactor_ = 0;
        std::fill(w_.begin(), w_.end(), 1.0);
        recompute_basics();
        snap_basis_ = basis_;
        snap_status_ = status_;
        snap_xval_ = xval_;
        have_snap_ = true;
    }

    void recompute_basics() {
        Eigen::VectorXd resid(m_);
        for (int i = 0; i < m_; ++i) resid[i] = b_[i];
        for (int j = 0; j < ncols_; ++j) {
            if (status_[j] == VStat::basic || xval_[j] == 0.0) continue;
            for_col(j, [&](int i, double a) { resid[i] -= a * xval_[j]; });
        }
        Eigen::VectorXd xb = ftran(resid);
        for (int k = 0; k < m_; ++k) xval_[basis_[k]] = xb[k];
    }

    Eigen::VectorXd ftran(const Eigen::VectorXd& v) const {
        Eigen::VectorXd w = lu_.solve(v);
        for (const auto& e : etas_) {
            double wr = w[e.r] / e.dr;
            w[e.r] = wr;
            if (wr != 0.0)
                for (const auto& [i, d] : e.rest) w[i] -= d * wr;
        }
        return w;
    }

    Eigen::VectorXd btran(const Eigen::VectorXd& v) const {
        Eigen::VectorXd z = v;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double dot = it->dr * z[it->r];
            for (const auto& [i, d] : it->rest) dot += d * z[i];
            z[it->r] = (z[it->r] - dot + it->dr * z[it->r]) / it->dr;
        }
        // SparseLU::transpose() is logically const but not marked so in Eigen 3.4.
        auto& lu = const_cast<Eigen::SparseLU<Eigen::SparseMatrix<double>>&>(lu_);
        return lu.transpose().solve(z);
    }

    void push_eta(int r, const Eigen::VectorXd& d) {
        Eta e;
        e.r = r;
        e.dr = d[r];
        for (int i = 0; i < m_; ++i)
            if (i != r && std::abs(d[i]) > 1e-13) e.rest.emplace_back(i, d[i]);
        etas_.push_back(std::move(e));
        ++pivots_since_refactor_;
    }

    double reduced_cost(int j, const Eigen::VectorXd& y) const {
        double dj = c_[j];
        for_col(j, [&](int i, double a) { dj -= y[i] * a; });
        return dj;
    }

    // entering column, or -1 when dual feasible
    int price(const Eigen::VectorXd& y, double& dj_out) const {
        int best = -1;
        double best_score = 0, best_dj = 0;
        for (int j = 0; j < ncols_; ++j) {
            VStat st = status_[j];
            if (st == VStat::basic || lo_[j] == up_[j]) continue;
            double dj = reduced_cost(j, y);
            bool attractive = (st == VStat::lower && dj < -opt_.dual_tol) ||
                              (st == VStat::upper && dj > opt_.dual_tol) ||
                              (st == VStat::free0 && std::abs(dj) > opt_.dual_tol);
            if (!attractive) continue;
            if (bland_) {
                dj_out = dj;
                return j;
            }
            double score = dj * dj / w_[j];
            if (score > best_score) {
                best_score = score;
                best = j;
                best_dj = dj;
            }
        }
        dj_out = best_dj;
        return best;
    }

    LpStatus iterate(long& iters) {
        long degen_run = 0;
        const long bland_after = 10L * (m_ + ncols_);
        while (true) {
            if (iters >= opt_.max_iters) return LpStatus::iteration_limit;
            if (pivots_since_refactor_ >= opt_.refactor_every) refactorize();

            Eigen::VectorXd cb(m_);
            for (int k = 0; k < m_; ++k) cb[k] = c_[basis_[k]];
            Eigen::VectorXd y = btran(cb);
            double dj = 0;
            int q = price(y, dj);
            if (q < 0) return LpStatus::optimal;
            ++iters;

            double sigma = status_[q] == VStat::upper ? -1.0
                           : status_[q] == VStat::lower ? 1.0
                                                        : (dj < 0 ? 1.0 : -1.0);
            Eigen::VectorXd d = ftran(col_dense(q));

            // two-pass ratio test over basic bounds plus the entering bound
            // span: the first pass finds the largest step that stays within a
            // whisker of every bound, the second takes the biggest pivot among
            // rows whose exact ratio fits under it, so tiny pivots are only
            // accepted when nothing better blocks
            double span = (lo_[q] > -kInfBound && up_[q] < kInfBound) ? up_[q] - lo_[q] : kInf;
            const double min_piv = opt_.pivot_tol * piv_scale_;
            double t_slack = kInf;
            for (int k = 0; k < m_; ++k) {
                double dk = d[k];
                if (std::abs(dk) <= min_piv) continue;
                double delta = -sigma * dk;
                int bi = basis_[k];
                double t;
                if (delta > 0) {
                    if (up_[bi] > kInfBound) continue;
                    t = (up_[bi] - xval_[bi] + 1e-8 * (1.0 + std::abs(up_[bi]))) / delta;
                } else {
                    if (lo_[bi] < -kInfBound) continue;
                    t = (xval_[bi] - lo_[bi] + 1e-8 * (1.0 + std::abs(lo_[bi]))) / (-delta);
                }
                t_slack = std::min(t_slack, std::max(t, 0.0));
            }

            double t_basic = kInf;
            int r = -1;
            double piv_abs = 0;
            for (int k = 0; k < m_; ++k) {
                double dk = d[k];
                if (std::abs(dk) <= min_piv) continue;
                double delta = -sigma * dk;
                int bi = basis_[k];
                double t;
                if (delta > 0) {
                    if (up_[bi] > kInfBound) continue;
                    t = (up_[bi] - xval_[bi]) / delta;
                } else {
                    if (lo_[bi] < -kInfBound) continue;
                    t = (xval_[bi] - lo_[bi]) / (-delta);
                }
                if (t < 0) t = 0;
                if (t > t_slack) continue;
                bool take = r < 0 || (bland_ ? t < t_basic - 1e-9 ||
                                                   (t <= t_basic + 1e-9 && basis_[k] < basis_[r])
                                             : std::abs(dk) > piv_abs);
                if (take) {
                    t_basic = t;
                    r = k;
                    piv_abs = std::abs(dk);
                }
            }

            if (span >= kInfBound && t_basic >= kInfBound) return LpStatus::unbounded;

            if (span <= t_basic) {
                // entering variable flips to its opposite bound; basis unchanged
                for (int k = 0; k < m_; ++k)
                    if (std::abs(d[k]) > opt_.pivot_tol) xval_[basis_[k]] -= sigma * d[k] * span;
                status_[q] = status_[q] == VStat::lower ? VStat::upper : VStat::lower;
                xval_[q] = status_[q] == VStat::lower ? lo_[q] : up_[q];
                degen_run = 0;
                continue;
            }

            double t = t_basic;
            if (!bland_) update_devex(q, r, d);
            for (int k = 0; k < m_; ++k)
                if (std::abs(d[k]) > opt_.pivot_tol) xval_[basis_[k]] -= sigma * d[k] * t;
            xval_[q] += sigma * t;
            int leave = basis_[r];
            double delta_r = -sigma * d[r];
            xval_[leave] = delta_r > 0 ? up_[leave] : lo_[leave];
            status_[leave] = delta_r > 0 ? VStat::upper : VStat::lower;
            if (leave >= art_start_) {
                lo_[leave] = up_[leave] = 0;  // an artificial never re-enters
                xval_[leave] = 0;
                status_[leave] = VStat::lower;
            }
            status_[q] = VStat::basic;
            basis_[r] = q;
            push_eta(r, d);

            if (t <= 1e-9) {
                if (++degen_run > bland_after) bland_ = true;
            } else {
                degen_run = 0;
            }
        }
    }

    void update_devex(int q, int r, const Eigen::VectorXd& d) {
        double alpha_q = d[r];
        if (std::abs(alpha_q) < opt_.pivot_tol) return;
        Eigen::VectorXd er = Eigen::VectorXd::Zero(m_);
        er[r] = 1.0;
        Eigen::VectorXd alpha = btran(er);
        double wq = std::max(w_[q], 1.0);
        for (int j = 0; j < ncols_; ++j) {
            if (status_[j] == VStat::basic || lo_[j] == up_[j] || j == q) continue;
            double aj = 0;
            for_col(j, [&](int i, double a) { aj += alpha[i] * a; });
            if (aj == 0.0) continue;
            double cand = (aj / alpha_q) * (aj / alpha_q) * wq;
            if (cand > w_[j]) w_[j] = cand;
        }
        w_[basis_[r]] = std::max(wq / (alpha_q * alpha_q), 1.0);
    }

    // replaces basic artificials by structural or slack columns where the
    // pivot row allows it, so later duals are not pinned to zero
    void evict_basic_artificials() {
        for (int rrow = 0; rrow < m_; ++rrow) {
            if (basis_[rrow] < art_start_) continue;
            if (pivots_since_refactor_ >= opt_.refactor_every) refactorize();
            Eigen::VectorXd er = Eigen::VectorXd::Zero(m_);
            er[rrow] = 1.0;
            Eigen::VectorXd alpha = btran(er);
            int best = -1;
            double best_abs = 1e-7;
            for (int j = 0; j < art_start_; ++j) {
                if (status_[j] == VStat::basic) continue;
                double aj = 0;
                for_col(j, [&](int i, double a) { aj += alpha[i] * a; });
                if (std::abs(aj) > best_abs) {
                    best_abs = std::abs(aj);
                    best = j;
                }
            }
            if (best < 0) continue;  // dependent row; artificial stays fixed at zero
            Eigen::VectorXd d = ftran(col_dense(best));
            if (std::abs(d[rrow]) < 1e-9) continue;
            int art = basis_[rrow];
            status_[art] = VStat::lower;
            xval_[art] = 0;
            status_[best] = VStat::basic;
            basis_[rrow] = best;
            push_eta(rrow, d);
        }
    }

    LpResult solve_unconstrained() {
        LpResult res;
        res.x.resize(nstruct_);
        res.objective = model_.obj_constant;
        for (int j = 0; j < nstruct_; ++j) {
            double cj = model_.vars[j].obj;
            double v;
            if (cj > 0)
                v = lo_[j];
            else if (cj < 0)
                v = up_[j];
            else
                v = lo_[j] > -kInfBound ? lo_[j] : std::min(up_[j], 0.0);
            if (v > kInfBound || v < -kInfBound) {
                res.status = LpStatus::unbounded;
                return res;
            }
            res.x[j] = v;
            res.objective += cj * v;
        }
        res.status = LpStatus::optimal;
        return res;
    }

    const MilpModel& model_;
    LpOptions opt_;
    int m_ = 0, nstruct_ = 0, ncols_ = 0, art_start_ = 0;

    std::vector<int> colstart_, rowidx_;
    std::vector<double> colval_, b_, scale_;
    std::vector<double> lo_, up_, c_, xval_, w_;
    std::vector<VStat> status_;
    std::vector<int> basis_, art_row_;
    std::vector<std::pair<int, double>> arts_;  // artificial column -> phase-1 cost sign

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    std::vector<Eta> etas_;
    int pivots_since_refactor_ = 0;
    std::vector<int> snap_basis_;
    std::vector<VStat> snap_status_;
    std::vector<double> snap_xval_;
    bool have_snap_ = false, restoring_ = false;
    double piv_scale_ = 1.0;
    int refail_ = 0;
    bool bland_ = false;
};

}  // namespace detail

inline LpResult solve_lp(const MilpModel& model, const LpOptions& opt = {}) {
    return detail::BoundedSimplex(model, opt).run();
}

}  // namespace retroplan
