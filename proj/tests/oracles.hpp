#pragma once

// Reference implementations used to cross-check the library. They share
// no code with it beyond the Interval type and the order predicate.

#include <cmath>
#include <cstddef>
#include <vector>

#include "cfrbc/interval.hpp"

namespace oracle {

/// ceil((n+1)(100-p)/100) in integer arithmetic, i.e. the conformal rank
/// for significance p/100.
inline std::size_t rank_percent(std::size_t n, int p) {
    const std::size_t num = (n + 1) * static_cast<std::size_t>(100 - p);
    return (num + 99) / 100;
}

/// k-th smallest (1-based) element under `leq` by counting, without
/// sorting: the element with #{strictly below} < k <= #{at or below}.
inline cfrbc::Interval select_kth(const std::vector<cfrbc::Interval>& pool, std::size_t k,
                                  const cfrbc::OrderParams& p) {
    for (const auto& e : pool) {
        std::size_t below = 0, at_or_below = 0;
        for (const auto& o : pool) {
            const bool le = cfrbc::leq_admissible(o, e, p);
            const bool ge = cfrbc::leq_admissible(e, o, p);
            if (le && !ge) ++below;
            if (le) ++at_or_below;
        }
        if (below < k && k <= at_or_below) return e;
    }
    return {1.0, 1.0};
}

inline cfrbc::Interval conformal_quantile(const std::vector<cfrbc::Interval>& pool, int p,
                                          const cfrbc::OrderParams& order) {
    const std::size_t k = rank_percent(pool.size(), p);
    if (k > pool.size()) return {1.0, 1.0};
    return select_kth(pool, k, order);
}

/// Multiclass Matthews correlation from its definition as the Pearson
/// correlation between one-hot truth and one-hot prediction vectors,
/// accumulated sample by sample. `m[t][q]` counts samples of true class t
/// predicted as q; predicted columns may outnumber true rows.
inline double mcc(const std::vector<std::vector<std::size_t>>& m) {
    const std::size_t rows = m.size();
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    const std::size_t k = std::max(rows, cols);
    long double n = 0;
    std::vector<long double> t_mean(k, 0), p_mean(k, 0);
    for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t q = 0; q < cols; ++q) {
            n += m[t][q];
            t_mean[t] += m[t][q];
            p_mean[q] += m[t][q];
        }
    }
    if (n == 0) return 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        t_mean[c] /= n;
        p_mean[c] /= n;
    }
    long double cov = 0, var_t = 0, var_p = 0;
    for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t q = 0; q < cols; ++q) {
            if (m[t][q] == 0) continue;
            long double ct = 0, tt = 0, pp = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const long double dt = (c == t ? 1.0L : 0.0L) - t_mean[c];
                const long double dp = (c == q ? 1.0L : 0.0L) - p_mean[c];
                ct += dt * dp;
                tt += dt * dt;
                pp += dp * dp;
            }
            cov += m[t][q] * ct;
            var_t += m[t][q] * tt;
            var_p += m[t][q] * pp;
        }
    }
    if (var_t == 0 || var_p == 0) return 0.0;
    return static_cast<double>(cov / std::sqrt(var_t * var_p));
}

}  // namespace oracle
