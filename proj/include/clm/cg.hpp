#pragma once

#include <cstddef>
#include <vector>

#include "clm/util.hpp"

namespace clm {

struct CgOptions {
    double abs_tol = 0.0;    // stop when ||r||_2 <= abs_tol (0 disables)
    double rel_tol = 1e-10;  // stop when ||r||_2 <= rel_tol*||b||_2
    int max_iter = 10000;
    bool record_history = false;
    bool throw_on_fail = true;
};

struct CgResult {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  // final ||b - A x||_2
    std::vector<double> history;
};

/// Preconditioned conjugate gradient for SPD operators.
/// `apply(x, y)` writes A*x into y; `precond(r, z)` writes M^{-1}*r into z.
template <class Apply, class Precond>
CgResult conjugate_gradient(const Apply& apply, const Precond& precond,
                            const std::vector<double>& b, std::vector<double>& x,
                            const CgOptions& opt = {}) {
    const std::size_t n = b.size();
    x.assign(n, 0.0);
    const double bnorm = l2_norm(b);
    const double stop = std::max(opt.abs_tol, opt.rel_tol * bnorm);

    CgResult out;
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }

    std::vector<double> r = b;  // r = b - A*0
    std::vector<double> z(n), p(n), q(n);
    precond(r, z);
    p = z;
    double rz = dot(r, z);
    double rnorm = bnorm;
    if (opt.record_history) out.history.push_back(rnorm);

    int it = 0;
    while (rnorm > stop && it < opt.max_iter) {
        ++it;
        apply(p, q);
        const double pq = dot(p, q);
        if (pq <= 0.0) break;  // loss of positive definiteness
        const double alpha = rz / pq;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        rnorm = l2_norm(r);
        if (opt.record_history) out.history.push_back(rnorm);
        if (rnorm <= stop) break;
        precond(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    out.iterations = it;
    out.residual = rnorm;
    out.converged = rnorm <= stop;
    if (!out.converged && opt.throw_on_fail)
        throw SolveError("conjugate gradient failed to converge", out.residual, it);
    return out;
}

}  // namespace clm
