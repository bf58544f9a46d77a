#include "twave/kernels.hpp"

#include <cmath>
#include <limits>

namespace twave {

namespace {

inline StepStats better(const StepStats& a, const StepStats& b) {
    if (a.min_density < b.min_density) return a;
    if (b.min_density < a.min_density) return b;
    if (a.min_cell < 0) return b;
    if (b.min_cell < 0) return a;
    return a.min_cell <= b.min_cell ? a : b;
}

// Update of cell i from neighbours im and ip. The u_l update is the mirror image
// of the u_r update term by term, so reflected data stay exactly reflected.
inline void update_cell(const double* dr, const double* dl, double* out_r, double* out_l, long im, long i, long ip,
                        double base, const StepCoefficients& c) {
    const double r = dr[i];
    const double l = dl[i];
    double nr = r - c.half_nu * (dr[ip] - dr[im]) + c.k * ((dr[ip] + dr[im]) - 2.0 * r);
    double nl = l - c.half_nu * (dl[im] - dl[ip]) + c.k * ((dl[im] + dl[ip]) - 2.0 * l);
    if (c.half_rdt != 0.0) {
        const double ur = base + r;
        const double ul = base + l;
        double crowd = 1.0;
        if (c.beta != 0.0) {
            const double bu = c.beta * (2.0 * base + (r + l));
            crowd = std::exp(-bu * bu);
        }
        const double f = alignment_pde(ur, ul, r - l, crowd);
        nr += c.half_rdt * f;
        nl -= c.half_rdt * f;
    }
    out_r[i] = nr;
    out_l[i] = nl;
}

inline StepStats cell_stats(double base, const double* out_r, const double* out_l, long i) {
    const double a = base + out_r[i];
    const double b = base + out_l[i];
    return a <= b ? StepStats{a, i} : StepStats{b, i};
}

inline void edge_cells(const FieldPair& in, FieldPair& out, const StepCoefficients& c) {
    const long n = in.size();
    const long last = n - 1;
    const long left_of_first = c.periodic ? last : 0;
    const long right_of_last = c.periodic ? 0 : last;
    update_cell(in.dr.data(), in.dl.data(), out.dr.data(), out.dl.data(), left_of_first, 0, 1, in.base, c);
    update_cell(in.dr.data(), in.dl.data(), out.dr.data(), out.dl.data(), last - 1, last, right_of_last, in.base, c);
}

}  // namespace

StepStats step_serial(const FieldPair& in, FieldPair& out, const StepCoefficients& c) {
    const long n = in.size();
    out.base = in.base;
    const double* dr = in.dr.data();
    const double* dl = in.dl.data();
    double* orr = out.dr.data();
    double* ol = out.dl.data();
    for (long i = 1; i < n - 1; ++i) {
        update_cell(dr, dl, orr, ol, i - 1, i, i + 1, in.base, c);
    }
    edge_cells(in, out, c);
    StepStats s{std::numeric_limits<double>::infinity(), -1};
    for (long i = 0; i < n; ++i) {
        s = better(s, cell_stats(in.base, orr, ol, i));
    }
    return s;
}

#pragma omp declare reduction(minstat : StepStats : omp_out = better(omp_out, omp_in)) \
    initializer(omp_priv = StepStats{std::numeric_limits<double>::infinity(), -1})

StepStats step_parallel(const FieldPair& in, FieldPair& out, const StepCoefficients& c) {
    const long n = in.size();
    out.base = in.base;
    const double* dr = in.dr.data();
    const double* dl = in.dl.data();
    double* orr = out.dr.data();
    double* ol = out.dl.data();
    const double base = in.base;
    edge_cells(in, out, c);
    StepStats s{std::numeric_limits<double>::infinity(), -1};
    s = better(s, cell_stats(base, orr, ol, 0));
    s = better(s, cell_stats(base, orr, ol, n - 1));
#pragma omp parallel for schedule(static) reduction(minstat : s)
    for (long i = 1; i < n - 1; ++i) {
        update_cell(dr, dl, orr, ol, i - 1, i, i + 1, base, c);
        s = better(s, cell_stats(base, orr, ol, i));
    }
    return s;
}

}  // namespace twave
