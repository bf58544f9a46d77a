#include "twave/waveanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "twave/errors.hpp"

namespace twave {

std::string to_string(Field f) {
    switch (f) {
        case Field::U: return "u";
        case Field::W: return "w";
        case Field::AbsW: return "|w|";
    }
    return "?";
}

std::string to_string(Direction d) { return d == Direction::RightMoving ? "right" : "left"; }

std::string to_string(StateLabel s) {
    switch (s) {
        case StateLabel::NonPolarized: return "N";
        case StateLabel::PolarizedPlus: return "P+";
        case StateLabel::PolarizedMinus: return "P-";
        case StateLabel::Depleted: return "D";
        case StateLabel::Transition: return "T";
    }
    return "?";
}

std::string to_string(FrontKind k) {
    switch (k) {
        case FrontKind::Leading: return "leading";
        case FrontKind::Inversion: return "inversion";
        case FrontKind::Diffusion: return "diffusion";
    }
    return "?";
}

namespace {

double field_value(const FieldPair& f, long i, Field field) {
    switch (field) {
        case Field::U: return f.u(i);
        case Field::W: return f.w(i);
        case Field::AbsW: return std::abs(f.w(i));
    }
    return 0.0;
}

// Central difference, one-sided at the ends.
template <class G>
double derivative(G&& g, long i, long n, double dx) {
    if (n < 2) return 0.0;
    if (i == 0) return (g(1) - g(0)) / dx;
    if (i == n - 1) return (g(n - 1) - g(n - 2)) / dx;
    return (g(i + 1) - g(i - 1)) / (2.0 * dx);
}

double du(const FieldPair& f, long i, double dx) {
    return derivative([&f](long j) { return f.u(j); }, i, f.size(), dx);
}

double dw(const FieldPair& f, long i, double dx) {
    return derivative([&f](long j) { return f.w(j); }, i, f.size(), dx);
}

// Crossings of g - level between cells lo and hi (inclusive), skipping exact zeros.
template <class G>
std::vector<double> crossings(G&& g, const Grid& grid, long lo, long hi, double level) {
    std::vector<double> out;
    long prev = -1;
    double prev_v = 0.0;
    for (long i = lo; i <= hi; ++i) {
        const double v = g(i) - level;
        if (v == 0.0) continue;
        if (prev >= 0 && ((prev_v < 0.0) != (v < 0.0))) {
            const double s = prev_v / (prev_v - v);
            const double x0 = grid.x(prev);
            const double x1 = grid.x(i);
            out.push_back(x0 + s * (x1 - x0));
        }
        prev = i;
        prev_v = v;
    }
    return out;
}

// Greedy nearest-neighbour matching of open tracks to new positions.
// Returns, for each position, the index of the matched track or -1.
std::vector<long> match(const std::vector<double>& track_x, const std::vector<double>& xs, double window) {
    std::vector<std::tuple<double, long, long>> pairs;
    for (long a = 0; a < static_cast<long>(track_x.size()); ++a) {
        for (long b = 0; b < static_cast<long>(xs.size()); ++b) {
            const double d = std::abs(track_x[a] - xs[b]);
            if (d <= window) pairs.emplace_back(d, a, b);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<long> by_pos(xs.size(), -1);
    std::vector<bool> used(track_x.size(), false);
    for (const auto& [d, a, b] : pairs) {
        if (used[a] || by_pos[b] >= 0) continue;
        used[a] = true;
        by_pos[b] = a;
    }
    return by_pos;
}

void finish_track(FrontTrack& t, double discard) {
    const auto& s = t.samples;
    const double dx = s.back().x - s.front().x;
    t.side = dx != 0.0 ? (dx > 0.0 ? Direction::RightMoving : Direction::LeftMoving)
                       : (s.front().x >= 0.0 ? Direction::RightMoving : Direction::LeftMoving);
    try {
        const auto fit = fit_speed(t, discard);
        t.c_fit = fit.c;
        t.stderr_fit = fit.std_error;
    } catch (const InsufficientDataError&) {
    }
}

}  // namespace

std::vector<double> level_crossings(const FieldPair& f, const Grid& grid, Field field, double level) {
    return crossings([&](long i) { return field_value(f, i, field); }, grid, 0, f.size() - 1, level);
}

std::vector<FrontTrack> detect_fronts(const std::vector<Snapshot>& snaps, const Grid& grid, Field field, double level,
                                      double c_max) {
    if (snaps.size() < 4) {
        throw InsufficientDataError("front detection needs at least 4 snapshots");
    }
    std::vector<FrontTrack> done;
    std::vector<FrontTrack> open;
    double t_prev = snaps.front().time;
    for (const auto& snap : snaps) {
        const auto xs = level_crossings(snap.f, grid, field, level);
        const double window = 2.0 * c_max * (snap.time - t_prev);
        t_prev = snap.time;
        std::vector<double> last_x;
        for (const auto& t : open) last_x.push_back(t.samples.back().x);
        const auto m = match(last_x, xs, window);
        std::vector<bool> continued(open.size(), false);
        std::vector<FrontTrack> born;
        for (size_t b = 0; b < xs.size(); ++b) {
            if (m[b] >= 0) {
                open[m[b]].samples.push_back({snap.time, xs[b]});
                continued[m[b]] = true;
            } else {
                FrontTrack t;
                t.level = level;
                t.samples.push_back({snap.time, xs[b]});
                born.push_back(std::move(t));
            }
        }
        std::vector<FrontTrack> still;
        for (size_t a = 0; a < open.size(); ++a) {
            if (continued[a]) {
                still.push_back(std::move(open[a]));
            } else {
                open[a].complete = false;
                done.push_back(std::move(open[a]));
            }
        }
        for (auto& t : born) still.push_back(std::move(t));
        open = std::move(still);
    }
    for (auto& t : open) done.push_back(std::move(t));
    for (auto& t : done) finish_track(t, 0.3);
    std::sort(done.begin(), done.end(), [](const FrontTrack& a, const FrontTrack& b) {
        return std::make_pair(a.samples.front().t, a.samples.front().x) <
               std::make_pair(b.samples.front().t, b.samples.front().x);
    });
    return done;
}

SpeedFit fit_speed(const FrontTrack& track, double discard) {
    if (track.samples.empty()) {
        throw InsufficientDataError("empty front track");
    }
    const double t0 = track.samples.front().t;
    const double t1 = track.samples.back().t;
    const double cut = t0 + discard * (t1 - t0);
    std::vector<TrackSample> s;
    for (const auto& p : track.samples) {
        if (p.t >= cut) s.push_back(p);
    }
    if (s.size() < 4) {
        std::ostringstream msg;
        msg << "speed fit needs 4 samples after the transient, got " << s.size();
        throw InsufficientDataError(msg.str());
    }
    const double n = static_cast<double>(s.size());
    double mt = 0.0;
    double mx = 0.0;
    for (const auto& p : s) {
        mt += p.t;
        mx += p.x;
    }
    mt /= n;
    mx /= n;
    double stt = 0.0;
    double stx = 0.0;
    for (const auto& p : s) {
        stt += (p.t - mt) * (p.t - mt);
        stx += (p.t - mt) * (p.x - mx);
    }
    if (!(stt > 0.0)) {
        throw InsufficientDataError("speed fit needs distinct sample times");
    }
    SpeedFit fit;
    fit.c = stx / stt;
    double ssr = 0.0;
    for (const auto& p : s) {
        const double r = p.x - (mx + fit.c * (p.t - mt));
        ssr += r * r;
    }
    fit.std_error = std::sqrt(ssr / (n - 2.0) / stt);
    fit.used = static_cast<int>(s.size());
    return fit;
}

std::vector<Plateau> extract_plateaus(const FieldPair& f, const Grid& grid, double grad_tol, long min_cells,
                                      long max_gap) {
    const long n = f.size();
    const double dx = grid.dx();
    std::vector<double> g(n);
    std::vector<bool> flat(n);
    for (long i = 0; i < n; ++i) {
        g[i] = std::max(std::abs(du(f, i, dx)), std::abs(dw(f, i, dx)));
        flat[i] = g[i] < grad_tol;
    }
    // Runs of flat cells, then join runs separated by short gaps when the level
    // on both sides of the gap agrees (isolated spikes, not steps).
    std::vector<std::pair<long, long>> runs;
    auto same_level = [&](long last, long next) {
        const double allowed = grad_tol * dx * static_cast<double>(next - last);
        return std::abs(f.u(next) - f.u(last)) <= allowed && std::abs(f.w(next) - f.w(last)) <= allowed;
    };
    for (long i = 0; i < n;) {
        if (!flat[i]) {
            ++i;
            continue;
        }
        long j = i;
        while (j < n && flat[j]) ++j;
        if (j - i <= max_gap && i > 0 && j < n) {
            i = j;  // a flat cell or two inside a disturbance belongs to the gap
            continue;
        }
        if (!runs.empty() && i - runs.back().second <= max_gap && same_level(runs.back().second - 1, i)) {
            runs.back().second = j;
        } else {
            runs.emplace_back(i, j);
        }
        i = j;
    }
    std::vector<Plateau> out;
    for (const auto& [b, e] : runs) {
        if (e - b < min_cells) continue;
        Plateau p;
        p.begin = b;
        p.end = e;
        p.x_begin = grid.x(b);
        p.x_end = grid.x(e - 1);
        double su = 0.0;
        double sw = 0.0;
        for (long i = b; i < e; ++i) {
            su += f.u(i);
            sw += f.w(i);
            if (flat[i]) p.max_gradient = std::max(p.max_gradient, g[i]);
        }
        p.U = su / static_cast<double>(e - b);
        p.W = sw / static_cast<double>(e - b);
        out.push_back(p);
    }
    return out;
}

std::vector<PhasePoint> phase_trace(const FieldPair& f, const Grid& grid) {
    std::vector<PhasePoint> out;
    out.reserve(f.size());
    for (long i = 0; i < f.size(); ++i) {
        out.push_back({grid.x(i), f.u(i), f.w(i), dw(f, i, grid.dx())});
    }
    return out;
}

std::vector<Segment> label_segments(const FieldPair& f, const Grid& grid, double u0, const LabelOptions& opt) {
    const long n = f.size();
    auto label = [&](long i) {
        const double u = f.u(i);
        const double w = f.w(i);
        if (u <= opt.depleted * u0) return StateLabel::Depleted;
        if (w >= opt.polarized * u) return StateLabel::PolarizedPlus;
        if (w <= -opt.polarized * u) return StateLabel::PolarizedMinus;
        if (std::abs(w) <= opt.nonpolarized * u) return StateLabel::NonPolarized;
        return StateLabel::Transition;
    };
    std::vector<Segment> out;
    for (long i = 0; i < n;) {
        const auto l = label(i);
        long j = i + 1;
        while (j < n && label(j) == l) ++j;
        bool keep = l != StateLabel::Transition && j - i >= opt.min_cells;
        if (keep && l == StateLabel::NonPolarized) {
            keep = false;
            for (long q = i; q < j && !keep; ++q) {
                keep = std::abs(dw(f, q, grid.dx())) < opt.flat_w * u0;
            }
        }
        if (keep) {
            if (!out.empty() && out.back().label == l) {
                out.back().end = j;
                out.back().x_end = grid.x(j - 1);
            } else {
                out.push_back({i, j, l, grid.x(i), grid.x(j - 1)});
            }
        }
        i = j;
    }
    return out;
}

namespace {

bool polarized(StateLabel s) { return s == StateLabel::PolarizedPlus || s == StateLabel::PolarizedMinus; }

std::optional<FrontKind> front_kind(StateLabel a, StateLabel b) {
    if (polarized(a) && polarized(b)) return FrontKind::Inversion;
    if (polarized(a) && b == StateLabel::NonPolarized) return FrontKind::Leading;
    if (polarized(b) && a == StateLabel::NonPolarized) return FrontKind::Leading;
    if (polarized(a) && b == StateLabel::Depleted) return FrontKind::Diffusion;
    if (polarized(b) && a == StateLabel::Depleted) return FrontKind::Diffusion;
    return std::nullopt;
}

// Walk from the segment edge facing a front into the segment until u is flat or
// has an extremum.
StatePoint state_near(const FieldPair& f, const Grid& grid, const Segment& s, bool from_end, double tol) {
    const double dx = grid.dx();
    const long step = from_end ? -1 : 1;
    long i = from_end ? s.end - 1 : s.begin;
    const long stop = from_end ? s.begin : s.end - 1;
    const double d0 = du(f, i, dx);
    while (i != stop) {
        const double d = du(f, i, dx);
        if (std::abs(d) < tol || (d > 0.0) != (d0 > 0.0)) break;
        i += step;
    }
    return {i, grid.x(i), f.u(i), f.w(i)};
}

}  // namespace

std::vector<TypedFront> classify_fronts(const FieldPair& f, const Grid& grid, double u0, const LabelOptions& opt) {
    const auto segs = label_segments(f, grid, u0, opt);
    const double tol = opt.grad_tol * u0;
    std::vector<TypedFront> out;
    for (size_t k = 0; k + 1 < segs.size(); ++k) {
        const auto& A = segs[k];
        const auto& B = segs[k + 1];
        const auto kind = front_kind(A.label, B.label);
        if (!kind) continue;
        const auto pa = state_near(f, grid, A, true, tol);
        const auto pb = state_near(f, grid, B, false, tol);
        const StatePoint& pol = polarized(A.label) && (!polarized(B.label) || *kind == FrontKind::Inversion) ? pa : pb;
        TypedFront fr;
        fr.kind = *kind;
        std::vector<double> xs;
        if (*kind == FrontKind::Leading) {
            fr.level = 0.5 * std::abs(pol.W);
            xs = crossings([&](long i) { return std::abs(f.w(i)); }, grid, pa.cell, pb.cell, fr.level);
        } else if (*kind == FrontKind::Inversion) {
            fr.level = 0.0;
            xs = crossings([&](long i) { return f.w(i); }, grid, pa.cell, pb.cell, 0.0);
        } else {
            fr.level = 0.5 * pol.U;
            xs = crossings([&](long i) { return f.u(i); }, grid, pa.cell, pb.cell, fr.level);
        }
        if (xs.empty()) continue;
        const double mid = 0.5 * (grid.x(A.end - 1) + grid.x(B.begin));
        fr.x = *std::min_element(xs.begin(), xs.end(),
                                 [mid](double p, double q) { return std::abs(p - mid) < std::abs(q - mid); });
        const bool right = fr.x >= 0.0;
        fr.inner_label = right ? A.label : B.label;
        fr.outer_label = right ? B.label : A.label;
        fr.inner = right ? pa : pb;
        fr.outer = right ? pb : pa;
        out.push_back(fr);
    }
    return out;
}

double max_ray_deviation(const FieldPair& f, long from, long to) {
    if (from > to) std::swap(from, to);
    double m = 0.0;
    for (long i = std::max(0L, from); i <= std::min(to, f.size() - 1); ++i) {
        m = std::max(m, std::abs(f.u(i) - std::abs(f.w(i))));
    }
    return m;
}

std::vector<TypedTrack> track_typed_fronts(const std::vector<Snapshot>& snaps, const Grid& grid, double u0,
                                           const LabelOptions& opt, double c_max, double discard) {
    if (snaps.size() < 4) {
        throw InsufficientDataError("front tracking needs at least 4 snapshots");
    }
    // Tracks are kept per (kind, side of the origin).
    std::map<std::pair<int, int>, std::vector<TypedTrack>> open;
    std::vector<TypedTrack> done;
    double t_prev = snaps.front().time;
    for (const auto& snap : snaps) {
        const double window = 2.0 * c_max * (snap.time - t_prev);
        t_prev = snap.time;
        std::map<std::pair<int, int>, std::vector<TypedFront>> found;
        for (const auto& fr : classify_fronts(snap.f, grid, u0, opt)) {
            found[{static_cast<int>(fr.kind), fr.x >= 0.0 ? 1 : -1}].push_back(fr);
        }
        std::map<std::pair<int, int>, std::vector<TypedTrack>> next;
        auto keys = found;
        for (const auto& kv : open) keys[kv.first];
        for (const auto& kv : keys) {
            const auto& key = kv.first;
            auto& tracks = open[key];
            const auto& fronts = found[key];
            std::vector<double> last_x;
            std::vector<double> xs;
            for (const auto& t : tracks) last_x.push_back(t.track.samples.back().x);
            for (const auto& fr : fronts) xs.push_back(fr.x);
            const auto m = match(last_x, xs, window);
            std::vector<bool> continued(tracks.size(), false);
            auto& keep = next[key];
            for (size_t b = 0; b < fronts.size(); ++b) {
                if (m[b] >= 0) {
                    auto& t = tracks[m[b]];
                    t.track.samples.push_back({snap.time, fronts[b].x});
                    t.last = fronts[b];
                    continued[m[b]] = true;
                }
            }
            for (size_t a = 0; a < tracks.size(); ++a) {
                if (continued[a]) {
                    keep.push_back(std::move(tracks[a]));
                } else {
                    tracks[a].track.complete = false;
                    done.push_back(std::move(tracks[a]));
                }
            }
            for (size_t b = 0; b < fronts.size(); ++b) {
                if (m[b] < 0) {
                    TypedTrack t;
                    t.kind = fronts[b].kind;
                    t.track.level = fronts[b].level;
                    t.track.samples.push_back({snap.time, fronts[b].x});
                    t.last = fronts[b];
                    keep.push_back(std::move(t));
                }
            }
        }
        open = std::move(next);
    }
    for (auto& kv : open) {
        for (auto& t : kv.second) done.push_back(std::move(t));
    }
    for (auto& t : done) finish_track(t.track, discard);
    std::sort(done.begin(), done.end(), [](const TypedTrack& a, const TypedTrack& b) {
        return std::make_tuple(a.track.samples.front().t, a.track.samples.front().x, static_cast<int>(a.kind)) <
               std::make_tuple(b.track.samples.front().t, b.track.samples.front().x, static_cast<int>(b.kind));
    });
    return done;
}

std::vector<FrontObservation> observations(const std::vector<TypedTrack>& tracks) {
    std::vector<FrontObservation> out;
    for (const auto& t : tracks) {
        if (t.kind == FrontKind::Diffusion || !t.track.complete) continue;
        FrontObservation o;
        o.kind = t.kind;
        o.side = t.track.side;
        o.c_fit = t.track.c_fit;
        o.ahead = t.last.outer;
        o.behind = t.last.inner;
        out.push_back(o);
    }
    return out;
}

RelationReport verify_relations(const std::vector<FrontObservation>& fronts) {
    RelationReport rep;
    auto rel = [](double pred, double meas) { return std::abs(pred - meas) / std::abs(meas); };
    for (const auto& o : fronts) {
        RelationCheck chk;
        chk.kind = o.kind;
        chk.side = o.side;
        if (o.kind == FrontKind::Diffusion) continue;
        chk.relation = o.kind == FrontKind::Leading ? "U1 c/(c+-1)" : "U_behind (c-1)/(c+1)";
        if (!o.c_fit || !o.ahead || !o.behind) {
            chk.note = "missing speed fit or adjacent state";
            rep.checks.push_back(chk);
            continue;
        }
        const double c = std::abs(*o.c_fit);
        chk.c = c;
        if (!(c > 1.0)) {
            chk.note = "fitted speed not above 1";
            rep.checks.push_back(chk);
            continue;
        }
        const double s = o.side == Direction::RightMoving ? 1.0 : -1.0;
        if (o.kind == FrontKind::Leading) {
            const double U1 = o.ahead->U;
            const bool along = s * o.behind->W > 0.0;
            const double plus = U1 * c / (c + 1.0);
            const double minus = U1 * c / (c - 1.0);
            chk.relation = along ? "U1 c/(c-1)" : "U1 c/(c+1)";
            chk.measured = o.behind->U;
            chk.predicted = along ? minus : plus;
            FormArbitration arb;
            arb.along_motion = along;
            arb.err_c_plus_1 = rel(plus, chk.measured);
            arb.err_c_minus_1 = rel(minus, chk.measured);
            arb.supported = arb.err_c_plus_1 < arb.err_c_minus_1 ? "U1 c/(c+1)" : "U1 c/(c-1)";
            rep.arbitration.push_back(arb);
        } else {
            chk.relation = "U_behind (c-1)/(c+1)";
            chk.measured = o.ahead->U;
            chk.predicted = o.behind->U * (c - 1.0) / (c + 1.0);
        }
        chk.rel_error = rel(chk.predicted, chk.measured);
        chk.complete = true;
        rep.checks.push_back(chk);
    }
    return rep;
}

}  // namespace twave
