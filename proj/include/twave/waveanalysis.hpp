#pragma once

// Front tracking, speed fits, plateau extraction and the mass-balance checks on
// snapshot sequences produced by the PDE solver.

#include <optional>
#include <string>
#include <vector>

#include "twave/pdesim.hpp"

namespace twave {

enum class Field { U, W, AbsW };
enum class Direction { LeftMoving, RightMoving };

std::string to_string(Field f);
std::string to_string(Direction d);

struct TrackSample {
    double t = 0.0;
    double x = 0.0;
};

struct FrontTrack {
    double level = 0.0;
    Direction side = Direction::RightMoving;
    std::vector<TrackSample> samples;
    bool complete = true;  // false when the track was lost before the last snapshot
    std::optional<double> c_fit;
    std::optional<double> stderr_fit;
};

/// Level crossings of `field` in one snapshot, linearly interpolated inside the cell pair.
std::vector<double> level_crossings(const FieldPair& f, const Grid& grid, Field field, double level);

/// Crossings of `field - level` in every snapshot, linked into tracks by nearest
/// neighbour with a maximal displacement of 2 c_max dt_snap between snapshots.
/// Throws InsufficientDataError for fewer than 4 snapshots.
std::vector<FrontTrack> detect_fronts(const std::vector<Snapshot>& snaps, const Grid& grid, Field field, double level,
                                      double c_max = 3.0);

struct SpeedFit {
    double c = 0.0;
    double std_error = 0.0;
    int used = 0;
};

/// Least-squares slope of position against time after dropping the first
/// `discard` fraction of the track's time span. Throws InsufficientDataError with
/// fewer than 4 usable samples.
SpeedFit fit_speed(const FrontTrack& track, double discard = 0.3);

struct Plateau {
    long begin = 0;  // first cell
    long end = 0;    // one past the last cell
    double x_begin = 0.0;
    double x_end = 0.0;
    double U = 0.0;
    double W = 0.0;
    double max_gradient = 0.0;
};

/// Maximal runs of at least `min_cells` cells with |u_x| and |w_x| below grad_tol.
/// Runs on the same level separated by at most `max_gap` cells are joined.
std::vector<Plateau> extract_plateaus(const FieldPair& f, const Grid& grid, double grad_tol, long min_cells = 10,
                                      long max_gap = 3);

struct PhasePoint {
    double x = 0.0;
    double U = 0.0;
    double W = 0.0;
    double Wprime = 0.0;
};

std::vector<PhasePoint> phase_trace(const FieldPair& f, const Grid& grid);

// --- typed fronts -------------------------------------------------------------

enum class StateLabel { NonPolarized, PolarizedPlus, PolarizedMinus, Depleted, Transition };
enum class FrontKind { Leading, Inversion, Diffusion };

std::string to_string(StateLabel s);
std::string to_string(FrontKind k);

struct LabelOptions {
    double nonpolarized = 0.2;  // |w| <= 0.2 u
    double polarized = 0.8;     // |w| >= 0.8 u
    double depleted = 0.02;     // u <= 0.02 u0
    double flat_w = 0.05;       // a non-polarized segment needs a cell with |w_x| below flat_w u0
    long min_cells = 10;
    double grad_tol = 1e-3;     // flatness threshold relative to u0, per unit length
};

struct Segment {
    long begin = 0;
    long end = 0;
    StateLabel label = StateLabel::Transition;
    double x_begin = 0.0;
    double x_end = 0.0;
};

struct StatePoint {
    long cell = 0;
    double x = 0.0;
    double U = 0.0;
    double W = 0.0;
};

struct TypedFront {
    FrontKind kind = FrontKind::Leading;
    double x = 0.0;
    double level = 0.0;
    StateLabel inner_label = StateLabel::Transition;  // side facing x = 0
    StateLabel outer_label = StateLabel::Transition;
    StatePoint inner;
    StatePoint outer;
};

/// Runs of identically labelled cells with at least min_cells cells, in spatial order.
/// Non-polarized runs without a flat cell (the w = 0 crossing inside an inversion
/// front) count as transition.
std::vector<Segment> label_segments(const FieldPair& f, const Grid& grid, double u0, const LabelOptions& opt = {});

/// Fronts between consecutive segments of one snapshot. The state next to a front
/// is the first extremum or flat point (|u_x| < grad_tol) met when walking from
/// the front into the segment.
std::vector<TypedFront> classify_fronts(const FieldPair& f, const Grid& grid, double u0,
                                        const LabelOptions& opt = {});

/// Largest |u - |w|| over cells [from, to], both ends included in either order.
double max_ray_deviation(const FieldPair& f, long from, long to);

struct TypedTrack {
    FrontKind kind = FrontKind::Leading;
    FrontTrack track;
    TypedFront last;  // front in the last snapshot of the track
};

/// Typed fronts of every snapshot linked into tracks per kind and side.
std::vector<TypedTrack> track_typed_fronts(const std::vector<Snapshot>& snaps, const Grid& grid, double u0,
                                           const LabelOptions& opt = {}, double c_max = 3.0, double discard = 0.3);

// --- mass-balance relations ---------------------------------------------------

struct FrontObservation {
    FrontKind kind = FrontKind::Leading;
    Direction side = Direction::RightMoving;
    std::optional<double> c_fit;  // signed fitted speed
    std::optional<StatePoint> ahead;
    std::optional<StatePoint> behind;
};

struct RelationCheck {
    FrontKind kind = FrontKind::Leading;
    Direction side = Direction::RightMoving;
    std::string relation;  // "U1 c/(c+1)", "U1 c/(c-1)" or "U_behind (c-1)/(c+1)"
    double c = 0.0;        // speed magnitude
    double measured = 0.0;
    double predicted = 0.0;
    double rel_error = 0.0;
    bool complete = false;
    std::string note;
};

/// Which of the two leading-front forms matches the plateau left behind.
struct FormArbitration {
    bool along_motion = false;  // behind state polarized in the direction of motion
    double err_c_plus_1 = 0.0;  // error of U1 c/(c+1)
    double err_c_minus_1 = 0.0; // error of U1 c/(c-1)
    std::string supported;
};

struct RelationReport {
    std::vector<RelationCheck> checks;
    std::vector<FormArbitration> arbitration;
};

/// Leading fronts: behind density against U1 c/(c-1) when the behind state is
/// polarized along the motion, otherwise U1 c/(c+1). Inversion fronts: ahead
/// density against U_behind (c-1)/(c+1). Missing data give incomplete entries.
RelationReport verify_relations(const std::vector<FrontObservation>& fronts);

/// Observations from the typed tracks that reach the last snapshot (outward-moving
/// fronts): ahead is the outer state and behind the inner state at that time.
std::vector<FrontObservation> observations(const std::vector<TypedTrack>& tracks);

}  // namespace twave
