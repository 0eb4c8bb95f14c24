// Copyright 2026 The backaction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "backaction/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include "backaction/errors.hpp"

namespace backaction {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// One searchable parameter. Periodic coordinates wrap into [lo, hi).
struct Coordinate {
    double lo = 0.0;
    double hi = 0.0;
    bool periodic = false;
};

double wrap(double x, const Coordinate& c) {
    if (!c.periodic) return std::clamp(x, c.lo, c.hi);
    const double period = c.hi - c.lo;
    double r = std::fmod(x - c.lo, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0;
    return c.lo + r;
}

// 53 random mantissa bits; avoids implementation-defined distributions.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct LineResult {
    double x = 0.0;
    double value = 0.0;
};

// Coarse scan of the coordinate, then golden-section inside the bracket around
// the best sample. Returns the starting point unless something strictly better
// was found, so repeated sweeps never lose ground.
template <class F>
LineResult line_search(F&& f, double x0, double f0, const Coordinate& c, int scan, double tol,
                       std::int64_t& evaluations) {
    auto eval = [&](double x) {
        ++evaluations;
        return f(x);
    };

    const double width = c.hi - c.lo;
    double center = x0;
    double center_value = f0;
    double step = 0.0;
    if (c.periodic) {
        step = width / scan;
        for (int j = 1; j < scan; ++j) {
            const double x = x0 + j * step;
            const double v = eval(x);
            if (v > center_value) {
                center = x;
                center_value = v;
            }
        }
    } else {
        step = width / (scan - 1);
        for (int j = 0; j < scan; ++j) {
            const double x = c.lo + j * step;
            const double v = eval(x);
            if (v > center_value) {
                center = x;
                center_value = v;
            }
        }
    }

    double a = center - step;
    double b = center + step;
    if (!c.periodic) {
        a = std::max(a, c.lo);
        b = std::min(b, c.hi);
    }
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = eval(x1);
        }
    }

    LineResult best{x0, f0};
    for (auto [x, v] : {std::pair{center, center_value}, std::pair{x1, f1}, std::pair{x2, f2}}) {
        if (v > best.value) best = {wrap(x, c), v};
    }
    return best;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& x) { return u * x * u.adjoint(); }
ComplexMatrix conjugate_adjoint(const ComplexMatrix& u, const ComplexMatrix& x) { return u.adjoint() * x * u; }

// V = prod over pairs (p < q) of complex Givens rotations, two angles each.
ComplexMatrix givens_unitary(Eigen::Index dim, std::span<const double> params) {
    ComplexMatrix v = identity_matrix(dim);
    std::size_t k = 0;
    for (Eigen::Index p = 0; p < dim; ++p) {
        for (Eigen::Index q = p + 1; q < dim; ++q) {
            const double c = std::cos(params[k]);
            const double s = std::sin(params[k]);
            const Complex phase = std::polar(1.0, params[k + 1]);
            k += 2;
            // v <- v * G_pq
            const Eigen::VectorXcd col_p = v.col(p);
            const Eigen::VectorXcd col_q = v.col(q);
            v.col(p) = c * col_p + s * std::conj(phase) * col_q;
            v.col(q) = -s * phase * col_p + c * col_q;
        }
    }
    return v;
}

// Maps a flat parameter block to one projective measurement.
class MeasurementEncoding {
   public:
    explicit MeasurementEncoding(Eigen::Index dim) : dim_(dim) {}

    bool qubit() const { return dim_ == 2; }
    int size() const { return qubit() ? 2 : static_cast<int>(dim_ * (dim_ - 1)); }

    Coordinate coordinate(int k) const {
        // Flipping theta by pi only negates a direction (or a basis vector), which
        // leaves the projectors unchanged.
        if (k % 2 == 0) return {0.0, kPi, true};
        return {0.0, kTwoPi, true};
    }

    void randomize(std::span<double> block, std::mt19937_64& rng) const {
        for (int k = 0; k < size(); k += 2) {
            block[k] = qubit() ? std::acos(2.0 * unit_uniform(rng) - 1.0) : kPi * unit_uniform(rng);
            block[k + 1] = kTwoPi * unit_uniform(rng);
        }
    }

    SpectralDecomposition decode(std::span<const double> block) const {
        if (qubit()) return measurement_from_direction(direction_from_angles({block[0], block[1]}));
        const ComplexMatrix v = givens_unitary(dim_, block);
        SpectralDecomposition d;
        for (Eigen::Index k = 0; k < dim_; ++k) {
            d.eigenvalues.push_back(static_cast<double>(k));
            d.projectors.push_back(v.col(k) * v.col(k).adjoint());
        }
        return d;
    }

    HermitianOperator observable(std::span<const double> block) const {
        const ComplexMatrix v = givens_unitary(dim_, block);
        Eigen::VectorXcd diag(dim_);
        for (Eigen::Index k = 0; k < dim_; ++k) diag(k) = static_cast<double>(k);
        return HermitianOperator::assume_valid(v * diag.asDiagonal() * v.adjoint());
    }

   private:
    Eigen::Index dim_;
};

struct SearchPoint {
    std::vector<std::vector<double>> measurements;  // one block per measurement
    std::vector<std::vector<double>> amplitudes;    // one block per gap; empty without controls
};

// Coordinate ascent over a measurement/control pipeline. Every coordinate
// update evaluates Tr[channel(state before) * Heisenberg operator after], with
// the neighbouring pipeline held in cache.
class PipelineSearch {
   public:
    PipelineSearch(const ObjectiveSpec& spec, const OptimizerConfig& config, bool controlled)
        : spec_(spec), config_(config), encoding_(spec.dim()), controlled_(controlled) {}

    const MeasurementEncoding& encoding() const { return encoding_; }
    std::int64_t evaluations() const { return evaluations_; }

    double value(const SearchPoint& point) {
        ++evaluations_;
        ComplexMatrix y = spec_.initial_state().matrix();
        const auto n = point.measurements.size();
        for (std::size_t m = 0; m < n; ++m) {
            if (controlled_) y = conjugate(gap_unitary(point.amplitudes[m]), y);
            y = measurement_channel(y, encoding_.decode(point.measurements[m]));
        }
        if (controlled_) y = conjugate(gap_unitary(point.amplitudes[n]), y);
        return trace_product(y, spec_.target().matrix());
    }

    double measurement_sweep(SearchPoint& point) {
        const std::size_t n = point.measurements.size();
        if (n == 0) return value(point);

        std::vector<SpectralDecomposition> channels;
        std::vector<ComplexMatrix> gaps;
        decode(point, channels, gaps);

        // after[m] pairs with the state right after measurement m.
        std::vector<ComplexMatrix> after(n);
        ComplexMatrix k = spec_.target().matrix();
        for (std::size_t m = n; m-- > 0;) {
            after[m] = controlled_ ? conjugate_adjoint(gaps[m + 1], k) : k;
            k = measurement_channel(after[m], channels[m]);
        }

        ComplexMatrix y = spec_.initial_state().matrix();
        double current = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const ComplexMatrix x = controlled_ ? conjugate(gaps[m], y) : y;
            auto& block = point.measurements[m];
            if (encoding_.qubit()) {
                const Eigen::Matrix2cd x2 = x;
                const Eigen::Matrix2cd h2 = after[m];
                current = ascend_block(block, [&](std::span<const double> params) {
                    return qubit_local_value(x2, h2, params[0], params[1]);
                });
            } else {
                current = ascend_block(block, [&](std::span<const double> params) {
                    return trace_product(measurement_channel(x, encoding_.decode(params)), after[m]);
                });
            }
            y = measurement_channel(x, encoding_.decode(block));
        }
        return current;
    }

    double control_sweep(SearchPoint& point) {
        const std::size_t n = point.measurements.size();
        std::vector<SpectralDecomposition> channels;
        std::vector<ComplexMatrix> gaps;
        decode(point, channels, gaps);

        // after_gap[g] pairs with the state right after gap g.
        std::vector<ComplexMatrix> after_gap(n + 1);
        after_gap[n] = spec_.target().matrix();
        for (std::size_t m = n; m-- > 0;) {
            after_gap[m] = measurement_channel(conjugate_adjoint(gaps[m + 1], after_gap[m + 1]), channels[m]);
        }

        const Coordinate bound{-config_.u_max, config_.u_max, false};
        ComplexMatrix y = spec_.initial_state().matrix();
        double current = 0.0;
        for (std::size_t g = 0; g <= n; ++g) {
            auto& amps = point.amplitudes[g];
            const std::size_t segments = amps.size();
            std::vector<ComplexMatrix> steps;
            steps.reserve(segments);
            for (double u : amps) steps.push_back(segment(u));
            // suffix[k] = S_{K-1} ... S_{k+1}
            std::vector<ComplexMatrix> suffix(segments, identity_matrix(spec_.dim()));
            for (std::size_t k = segments - 1; k-- > 0;) suffix[k] = suffix[k + 1] * steps[k + 1];

            ComplexMatrix z = y;  // state before segment k
            for (std::size_t k = 0; k < segments; ++k) {
                const ComplexMatrix op = conjugate_adjoint(suffix[k], after_gap[g]);
                auto along = [&](double u) { return trace_product(conjugate(segment(u), z), op); };
                ++evaluations_;
                current = along(amps[k]);
                const LineResult r = line_search(along, amps[k], current, bound, config_.control_scan_points,
                                                 config_.line_tolerance, evaluations_);
                if (r.x != amps[k]) {
                    amps[k] = r.x;
                    steps[k] = segment(r.x);
                }
                current = r.value;
                z = conjugate(steps[k], z);
            }
            y = g < n ? measurement_channel(z, channels[g]) : z;
        }
        return current;
    }

   private:
    // Tr[M_w(x) h] for the rank-one pair (I +- w.sigma)/2, in fixed-size arithmetic.
    static double qubit_local_value(const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& h, double theta,
                                    double phi) {
        const double st = std::sin(theta);
        const double wx = st * std::cos(phi);
        const double wy = st * std::sin(phi);
        const double wz = std::cos(theta);
        Eigen::Matrix2cd p;
        p << 0.5 * (1.0 + wz), Complex(0.5 * wx, -0.5 * wy), Complex(0.5 * wx, 0.5 * wy), 0.5 * (1.0 - wz);
        const Eigen::Matrix2cd q = Eigen::Matrix2cd::Identity() - p;
        const Eigen::Matrix2cd out = p * x * p + q * x * q;
        return (out.array() * h.transpose().array()).sum().real();
    }

    template <class Local>
    double ascend_block(std::vector<double>& block, Local&& local) {
        ++evaluations_;
        double current = local(block);
        std::vector<double> trial = block;
        for (int c = 0; c < encoding_.size(); ++c) {
            trial = block;
            auto along = [&](double t) {
                trial[c] = t;
                return local(trial);
            };
            const LineResult r = line_search(along, block[c], current, encoding_.coordinate(c), config_.scan_points,
                                             config_.line_tolerance, evaluations_);
            block[c] = r.x;
            current = r.value;
        }
        return current;
    }

    ComplexMatrix segment(double u) const { return propagator(*spec_.model(), u, config_.segment_duration); }

    ComplexMatrix gap_unitary(std::span<const double> amps) const {
        ComplexMatrix u = identity_matrix(spec_.dim());
        for (double a : amps) u = segment(a) * u;
        return u;
    }

    void decode(const SearchPoint& point, std::vector<SpectralDecomposition>& channels,
                std::vector<ComplexMatrix>& gaps) const {
        for (const auto& block : point.measurements) channels.push_back(encoding_.decode(block));
        if (controlled_) {
            for (const auto& amps : point.amplitudes) gaps.push_back(gap_unitary(amps));
        }
    }

    const ObjectiveSpec& spec_;
    const OptimizerConfig& config_;
    MeasurementEncoding encoding_;
    bool controlled_;
    std::int64_t evaluations_ = 0;
};

bool improved_enough(double before, double after, double tolerance) {
    return after - before > tolerance * std::abs(before);
}

MeasurementPlan plan_from(const MeasurementEncoding& encoding, const SearchPoint& point) {
    if (encoding.qubit()) {
        std::vector<SphereAngles> angles;
        for (const auto& block : point.measurements) angles.push_back({block[0], block[1]});
        return MeasurementPlan::qubit(std::move(angles));
    }
    std::vector<HermitianOperator> observables;
    for (const auto& block : point.measurements) observables.push_back(encoding.observable(block));
    return MeasurementPlan::general(std::move(observables));
}

std::vector<ControlSchedule> controls_from(const SearchPoint& point, double duration) {
    std::vector<ControlSchedule> out;
    for (const auto& amps : point.amplitudes) out.push_back({amps, duration});
    return out;
}

void validate_config(const OptimizerConfig& config) {
    require(config.tolerance >= 0.0, "optimizer tolerance must be non-negative");
    require(config.max_iters >= 1, "optimizer max_iters must be at least 1");
    require(config.multi_starts >= 1, "optimizer multi_starts must be at least 1");
    require(config.scan_points >= 2 && config.control_scan_points >= 2, "scan point counts must be at least 2");
    require(config.line_tolerance > 0.0, "line-search tolerance must be positive");
}

struct StartOutcome {
    SearchPoint point;
    double value = -std::numeric_limits<double>::infinity();
    bool converged = false;
    std::vector<TracePoint> trace;
};

// Deterministic starts: all random draws happen up front in start order.
std::vector<SearchPoint> draw_starts(const MeasurementEncoding& encoding, int n, std::size_t gaps, int segments,
                                     const OptimizerConfig& config) {
    std::mt19937_64 rng(config.seed);
    std::vector<SearchPoint> starts(config.multi_starts);
    for (auto& s : starts) {
        s.measurements.assign(n, std::vector<double>(encoding.size()));
        for (auto& block : s.measurements) encoding.randomize(block, rng);
        s.amplitudes.assign(gaps, std::vector<double>(segments, 0.0));
    }
    return starts;
}

// Runs `sweep` until the relative gain per sweep drops to the tolerance.
template <class Sweep>
double run_phase(Sweep&& sweep, double current, int max_iters, double tolerance, bool& converged,
                 std::vector<TracePoint>* trace) {
    converged = false;
    for (int it = 1; it <= max_iters; ++it) {
        const double next = std::max(current, sweep());
        if (trace) trace->push_back({it, next});
        const bool gained = improved_enough(current, next, tolerance);
        current = next;
        if (!gained) {
            converged = true;
            break;
        }
    }
    return current;
}

}  // namespace

MeasurementPlan MeasurementPlan::qubit(std::vector<SphereAngles> angles) {
    for (const auto& a : angles) {
        require(a.theta >= 0.0 && a.theta <= kPi && a.phi >= 0.0 && a.phi < kTwoPi,
                "sphere angles out of range (theta in [0, pi], phi in [0, 2pi))");
    }
    MeasurementPlan plan;
    plan.data_ = std::move(angles);
    return plan;
}

MeasurementPlan MeasurementPlan::qubit_directions(std::span<const BlochVector> directions) {
    std::vector<SphereAngles> angles;
    for (const auto& w : directions) {
        require_unit(w, "measurement direction");
        angles.push_back(angles_from_direction(w));
    }
    return qubit(std::move(angles));
}

MeasurementPlan MeasurementPlan::general(std::vector<HermitianOperator> observables) {
    MeasurementPlan plan;
    plan.data_ = std::move(observables);
    return plan;
}

std::size_t MeasurementPlan::size() const {
    return std::visit([](const auto& v) { return v.size(); }, data_);
}

const std::vector<SphereAngles>& MeasurementPlan::angles() const {
    require(is_qubit(), "plan does not hold two-level directions");
    return std::get<std::vector<SphereAngles>>(data_);
}

std::vector<BlochVector> MeasurementPlan::directions() const {
    std::vector<BlochVector> out;
    for (const auto& a : angles()) out.push_back(direction_from_angles(a));
    return out;
}

std::vector<HermitianOperator> MeasurementPlan::observables() const {
    if (!is_qubit()) return std::get<std::vector<HermitianOperator>>(data_);
    std::vector<HermitianOperator> out;
    for (const auto& w : directions()) out.push_back(projector_from_direction(w));
    return out;
}

std::vector<SpectralDecomposition> MeasurementPlan::decompositions() const {
    std::vector<SpectralDecomposition> out;
    if (is_qubit()) {
        for (const auto& w : directions()) out.push_back(measurement_from_direction(w));
    } else {
        for (const auto& q : std::get<std::vector<HermitianOperator>>(data_)) out.push_back(spectral_decompose(q));
    }
    return out;
}

ObjectiveSpec::ObjectiveSpec(DensityMatrix initial_state, HermitianOperator target, std::optional<SystemModel> model)
    : initial_state_(std::move(initial_state)), target_(std::move(target)), model_(std::move(model)) {
    require(initial_state_.dim() == target_.dim(), "initial state and target operator dimensions differ");
    require(!model_ || model_->dim() == initial_state_.dim(), "system model and initial state dimensions differ");
}

std::vector<DensityMatrix> propagate(const ObjectiveSpec& spec, const MeasurementPlan& plan,
                                     std::span<const ControlSchedule> controls) {
    const std::size_t n = plan.size();
    require(n == 0 || !plan.is_qubit() || spec.dim() == 2, "direction plans require a two-level system");
    if (!controls.empty()) {
        require(spec.model().has_value(), "controls require a system model");
        if (controls.size() != n + 1) {
            std::ostringstream os;
            os << "expected " << n + 1 << " control schedules for " << n << " measurements, got " << controls.size();
            throw ValidationError(os.str());
        }
        for (const auto& c : controls) require(c.segment_duration > 0.0, "segment duration must be positive");
    }
    const auto channels = plan.decompositions();
    for (const auto& d : channels) require(d.dim() == spec.dim(), "observable and state dimensions differ");

    auto evolve = [&](const DensityMatrix& rho, std::size_t gap) {
        if (controls.empty()) return rho;
        DensityMatrix out = rho;
        for (double u : controls[gap].amplitudes) {
            out = evolve_unitary(out, *spec.model(), u, controls[gap].segment_duration);
        }
        return out;
    };

    std::vector<DensityMatrix> states;
    states.reserve(n + 1);
    states.push_back(evolve(spec.initial_state(), 0));
    for (std::size_t m = 0; m < n; ++m) {
        states.push_back(evolve(apply_measurement(states.back(), channels[m]), m + 1));
    }
    return states;
}

double evaluate_objective(const ObjectiveSpec& spec, const MeasurementPlan& plan,
                          std::span<const ControlSchedule> controls) {
    return expectation(propagate(spec, plan, controls).back(), spec.target());
}

OptimizationResult optimize_measurements(const ObjectiveSpec& spec, int n, const OptimizerConfig& config) {
    require(n >= 1, "number of measurements must be at least 1");
    validate_config(config);

    PipelineSearch search(spec, config, false);
    auto starts = draw_starts(search.encoding(), n, 0, 0, config);

    StartOutcome best;
    for (auto& start : starts) {
        StartOutcome outcome;
        outcome.point = std::move(start);
        const double initial = search.value(outcome.point);
        outcome.trace.push_back({0, initial});
        run_phase([&] { return search.measurement_sweep(outcome.point); }, initial, config.max_iters,
                  config.tolerance, outcome.converged, &outcome.trace);
        outcome.value = evaluate_objective(spec, plan_from(search.encoding(), outcome.point));
        if (outcome.value > best.value) best = std::move(outcome);
    }

    OptimizationResult result;
    result.best_plan = plan_from(search.encoding(), best.point);
    result.best_value = best.value;
    result.evaluations = search.evaluations();
    result.converged = best.converged;
    result.trace = std::move(best.trace);
    return result;
}

OptimizationResult optimize_joint(const ObjectiveSpec& spec, int n, int segments_per_gap,
                                  const OptimizerConfig& config) {
    require(spec.model().has_value(), "joint optimisation requires a system model");
    require(n >= 0, "number of measurements must be non-negative");
    require(segments_per_gap >= 1, "segments_per_gap must be at least 1");
    require(config.segment_duration > 0.0, "segment duration must be positive");
    require(config.u_max > 0.0, "u_max must be positive");
    validate_config(config);

    PipelineSearch search(spec, config, true);
    auto starts = draw_starts(search.encoding(), n, static_cast<std::size_t>(n) + 1, segments_per_gap, config);

    auto evaluate = [&](const SearchPoint& point) {
        const auto controls = controls_from(point, config.segment_duration);
        return evaluate_objective(spec, plan_from(search.encoding(), point), controls);
    };

    StartOutcome best;
    for (auto& start : starts) {
        StartOutcome outcome;
        outcome.point = std::move(start);
        double current = search.value(outcome.point);
        outcome.trace.push_back({0, current});
        for (int outer = 1; outer <= config.max_iters; ++outer) {
            bool phase_converged = false;
            double next = current;
            if (n > 0) {
                next = run_phase([&] { return search.measurement_sweep(outcome.point); }, next, config.max_iters,
                                 config.tolerance, phase_converged, nullptr);
            }
            next = run_phase([&] { return search.control_sweep(outcome.point); }, next, config.max_iters,
                             config.tolerance, phase_converged, nullptr);
            outcome.trace.push_back({outer, next});
            const bool gained = improved_enough(current, next, config.tolerance);
            current = next;
            if (!gained) {
                outcome.converged = true;
                break;
            }
        }
        outcome.value = evaluate(outcome.point);
        if (outcome.value > best.value) best = std::move(outcome);
    }

    OptimizationResult result;
    result.best_plan = plan_from(search.encoding(), best.point);
    result.best_controls = controls_from(best.point, config.segment_duration);
    result.best_value = best.value;
    result.evaluations = search.evaluations();
    result.converged = best.converged;
    result.trace = std::move(best.trace);
    return result;
}

double grid_resolution_bound(int n, GridShape shape) {
    const double theta_step = kPi / (shape.theta_points - 1);
    const double phi_step = kTwoPi / shape.phi_points;
    return n * 0.5 * (theta_step + phi_step);
}

OptimizationResult brute_force_grid(const ObjectiveSpec& spec, int n, GridShape shape, std::int64_t evaluation_cap) {
    require(spec.dim() == 2, "the brute-force grid supports two-level systems only");
    require(n >= 0, "number of measurements must be non-negative");
    require(shape.theta_points >= 2 && shape.phi_points >= 1, "grid needs at least 2 theta and 1 phi points");

    const std::int64_t cell_count = static_cast<std::int64_t>(shape.theta_points) * shape.phi_points;
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) {
        if (total > evaluation_cap / cell_count) {
            std::ostringstream os;
            os << "grid search needs more than " << evaluation_cap << " evaluations";
            throw ResourceError(os.str());
        }
        total *= cell_count;
    }

    std::vector<SphereAngles> cells;
    std::vector<SpectralDecomposition> channels;
    for (int t = 0; t < shape.theta_points; ++t) {
        for (int p = 0; p < shape.phi_points; ++p) {
            const SphereAngles a{kPi * t / (shape.theta_points - 1), kTwoPi * p / shape.phi_points};
            cells.push_back(a);
            channels.push_back(measurement_from_direction(direction_from_angles(a)));
        }
    }

    // Depth-first in lexicographic cell order, caching the state after each prefix.
    // Strict comparison keeps the first (smallest) maximiser.
    const ComplexMatrix& target = spec.target().matrix();
    std::vector<std::size_t> index(n, 0);
    std::vector<std::size_t> best_index(n, 0);
    double best_value = -std::numeric_limits<double>::infinity();
    std::int64_t evaluations = 0;

    auto descend = [&](auto&& self, int level, const ComplexMatrix& state) -> void {
        if (level == n) {
            ++evaluations;
            const double v = trace_product(state, target);
            if (v > best_value) {
                best_value = v;
                best_index = index;
            }
            return;
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            index[level] = c;
            self(self, level + 1, measurement_channel(state, channels[c]));
        }
    };
    descend(descend, 0, spec.initial_state().matrix());

    std::vector<SphereAngles> angles;
    for (auto i : best_index) angles.push_back(cells[i]);
    OptimizationResult result;
    result.best_plan = MeasurementPlan::qubit(std::move(angles));
    result.best_value = evaluate_objective(spec, result.best_plan);
    result.evaluations = evaluations;
    result.converged = true;
    result.trace.push_back({0, result.best_value});
    return result;
}

OptimizationResult brute_force_grid(const ObjectiveSpec& spec, int n, int grid_points, std::int64_t evaluation_cap) {
    require(grid_points >= 8, "grid_points must be at least 8");
    return brute_force_grid(spec, n, GridShape{grid_points, grid_points}, evaluation_cap);
}

}  // namespace backaction
