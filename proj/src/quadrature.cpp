#include "clbattery/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace clbattery {

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
    if (!(abs_tol >= 0.0)) throw InvalidArgument("abs_tol must be nonnegative");
    if (max_subdivisions < 1) throw InvalidArgument("max_subdivisions must be at least 1");
    if (!(truncation_factor >= 10.0)) throw InvalidArgument("truncation_factor must be at least 10");
}

NonConvergence::NonConvergence(const std::string& what, QuadratureResult partial,
                               double worst_lo, double worst_hi, double worst_error)
    : NumericalError(what),
      partial_(partial),
      worst_lo_(worst_lo),
      worst_hi_(worst_hi),
      worst_error_(worst_error) {}

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// One piece of the integration domain. Finite pieces integrate f(x) on
// [lo, hi]; tail pieces integrate over t in [lo, hi] subset of [0, 1) with
// x = base + scale t / (1 - t).
struct Segment {
    const Integrand* f;
    bool tail;
    double base;
    double scale;
    double lo;
    double hi;
};

struct Panel {
    std::size_t segment;
    double lo;
    double hi;
    double value;
    double error;
    double resabs;
};

struct ByError {
    bool operator()(const Panel& a, const Panel& b) const { return a.error < b.error; }
};

double to_x(const Segment& s, double t) {
    return s.tail ? s.base + s.scale * t / (1.0 - t) : t;
}

class Engine {
public:
    Engine(std::vector<Segment> segments, const QuadratureConfig& config)
        : segments_(std::move(segments)), config_(config) {}

    QuadratureResult run() {
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            if (segments_[i].hi > segments_[i].lo) push(evaluate(i, segments_[i].lo, segments_[i].hi));
        }
        std::size_t subdivisions = 0;
        while (true) {
            const auto [value, error] = totals();
            const double tol = std::max(config_.rel_tol * std::abs(value), config_.abs_tol);
            if (error <= tol) {
                const auto [exact_value, exact_error] = totals(true);
                return {exact_value, exact_error, evaluations_, true};
            }
            if (queue_.empty() || subdivisions >= config_.max_subdivisions) {
                fail(value, error);
            }
            Panel worst = queue_.top();
            queue_.pop();
            const Segment& seg = segments_[worst.segment];
            const double mid = 0.5 * (worst.lo + worst.hi);
            const bool too_narrow =
                !(mid > worst.lo && mid < worst.hi) ||
                (worst.hi - worst.lo) <= 8.0 * kEps * std::max(std::abs(worst.lo), std::abs(worst.hi));
            const bool negligible_tail =
                seg.tail && worst.resabs < config_.abs_tol / config_.truncation_factor;
            remove(worst);
            if (too_narrow || negligible_tail) {
                frozen_value_ += worst.value;
                frozen_error_ += negligible_tail ? std::min(worst.error, worst.resabs) : worst.error;
                continue;
            }
            push(evaluate(worst.segment, worst.lo, mid));
            push(evaluate(worst.segment, mid, worst.hi));
            ++subdivisions;
        }
    }

private:
    double sample(const Segment& s, double t) {
        ++evaluations_;
        double y;
        double x = t;
        if (s.tail) {
            const double one_minus = 1.0 - t;
            x = s.base + s.scale * t / one_minus;
            y = (*s.f)(x) * s.scale / (one_minus * one_minus);
        } else {
            y = (*s.f)(t);
        }
        if (!std::isfinite(y)) {
            std::ostringstream msg;
            msg << "integrand is not finite at x = " << x;
            throw NonFiniteIntegrand(msg.str(), x);
        }
        return y;
    }

    Panel evaluate(std::size_t index, double lo, double hi) {
        const Segment& s = segments_[index];
        const auto& nodes = Kronrod::abscissa();
        const auto& kw = Kronrod::weights();
        const auto& gw = Gauss::weights();
        const double center = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);

        std::array<double, 15> fv{};
        fv[0] = sample(s, center);
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            fv[2 * i - 1] = sample(s, center - half * nodes[i]);
            fv[2 * i] = sample(s, center + half * nodes[i]);
        }
        double kronrod = kw[0] * fv[0];
        double gauss = gw[0] * fv[0];
        double resabs = kw[0] * std::abs(fv[0]);
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            const double pair = fv[2 * i - 1] + fv[2 * i];
            kronrod += kw[i] * pair;
            resabs += kw[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
            if (i % 2 == 0) gauss += gw[i / 2] * pair;
        }
        const double mean = 0.5 * kronrod;
        double resasc = kw[0] * std::abs(fv[0] - mean);
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            resasc += kw[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
        }
        kronrod *= half;
        gauss *= half;
        resabs *= std::abs(half);
        resasc *= std::abs(half);

        // QUADPACK's error scaling for the 7/15 pair.
        double error = std::abs(kronrod - gauss);
        if (resasc != 0.0 && error != 0.0) {
            error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
        }
        if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
            error = std::max(50.0 * kEps * resabs, error);
        }
        return {index, lo, hi, kronrod, error, resabs};
    }

    void push(const Panel& p) {
        value_ += p.value;
        error_ += p.error;
        queue_.push(p);
    }

    void remove(const Panel& p) {
        value_ -= p.value;
        error_ -= p.error;
    }

    std::pair<double, double> totals(bool exact = false) {
        // Running sums drift; recompute from the queue every so often.
        if (++since_resum_ >= 64 || exact) {
            since_resum_ = 0;
            auto copy = queue_;
            value_ = 0.0;
            error_ = 0.0;
            while (!copy.empty()) {
                value_ += copy.top().value;
                error_ += copy.top().error;
                copy.pop();
            }
        }
        return {value_ + frozen_value_, std::max(0.0, error_) + frozen_error_};
    }

    [[noreturn]] void fail(double value, double error) {
        double lo = 0.0;
        double hi = 0.0;
        double worst = frozen_error_;
        if (!queue_.empty()) {
            const Panel& p = queue_.top();
            const Segment& s = segments_[p.segment];
            lo = to_x(s, p.lo);
            hi = s.tail && p.hi >= 1.0 ? std::numeric_limits<double>::infinity() : to_x(s, p.hi);
            worst = p.error;
        }
        std::ostringstream msg;
        msg << "quadrature did not converge: estimate " << value << " with error " << error
            << " after " << evaluations_ << " evaluations; worst subinterval [" << lo << ", " << hi
            << "] carries error " << worst;
        throw NonConvergence(msg.str(), {value, error, evaluations_, false}, lo, hi, worst);
    }

    std::vector<Segment> segments_;
    QuadratureConfig config_;
    std::priority_queue<Panel, std::vector<Panel>, ByError> queue_;
    double value_{0.0};
    double error_{0.0};
    double frozen_value_{0.0};
    double frozen_error_{0.0};
    std::size_t evaluations_{0};
    int since_resum_{0};
};

std::vector<double> clean_breakpoints(std::span<const double> breakpoints, double lo) {
    std::vector<double> out;
    for (double b : breakpoints) {
        if (!std::isfinite(b)) throw InvalidArgument("breakpoints must be finite");
        if (b > lo) out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Finite pieces [start, b1], [b1, b2], ... and a mapped tail past the last.
void append_half_line(std::vector<Segment>& segments, const Integrand* f, double start,
                      std::span<const double> breakpoints) {
    double a = start;
    for (double b : clean_breakpoints(breakpoints, start)) {
        segments.push_back({f, false, 0.0, 1.0, a, b});
        a = b;
    }
    segments.push_back({f, true, a, std::max(a, 1.0), 0.0, 1.0});
}

void append_interval(std::vector<Segment>& segments, const Integrand* f, double a, double b,
                     std::span<const double> breakpoints) {
    double lo = a;
    for (double bp : clean_breakpoints(breakpoints, a)) {
        if (bp >= b) break;
        segments.push_back({f, false, 0.0, 1.0, lo, bp});
        lo = bp;
    }
    segments.push_back({f, false, 0.0, 1.0, lo, b});
}

}  // namespace

QuadratureResult integrate_interval(const Integrand& f, double a, double b,
                                    const QuadratureConfig& config) {
    config.validate();
    if (!(std::isfinite(a) && std::isfinite(b))) throw InvalidArgument("interval endpoints must be finite");
    if (a == b) return {0.0, 0.0, 0, true};
    if (b < a) {
        auto r = integrate_interval(f, b, a, config);
        r.value = -r.value;
        return r;
    }
    return Engine({{&f, false, 0.0, 1.0, a, b}}, config).run();
}

QuadratureResult integrate_semi_infinite(const Integrand& f, std::span<const double> breakpoints,
                                         const QuadratureConfig& config) {
    config.validate();
    for (double b : breakpoints) {
        if (!(b > 0.0)) throw InvalidArgument("breakpoints must be positive");
    }
    std::vector<Segment> segments;
    append_half_line(segments, &f, 0.0, breakpoints);
    return Engine(std::move(segments), config).run();
}

QuadratureResult integrate_principal_value(const Integrand& f, double pole,
                                           const QuadratureConfig& config,
                                           std::span<const double> breakpoints) {
    config.validate();
    if (!(pole > 0.0)) throw PoleAtBoundary("principal-value pole must lie strictly inside (0, inf)");
    if (!std::isfinite(pole)) throw InvalidArgument("principal-value pole must be finite");

    const Integrand outside = [&f, pole](double z) { return f(z) / (z - pole); };

    auto estimate = [&](double eps) {
        const Integrand window = [&f, pole](double u) { return (f(pole + u) - f(pole - u)) / u; };
        std::vector<double> folded;
        for (double bp : breakpoints) {
            const double u = std::abs(bp - pole);
            if (u > 0.0 && u < eps) folded.push_back(u);
        }
        std::vector<Segment> segments;
        if (pole - eps > 0.0) append_interval(segments, &outside, 0.0, pole - eps, breakpoints);
        append_interval(segments, &window, 0.0, eps, folded);
        append_half_line(segments, &outside, pole + eps, breakpoints);
        return Engine(std::move(segments), config).run();
    };

    // The fully folded window (eps = pole) leaves no near-singular piece
    // outside it; smaller windows serve as the consistency check and take
    // over only if the folded integrand is too rough to agree with them.
    double eps = pole;
    QuadratureResult previous = estimate(eps);
    QuadratureResult best = previous;
    std::size_t evaluations = previous.evaluations;
    while (eps > 1e-3 * pole * (1.0 + 1e-9)) {
        eps *= 0.1;
        QuadratureResult current;
        try {
            current = estimate(eps);
        } catch (const NonConvergence& e) {
            // A narrower window reintroduces cancelling mass on both sides
            // of the pole; when that alone stalls it, agreement within the
            // stalled estimate's own error still confirms a converged wider one.
            const QuadratureResult& partial = e.partial();
            const double tol = std::max(config.rel_tol * std::abs(previous.value), config.abs_tol);
            if (previous.converged &&
                std::abs(partial.value - previous.value) <= 10.0 * tol + partial.error_estimate) {
                best.evaluations = evaluations + partial.evaluations;
                return best;
            }
            throw;
        }
        evaluations += current.evaluations;
        const double tol = std::max(config.rel_tol * std::abs(current.value), config.abs_tol);
        if (std::abs(current.value - previous.value) <= 10.0 * tol) {
            best.evaluations = evaluations;
            return best;
        }
        previous = current;
        best = current;
    }
    std::ostringstream msg;
    msg << "principal value at pole " << pole << " did not stabilise under window refinement";
    previous.converged = false;
    previous.evaluations = evaluations;
    throw NonConvergence(msg.str(), previous, pole - eps, pole + eps, previous.error_estimate);
}

}  // namespace clbattery
