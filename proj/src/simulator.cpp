#include "ddegrowth/simulator.hpp"

#include "ddegrowth/errors.hpp"
#include "ddegrowth/functionals.hpp"
#include "ddegrowth/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ddegrowth {

namespace {

std::string trim_lower(std::string_view text) {
    std::string out;
    for (const char ch : text) {
        if (ch != ' ' && ch != '\t' && ch != '\r' && ch != '\n') {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    return out;
}

double parse_number(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return v;
}

void require_positive_finite(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite, got " + format_double(v));
    }
}

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (const char ch : text) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 1099511628211ULL;
    }
    return hash;
}

LogReal euler_step(const CoefficientSpec& f, const CoefficientSpec& g, double h, LogReal current, LogReal delayed) {
    const LogReal drift = f.is_zero() ? LogReal::zero() : log_scale(f.eval_log(current), h);
    const LogReal push = log_scale(g.eval_log(delayed), h);
    return log_add(current, log_add(drift, push));
}

bool overflowed(LogReal x) {
    return x.exceeds_horizon() || std::isnan(x.log_value()) || std::isinf(x.log_value());
}

}  // namespace

// ---------------------------------------------------------------------------
// History
// ---------------------------------------------------------------------------

History History::constant(double psi0) {
    require_positive_finite(psi0, "constant history");
    return History(true, psi0, psi0);
}

History History::ramp(double at_minus_tau, double at_zero) {
    require_positive_finite(at_minus_tau, "ramp start");
    require_positive_finite(at_zero, "ramp end");
    return History(false, at_minus_tau, at_zero);
}

double History::at(double t, double tau) const {
    if (!(t >= -tau) || !(t <= 0.0)) {
        throw DomainError("history is defined on [-tau, 0], got t = " + format_double(t));
    }
    if (constant_) {
        return start_;
    }
    const double s = (t + tau) / tau;
    return start_ + (end_ - start_) * s;
}

std::string History::to_string() const {
    if (constant_) {
        return "const(" + format_double(start_) + ")";
    }
    return "ramp(" + format_double(start_) + "," + format_double(end_) + ")";
}

History parse_history(std::string_view text) {
    const std::string s = trim_lower(text);
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')') {
        throw std::invalid_argument("history must be const(v) or ramp(a,b), got '" + std::string(text) + "'");
    }
    const std::string name = s.substr(0, open);
    const std::string args = s.substr(open + 1, s.size() - open - 2);
    if (name == "const") {
        return History::constant(parse_number(args));
    }
    if (name == "ramp") {
        const auto comma = args.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("ramp history needs two values");
        }
        return History::ramp(parse_number(std::string_view(args).substr(0, comma)),
                             parse_number(std::string_view(args).substr(comma + 1)));
    }
    throw std::invalid_argument("unknown history shape '" + name + "'");
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

Scenario::Scenario(CoefficientSpec f, CoefficientSpec g, double tau, History history, std::int64_t step_n,
                   double horizon_t)
    : f_(std::move(f)), g_(std::move(g)), tau_(tau), history_(history), step_n_(step_n), horizon_(horizon_t) {}

Scenario Scenario::make(CoefficientSpec f, CoefficientSpec g, double tau, History history, std::int64_t step_n,
                        double horizon_t) {
    require_positive_finite(tau, "tau");
    require_positive_finite(horizon_t, "horizon");
    if (step_n < 1) {
        throw DomainError("N must be a positive integer, got " + std::to_string(step_n));
    }
    if (g.is_zero()) {
        throw DomainError("g must be positive, got zero");
    }
    if (!std::isfinite(g.monotone_from())) {
        throw DomainError("g = " + g.to_string() + " is not eventually nondecreasing");
    }
    if (!reciprocal_integral_diverges(f)) {
        throw DomainError("f = " + f.to_string() +
                          " allows finite-time explosion: int^inf du/f(u) must diverge");
    }
    return Scenario(std::move(f), std::move(g), tau, history, step_n, horizon_t);
}

std::int64_t Scenario::steps() const noexcept {
    return static_cast<std::int64_t>(std::floor(horizon_ / h() + 1e-9));
}

Scenario Scenario::with_step_n(std::int64_t step_n) const {
    return make(f_, g_, tau_, history_, step_n, horizon_);
}

Scenario Scenario::with_f(CoefficientSpec f) const {
    return make(std::move(f), g_, tau_, history_, step_n_, horizon_);
}

std::string Scenario::to_string() const {
    return "f=" + f_.to_string() + " g=" + g_.to_string() + " tau=" + format_double(tau_) +
           " psi=" + history_.to_string() + " N=" + std::to_string(step_n_) + " horizon=" + format_double(horizon_);
}

std::uint64_t Scenario::fingerprint() const { return fnv1a(to_string()); }

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

Trajectory::Trajectory(std::int64_t first_n, double h, std::vector<LogReal> states, Mode mode, bool truncated,
                       std::uint64_t fingerprint, std::vector<double> direct_values)
    : first_n_(first_n),
      h_(h),
      states_(std::move(states)),
      direct_(std::move(direct_values)),
      mode_(mode),
      truncated_(truncated),
      fingerprint_(fingerprint) {
    if (states_.empty()) {
        throw PreconditionError("trajectory needs at least one sample");
    }
    if (mode_ == Mode::Direct && direct_.size() != states_.size()) {
        throw PreconditionError("direct trajectory needs one value per sample");
    }
}

LogReal Trajectory::state(std::int64_t n) const {
    if (n < first_n_ || n > last_n()) {
        throw DomainError("sample " + std::to_string(n) + " outside [" + std::to_string(first_n_) + ", " +
                          std::to_string(last_n()) + "]");
    }
    return states_[static_cast<std::size_t>(n - first_n_)];
}

double Trajectory::value(std::int64_t n) const {
    const LogReal s = state(n);
    if (mode_ == Mode::Direct) {
        return direct_[static_cast<std::size_t>(n - first_n_)];
    }
    return s.value();
}

// ---------------------------------------------------------------------------
// Schemes
// ---------------------------------------------------------------------------

Trajectory simulate_euler(const Scenario& s) {
    const std::int64_t big_n = s.step_n();
    const double h = s.h();
    const std::int64_t steps = s.steps();

    std::vector<LogReal> states;
    states.reserve(static_cast<std::size_t>(big_n + steps + 1));
    for (std::int64_t n = -big_n; n <= 0; ++n) {
        const double t = n == -big_n ? -s.tau() : static_cast<double>(n) * h;
        states.push_back(LogReal::from_value(s.history().at(t, s.tau())));
    }

    bool truncated = false;
    for (std::int64_t n = 0; n < steps; ++n) {
        // states[k] holds sample k - N, so sample n sits at n + N.
        const auto idx = static_cast<std::size_t>(n + big_n);
        LogReal next;
        try {
            next = euler_step(s.f(), s.g(), h, states[idx], states[idx - static_cast<std::size_t>(big_n)]);
        } catch (const DomainError& e) {
            throw SimulationError(n, e.what());
        }
        if (overflowed(next)) {
            truncated = true;
            break;
        }
        states.push_back(next);
    }
    return Trajectory(-big_n, h, std::move(states), Mode::LogDomain, truncated, s.fingerprint());
}

Trajectory simulate_direct(const Scenario& s, double cap) {
    require_positive_finite(cap, "cap");
    const std::int64_t big_n = s.step_n();
    const double h = s.h();
    const std::int64_t steps = s.steps();

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(big_n + steps + 1));
    for (std::int64_t n = -big_n; n <= 0; ++n) {
        const double t = n == -big_n ? -s.tau() : static_cast<double>(n) * h;
        values.push_back(s.history().at(t, s.tau()));
    }

    bool truncated = false;
    for (std::int64_t n = 0; n < steps; ++n) {
        const auto idx = static_cast<std::size_t>(n + big_n);
        const double current = values[idx];
        const double delayed = values[idx - static_cast<std::size_t>(big_n)];
        double next = 0.0;
        try {
            const double drift = s.f().is_zero() ? 0.0 : h * s.f().eval(current);
            next = current + (drift + h * s.g().eval(delayed));
        } catch (const DomainError& e) {
            throw SimulationError(n, e.what());
        }
        if (!std::isfinite(next) || next > cap) {
            truncated = true;
            break;
        }
        values.push_back(next);
    }

    std::vector<LogReal> states;
    states.reserve(values.size());
    for (const double v : values) {
        states.push_back(LogReal::from_value(v));
    }
    return Trajectory(-big_n, h, std::move(states), Mode::Direct, truncated, s.fingerprint(), std::move(values));
}

LogReal interpolate(const Trajectory& traj, double t) {
    const double h = traj.h();
    const double last_t = traj.t(traj.last_n());
    const double first_t = traj.t(traj.first_n());
    if (!(t >= first_t - 1e-12 * std::abs(first_t)) || !(t <= last_t + 1e-12 * std::abs(last_t))) {
        throw DomainError("interpolate: t = " + format_double(t) + " outside [" + format_double(first_t) + ", " +
                          format_double(last_t) + "]");
    }
    const double p = t / h;
    const double nearest = std::round(p);
    if (std::abs(p - nearest) < 1e-9) {
        return traj.state(std::clamp(static_cast<std::int64_t>(nearest), traj.first_n(), traj.last_n()));
    }
    const auto n = std::clamp(static_cast<std::int64_t>(std::floor(p)), traj.first_n(), traj.last_n() - 1);
    const double theta = p - static_cast<double>(n);
    return log_add(log_scale(traj.state(n), 1.0 - theta), log_scale(traj.state(n + 1), theta));
}

Trajectory iterate_undelayed(const CoefficientSpec& g, double h, double y0, std::int64_t steps) {
    require_positive_finite(h, "h");
    require_positive_finite(y0, "y0");
    if (steps < 0) {
        throw DomainError("steps must be nonnegative");
    }
    std::vector<LogReal> states;
    states.reserve(static_cast<std::size_t>(steps + 1));
    states.push_back(LogReal::from_value(y0));
    bool truncated = false;
    for (std::int64_t n = 0; n < steps; ++n) {
        LogReal next;
        try {
            next = log_add(states.back(), log_scale(g.eval_log(states.back()), h));
        } catch (const DomainError& e) {
            throw SimulationError(n, e.what());
        }
        if (overflowed(next)) {
            truncated = true;
            break;
        }
        states.push_back(next);
    }
    const std::string tag = "undelayed g=" + g.to_string() + " h=" + format_double(h) + " y0=" + format_double(y0);
    return Trajectory(0, h, std::move(states), Mode::LogDomain, truncated, fnv1a(tag));
}

Trajectory simulate_undelayed(const CoefficientSpec& g, double h, double y0, std::int64_t steps) {
    if (g.is_zero() || classify_regime(g).kind != Regime::Kind::RV1Superlinear) {
        throw PreconditionError("undelayed oracle needs g regularly varying of index 1 with g(y)/y -> inf; " +
                                g.to_string() + " is not");
    }
    return iterate_undelayed(g, h, y0, steps);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const TrajectoryColumns* columns) {
    const auto cell = [](const std::vector<std::optional<double>>& col, std::size_t i) -> std::string {
        if (i < col.size() && col[i].has_value()) {
            return format_double(*col[i]);
        }
        return "";
    };
    out << "n,t,log_x,functional,ratio\n";
    for (std::int64_t n = traj.first_n(); n <= traj.last_n(); ++n) {
        const auto i = static_cast<std::size_t>(n - traj.first_n());
        out << n << ',' << format_double(traj.t(n)) << ',' << format_double(traj.state(n).log_value()) << ',';
        if (columns != nullptr) {
            out << cell(columns->functional, i) << ',' << cell(columns->ratio, i);
        } else {
            out << ',';
        }
        out << '\n';
    }
}

}  // namespace ddegrowth
