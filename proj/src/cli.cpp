#include "ddegrowth/cli.hpp"

#include "ddegrowth/analysis.hpp"
#include "ddegrowth/config.hpp"
#include "ddegrowth/errors.hpp"
#include "ddegrowth/numfmt.hpp"
#include "ddegrowth/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

namespace ddegrowth {

namespace {

// Writes via `emit` to cfg.out when set, otherwise to fallback.
void emit_csv(const RunConfig& cfg, std::ostream& fallback, const std::function<void(std::ostream&)>& emit) {
    if (!cfg.out) {
        emit(fallback);
        return;
    }
    std::ofstream file(*cfg.out, std::ios::binary);
    if (!file) {
        throw ConfigError(*cfg.out + ": cannot open for writing");
    }
    emit(file);
    if (!file) {
        throw NumericError(*cfg.out + ": write failed");
    }
}

int cmd_chareq(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.C) {
        throw ConfigError("chareq needs C");
    }
    if (!cfg.tau) {
        throw ConfigError("chareq needs tau");
    }
    double lambda = 0.0;
    try {
        lambda = solve_char_eq(*cfg.C, *cfg.tau);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", lambda);
    out << buf << '\n';
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const Scenario s = to_scenario(cfg);
    const Trajectory traj = simulate_euler(s);
    std::optional<Prediction> pred;
    try {
        pred = predict(s);
    } catch (const PredictionRefused&) {
        // No prediction: the CSV keeps its functional/ratio columns empty.
    }
    std::optional<TrajectoryColumns> cols;
    if (pred) {
        cols = observable_columns(traj, *pred);
    }
    emit_csv(cfg, out, [&](std::ostream& o) { write_trajectory_csv(o, traj, cols ? &*cols : nullptr); });
    if (cfg.out) {
        out << "scenario: " << s.to_string() << '\n';
        out << "samples: " << traj.size() << " (n=" << traj.first_n() << ".." << traj.last_n() << ")\n";
        out << "truncated: " << (traj.truncated() ? "yes" : "no") << '\n';
        out << "final log x: " << format_double(traj.state(traj.last_n()).log_value()) << '\n';
        if (pred && pred->regime().kind == Regime::Kind::FasterThanPoly) {
            const IteratedLogSlope slope = iterated_log_slope(traj, 3);
            out << "log_3 x over n=" << slope.first_n << ".." << slope.last_n
                << ": increasing " << (slope.increasing ? "yes" : "no") << ", mean slope "
                << format_double(slope.mean_slope) << ", fitted slope " << format_double(slope.fitted_slope)
                << ", continuous rate " << format_double(pred->continuous_rate()) << '\n';
        }
        out << "wrote: " << *cfg.out << '\n';
    }
    return kExitOk;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
    const Scenario s = to_scenario(cfg);
    write_prediction_report(out, s, predict(s));
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const Scenario s = to_scenario(cfg);
    const VerifyOutcome v = verify(s, cfg.tol);
    write_verify_report(out, s, v);
    if (cfg.out) {
        const Trajectory traj = simulate_euler(s);
        const TrajectoryColumns cols = observable_columns(traj, v.prediction);
        emit_csv(cfg, out, [&](std::ostream& o) { write_trajectory_csv(o, traj, &cols); });
    }
    return v.passed ? kExitOk : kExitVerificationFailed;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    if (cfg.step_ns.size() < 3) {
        throw ConfigError("sweep needs N to list at least three values");
    }
    const Scenario s = to_scenario(cfg);
    for (std::size_t i = 1; i < cfg.step_ns.size(); ++i) {
        (void)to_scenario(cfg, i);
    }
    EstimateOptions options;
    if (cfg.tol) {
        options.tolerance = *cfg.tol;
    }
    const SweepTable table = sweep_h(s, cfg.step_ns, options);
    emit_csv(cfg, out, [&](std::ostream& o) { write_sweep_csv(o, table); });
    if (cfg.out) {
        out << "extrapolated: " << format_double(table.extrapolated) << '\n';
        out << "continuous rate: " << format_double(table.continuous_rate) << '\n';
        out << "wrote: " << *cfg.out << '\n';
    }
    return kExitOk;
}

int cmd_envelope(const RunConfig& cfg, std::ostream& out) {
    const Scenario s = to_scenario(cfg);
    const EnvelopeSetup setup = envelope_setup(s, cfg.eps.value_or(0.5));
    const Trajectory traj = simulate_euler(s);
    const EnvelopeResult result = envelope_check(s, traj, setup.params, setup.functional);
    write_envelope_report(out, s, setup, result);
    emit_csv(cfg, out, [&](std::ostream& o) { write_envelope_csv(o, result, s.h()); });
    return result.dominated ? kExitOk : kExitVerificationFailed;
}

int dispatch(Command c, const RunConfig& cfg, std::ostream& out) {
    switch (c) {
        case Command::Simulate: return cmd_simulate(cfg, out);
        case Command::Predict: return cmd_predict(cfg, out);
        case Command::Verify: return cmd_verify(cfg, out);
        case Command::Sweep: return cmd_sweep(cfg, out);
        case Command::Chareq: return cmd_chareq(cfg, out);
        case Command::Envelope: return cmd_envelope(cfg, out);
    }
    return kExitConfigError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Euler simulation and growth-rate verification for x'(t) = f(x(t)) + g(x(t - tau))", "ddegrowth"};
    std::vector<std::string> positional;
    app.add_option("args", positional, "command, config file and key=value overrides, in any order");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    std::optional<Command> explicit_command;
    std::vector<std::string> files;
    std::vector<std::string> overrides;
    for (const std::string& a : positional) {
        if (a.find('=') != std::string::npos) {
            overrides.push_back(a);
        } else if (auto c = parse_command(a); c && !explicit_command) {
            explicit_command = c;
        } else {
            files.push_back(a);
        }
    }

    try {
        if (files.size() > 1) {
            throw ConfigError("one config file per run, got " + std::to_string(files.size()));
        }
        RunConfig cfg = files.empty() ? RunConfig{} : load_config(files.front());
        for (std::size_t i = 0; i < overrides.size(); ++i) {
            const auto eq = overrides[i].find('=');
            apply_setting(cfg, std::string_view(overrides[i]).substr(0, eq),
                          std::string_view(overrides[i]).substr(eq + 1), "argument " + std::to_string(i + 1));
        }
        const std::optional<Command> command = explicit_command ? explicit_command : cfg.command;
        if (!command) {
            throw ConfigError("no command given (simulate, predict, verify, sweep, chareq, envelope)");
        }
        return dispatch(*command, cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const PredictionRefused& e) {
        err << "prediction refused: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const HorizonError& e) {
        err << "horizon exceeded: " << e.what() << '\n';
        return kExitNumericError;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumericError;
    } catch (const SimulationError& e) {
        err << "simulation error: " << e.what() << '\n';
        return kExitNumericError;
    } catch (const EstimationError& e) {
        err << "estimation error: " << e.what() << '\n';
        return kExitNumericError;
    }
}

}  // namespace ddegrowth
