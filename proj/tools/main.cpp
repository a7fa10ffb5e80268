// sonic-annulus: radial sonic-boundary steady states of the isothermal
// Euler-Poisson semiconductor model on an annulus.
//
// Subcommands: check | solve | verify | sweep. Exit codes: 0 success,
// 1 input error, 2 hypotheses unsatisfied, 3 verification failure,
// 4 solver divergence.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sonic/config_io.hpp"
#include "sonic/fields.hpp"
#include "sonic/logging.hpp"
#include "sonic/model.hpp"
#include "sonic/subsonic.hpp"
#include "sonic/supersonic.hpp"
#include "sonic/verify.hpp"

namespace fs = std::filesystem;
using namespace sonic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitHypotheses = 2;
constexpr int kExitVerification = 3;
constexpr int kExitDivergence = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct SolveOptions {
    std::string regime;
    std::size_t nodes = 1024;
    std::string grid = "clustered";
    std::string out = "solution.json";
    std::string format = "auto";  // csv | json | auto (from extension)
    double picard_tol = 1e-10;
    double continuation_tol = 1e-8;
    int max_iter = 200;
    double relax = 1.0;
    bool upwind = false;
    unsigned jobs = std::thread::hardware_concurrency();
};

ExportFormat resolve_format(const SolveOptions& opt, const fs::path& out) {
    if (opt.format == "csv") return ExportFormat::Csv;
    if (opt.format == "json") return ExportFormat::Json;
    return out.extension() == ".csv" ? ExportFormat::Csv : ExportFormat::Json;
}

void print_report(std::ostream& os, const HypothesisReport& rep) {
    const char* tag = regime_name(rep.regime);
    for (const auto& c : rep.conditions) {
        os << '[' << tag << "] " << c.name << ": lhs=" << fmt(c.lhs) << " rhs=" << fmt(c.rhs)
           << " margin=" << fmt(c.margin) << " satisfied=" << (c.satisfied ? "yes" : "no")
           << '\n';
    }
    os << '[' << tag << "] B_inf=" << fmt(rep.B_inf) << " B_sup=" << fmt(rep.B_sup);
    if (rep.calB_inf)
        os << " calB_inf=" << fmt(*rep.calB_inf) << " calB_sup=" << fmt(*rep.calB_sup);
    os << '\n';
    os << '[' << tag << "] OVERALL: " << (rep.satisfied() ? "satisfied" : "not satisfied")
       << '\n';
}

nlohmann::json verification_to_json(const VerificationReport& rep) {
    nlohmann::json j;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"pass", c.pass}});
    j["checks"] = checks;
    j["weak_residual_linf"] = rep.weak_residual_linf;
    j["weak_residual_l2"] = rep.weak_residual_l2;
    j["weak_residual_interior_linf"] = rep.weak_residual_interior_linf;
    if (std::isfinite(rep.energy_identity_residual))
        j["energy_identity_residual"] = rep.energy_identity_residual;
    j["holder_seminorm"] = rep.holder_seminorm;
    if (std::isfinite(rep.lambda_star)) j["lambda_star"] = rep.lambda_star;
    if (std::isfinite(rep.ell)) j["ell"] = rep.ell;
    if (std::isfinite(rep.gw_defect)) j["gw_defect"] = rep.gw_defect;
    if (!rep.interior_gaps.empty()) {
        nlohmann::json gaps = nlohmann::json::array();
        for (const auto& [delta, eps] : rep.interior_gaps)
            gaps.push_back({{"delta", delta}, {"eps", eps}});
        j["interior_gaps"] = gaps;
    }
    j["poisson_residual"] = rep.poisson_residual;
    j["all_pass"] = rep.all_pass();
    return j;
}

void write_manifest(const fs::path& out, const std::string& command,
                    const std::string& config_path, const nlohmann::json& parameters) {
    nlohmann::json j;
    j["schema"] = "sonic-annulus/manifest/v1";
    j["tool_version"] = kToolVersion;
    j["timestamp"] = iso_timestamp();
    j["command"] = command;
    j["config_path"] = config_path;
    j["parameters"] = parameters;
    fs::path mpath = out;
    mpath += ".manifest.json";
    std::ofstream os(mpath, std::ios::binary);
    os << j.dump(2) << '\n';
}

nlohmann::json solve_parameters_json(const SolveOptions& opt) {
    return {{"regime", opt.regime},     {"nodes", opt.nodes},
            {"grid", opt.grid},         {"format", opt.format},
            {"picard_tol", opt.picard_tol}, {"continuation_tol", opt.continuation_tol},
            {"max_iter", opt.max_iter}, {"relax", opt.relax},
            {"upwind", opt.upwind}};
}

struct SolveOutcome {
    int exit_code = kExitOk;
    bool hypotheses_ok = false;
    bool converged = false;
    double certificate = kNaN;  // lambda_star or ell
    double weak_linf = kNaN;
    bool verified = false;
    std::string message;
};

// Shared by `solve` and each sweep element; writes the solution file and a
// manifest next to it.
SolveOutcome run_solve(const Problem& problem, const SolveOptions& opt,
                       const fs::path& out_path, const std::string& config_label) {
    SolveOutcome outcome;
    const Regime regime =
        opt.regime == "supersonic" ? Regime::Supersonic : Regime::Subsonic;

    const HypothesisReport rep =
        regime == Regime::Subsonic ? check_subsonic_hypotheses(problem.config, problem.doping)
                                   : check_supersonic_hypotheses(problem.config, problem.doping);
    outcome.hypotheses_ok = rep.satisfied();
    if (!outcome.hypotheses_ok) {
        outcome.exit_code = kExitHypotheses;
        outcome.message = "hypotheses unsatisfied";
        return outcome;
    }

    GridPtr grid = make_grid(opt.grid == "uniform"
                                 ? RadialGrid::uniform(problem.config.r0, problem.config.r1,
                                                       opt.nodes)
                                 : RadialGrid::clustered(problem.config.r0, problem.config.r1,
                                                         opt.nodes));

    Solution solution;
    try {
        if (regime == Regime::Subsonic) {
            SubsonicParams params;
            params.picard_tol = opt.picard_tol;
            params.picard_max_iter = opt.max_iter;
            params.continuation_tol = opt.continuation_tol;
            params.upwind = opt.upwind;
            solution = continuation_solve(problem.config, problem.doping, grid, params);
        } else {
            SupersonicParams params;
            params.inner_tol = opt.picard_tol;
            params.inner_max_iter = opt.max_iter;
            params.outer_max_iter = opt.max_iter;
            params.continuation_tol = opt.continuation_tol;
            params.relaxation = opt.relax;
            params.upwind = opt.upwind;
            solution =
                continuation_solve_supersonic(problem.config, problem.doping, grid, params);
        }
    } catch (const DivergenceError& e) {
        outcome.exit_code = kExitDivergence;
        outcome.message = e.what();
        return outcome;
    } catch (const ContinuationError& e) {
        outcome.exit_code = kExitDivergence;
        outcome.message = e.what();
        return outcome;
    } catch (const MaxPrincipleBreachError& e) {
        outcome.exit_code = kExitDivergence;
        outcome.message = e.what();
        return outcome;
    } catch (const IterateBelowSonicError& e) {
        outcome.exit_code = kExitDivergence;
        outcome.message = e.what();
        return outcome;
    } catch (const IterateOutOfBandError& e) {
        outcome.exit_code = kExitDivergence;
        outcome.message = e.what();
        return outcome;
    }
    outcome.converged = true;

    const FieldProfiles fields = reconstruct(solution.m, problem.config);
    const VerificationReport vrep =
        run_verification(solution, problem.config, problem.doping);
    outcome.verified = vrep.all_pass();
    outcome.weak_linf = vrep.weak_residual_interior_linf;
    outcome.certificate =
        regime == Regime::Subsonic ? vrep.lambda_star : vrep.ell;

    const ExportFormat format = resolve_format(opt, out_path);
    if (format == ExportFormat::Csv) {
        export_fields(fields, solution, out_path, ExportFormat::Csv);
        // Verification lives in a sibling JSON for CSV output.
        fs::path vpath = out_path;
        vpath += ".verify.json";
        std::ofstream os(vpath, std::ios::binary);
        os << verification_to_json(vrep).dump(2) << '\n';
    } else {
        // Single JSON: fields + diagnostics + verification.
        export_fields(fields, solution, out_path, ExportFormat::Json);
        std::ifstream in(out_path, std::ios::binary);
        nlohmann::json j;
        in >> j;
        in.close();
        j["config"] = nlohmann::json::parse(problem_to_json(problem));
        j["verification"] = verification_to_json(vrep);
        std::ofstream os(out_path, std::ios::binary);
        os << j.dump(2) << '\n';
    }
    write_manifest(out_path, "solve", config_label, solve_parameters_json(opt));

    outcome.exit_code = outcome.verified ? kExitOk : kExitVerification;
    if (!outcome.verified) outcome.message = "verification failures";
    return outcome;
}

void print_verification(std::ostream& os, const VerificationReport& rep) {
    for (const auto& c : rep.checks)
        os << "  " << c.name << ": value=" << fmt(c.value)
           << " threshold=" << fmt(c.threshold) << (c.pass ? " pass" : " FAIL") << '\n';
}

int do_check(const std::string& config_path, const std::string& regime) {
    Problem problem;
    try {
        problem = load_problem(config_path);
    } catch (const SchemaError& e) {
        std::cerr << e.what() << '\n';
        return kExitInput;
    }
    const HypothesisReport sub = check_subsonic_hypotheses(problem.config, problem.doping);
    const HypothesisReport sup = check_supersonic_hypotheses(problem.config, problem.doping);
    std::cout << "J=" << fmt(problem.config.J) << " n=" << problem.config.n << '\n';
    print_report(std::cout, sub);
    print_report(std::cout, sup);
    const bool ok = regime == "supersonic" ? sup.satisfied() : sub.satisfied();
    return ok ? kExitOk : kExitHypotheses;
}

int do_solve(const std::string& config_path, const SolveOptions& opt) {
    Problem problem;
    try {
        problem = load_problem(config_path);
    } catch (const SchemaError& e) {
        std::cerr << e.what() << '\n';
        return kExitInput;
    }
    const fs::path out_path(opt.out);
    SolveOutcome outcome = run_solve(problem, opt, out_path, config_path);
    if (!outcome.hypotheses_ok) {
        std::cerr << "hypotheses unsatisfied for regime " << opt.regime << ":\n";
        const HypothesisReport rep =
            opt.regime == "supersonic"
                ? check_supersonic_hypotheses(problem.config, problem.doping)
                : check_subsonic_hypotheses(problem.config, problem.doping);
        print_report(std::cerr, rep);
        return outcome.exit_code;
    }
    if (!outcome.converged) {
        std::cerr << "solver divergence: " << outcome.message << '\n';
        return outcome.exit_code;
    }
    std::cout << "converged (" << opt.regime << "), certificate=" << fmt(outcome.certificate)
              << ", weak_residual_linf=" << fmt(outcome.weak_linf) << '\n';
    std::cout << "wrote " << opt.out << " and " << opt.out << ".manifest.json\n";
    if (!outcome.verified) std::cout << "verification FAILED\n";
    return outcome.exit_code;
}

int do_verify(const std::string& solution_path, const std::string& config_path) {
    Problem problem;
    ImportedSolution imported;
    try {
        problem = load_problem(config_path);
        imported = import_solution(solution_path);
    } catch (const SchemaError& e) {
        std::cerr << e.what() << '\n';
        return kExitInput;
    }

    Solution solution;
    solution.m = imported.m;
    if (imported.regime) {
        solution.regime = *imported.regime;
    } else {
        // CSV carries no regime tag; infer from the interior sign of m - J.
        double mean = 0.0;
        for (std::size_t i = 1; i + 1 < solution.m.values.size(); ++i)
            mean += solution.m.values[i] - problem.config.J;
        solution.regime = mean >= 0.0 ? Regime::Subsonic : Regime::Supersonic;
    }
    if (imported.reg_param) solution.reg_param = *imported.reg_param;

    VerificationReport rep;
    try {
        rep = run_verification(solution, problem.config, problem.doping);
    } catch (const DomainError& e) {
        std::cerr << "verification precondition failure: " << e.what() << '\n';
        return kExitInput;
    }
    std::cout << "verification of " << solution_path << " ("
              << regime_name(solution.regime) << "):\n";
    print_verification(std::cout, rep);
    std::cout << (rep.all_pass() ? "all checks passed\n" : "verification FAILED\n");
    return rep.all_pass() ? kExitOk : kExitVerification;
}

int do_sweep(const std::string& config_path, const std::string& param,
             const std::vector<std::string>& value_tokens, const SolveOptions& opt,
             const std::string& out_dir) {
    Problem base;
    try {
        base = load_problem(config_path);
    } catch (const SchemaError& e) {
        std::cerr << e.what() << '\n';
        return kExitInput;
    }
    if (value_tokens.empty()) {
        std::cerr << "sweep: empty value list\n";
        return kExitInput;
    }
    std::vector<double> values;
    for (const auto& tok : value_tokens) {
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            std::cerr << "sweep: bad value '" << tok << "'\n";
            return kExitInput;
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    {
        std::ofstream probe(fs::path(out_dir) / ".write_probe");
        if (!probe) {
            std::cerr << "sweep: output directory not writable: " << out_dir << '\n';
            return kExitInput;
        }
    }
    fs::remove(fs::path(out_dir) / ".write_probe", ec);

    struct Row {
        std::string token;
        SolveOutcome outcome;
    };
    std::vector<Row> rows(values.size());

    const unsigned jobs = std::max(1u, opt.jobs);
    std::counting_semaphore<256> slots(static_cast<std::ptrdiff_t>(std::min(jobs, 256u)));
    std::vector<std::future<void>> futures;
    for (std::size_t i = 0; i < values.size(); ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
            slots.acquire();
            Problem variant = base;
            if (param == "tau")
                variant.config = ProblemConfig(base.config.n, base.config.r0, base.config.r1,
                                               values[i], base.config.j0);
            else
                variant.doping = base.doping.scaled(values[i]);
            const fs::path out = fs::path(out_dir) / (param + "_" + value_tokens[i] +
                                                      (opt.format == "csv" ? ".csv" : ".json"));
            Row row;
            row.token = value_tokens[i];
            try {
                row.outcome = run_solve(variant, opt, out, config_path);
            } catch (const std::exception& e) {
                row.outcome.exit_code = kExitDivergence;
                row.outcome.message = e.what();
            }
            rows[i] = std::move(row);
            slots.release();
        }));
    }
    for (auto& f : futures) f.get();

    nlohmann::json params = solve_parameters_json(opt);
    params["param"] = param;
    params["values"] = value_tokens;
    params["jobs"] = jobs;
    write_manifest(fs::path(out_dir) / "sweep", "sweep", config_path, params);

    std::ofstream summary(fs::path(out_dir) / "summary.csv", std::ios::binary);
    summary << "value,hypotheses_satisfied,converged,certificate,weak_residual_linf,"
               "verified\n";
    std::cout << "value hypotheses converged certificate weak_linf verified\n";
    for (const auto& row : rows) {
        const auto& o = row.outcome;
        summary << row.token << ',' << (o.hypotheses_ok ? 1 : 0) << ','
                << (o.converged ? 1 : 0) << ',' << fmt(o.certificate) << ','
                << fmt(o.weak_linf) << ',' << (o.verified ? 1 : 0) << '\n';
        std::cout << row.token << ' ' << (o.hypotheses_ok ? "yes" : "no") << ' '
                  << (o.converged ? "yes" : "no") << ' ' << fmt(o.certificate) << ' '
                  << fmt(o.weak_linf) << ' ' << (o.verified ? "yes" : "no") << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial sonic-boundary steady states of the Euler-Poisson semiconductor "
                 "model on an annulus"};
    app.require_subcommand(1);

    std::string config_path, solution_path, regime = "subsonic", param = "tau", out_dir;
    std::vector<std::string> value_tokens;
    SolveOptions opt;

    auto add_solver_flags = [&](CLI::App* cmd) {
        cmd->add_option("--nodes", opt.nodes, "grid cells (default 1024)");
        cmd->add_option("--grid", opt.grid, "uniform|clustered (default clustered)")
            ->check(CLI::IsMember({"uniform", "clustered"}));
        cmd->add_option("--format", opt.format, "csv|json (default from extension)")
            ->check(CLI::IsMember({"csv", "json", "auto"}));
        cmd->add_option("--picard-tol", opt.picard_tol, "inner fixed-point tolerance");
        cmd->add_option("--continuation-tol", opt.continuation_tol,
                        "stage-difference stopping tolerance");
        cmd->add_option("--max-iter", opt.max_iter, "iteration cap per fixed-point loop");
        cmd->add_option("--relax", opt.relax, "outer under-relaxation factor (supersonic)");
        cmd->add_flag("--upwind", opt.upwind, "one-sided differencing of the b y' term");
    };

    CLI::App* check = app.add_subcommand("check", "evaluate the existence hypotheses");
    check->add_option("config", config_path, "problem JSON")->required();
    check->add_option("--regime", regime, "subsonic|supersonic")
        ->required()
        ->check(CLI::IsMember({"subsonic", "supersonic"}));

    CLI::App* solve = app.add_subcommand("solve", "run the continuation solver");
    solve->add_option("config", config_path, "problem JSON")->required();
    solve->add_option("--regime", opt.regime, "subsonic|supersonic")
        ->required()
        ->check(CLI::IsMember({"subsonic", "supersonic"}));
    solve->add_option("--out", opt.out, "output path (default solution.json)");
    add_solver_flags(solve);

    CLI::App* verify = app.add_subcommand("verify", "re-verify a stored solution");
    verify->add_option("solution", solution_path, "solution CSV/JSON from solve")->required();
    verify->add_option("config", config_path, "problem JSON")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "independent solves over a parameter");
    sweep->add_option("config", config_path, "problem JSON")->required();
    sweep->add_option("--param", param, "tau|doping_scale")
        ->required()
        ->check(CLI::IsMember({"tau", "doping_scale"}));
    sweep->add_option("--values", value_tokens, "comma-separated list")
        ->required()
        ->delimiter(',');
    sweep->add_option("--regime", opt.regime, "subsonic|supersonic")
        ->required()
        ->check(CLI::IsMember({"subsonic", "supersonic"}));
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--jobs", opt.jobs, "parallel solves (default: hardware)");
    add_solver_flags(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (check->parsed()) return do_check(config_path, regime);
        if (solve->parsed()) return do_solve(config_path, opt);
        if (verify->parsed()) return do_verify(solution_path, config_path);
        if (sweep->parsed()) return do_sweep(config_path, param, value_tokens, opt, out_dir);
    } catch (const SchemaError& e) {
        std::cerr << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
