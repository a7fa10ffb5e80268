#include "sonic/fields.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sonic/common.hpp"
#include "sonic/numerics.hpp"

namespace sonic {

FieldProfiles reconstruct(const Profile& m, const ProblemConfig& config) {
    const auto& x = m.grid->nodes;
    const std::size_t nn = x.size();
    const double J = config.J;

    std::vector<double> w(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        if (!(m.values[i] > 0.0)) throw DomainError("reconstruct: nonpositive m");
        const double d = m.values[i] - J;
        w[i] = d * d;
    }
    const std::vector<double> wr = nodal_derivative(*m.grid, w);

    FieldProfiles f;
    f.rho = make_profile(m.grid);
    f.u = make_profile(m.grid);
    f.flux = make_profile(m.grid);
    f.E = make_profile(m.grid);
    f.mach = make_profile(m.grid);
    for (std::size_t i = 0; i < nn; ++i) {
        const double r = x[i];
        const double mv = m.values[i];
        const double rw = radial_weight(r, config.n);
        f.rho.values[i] = mv / rw;
        f.u.values[i] = J / mv;
        f.flux.values[i] = J / rw;
        f.mach.values[i] = f.u.values[i];
        f.E.values[i] = (mv + J) * wr[i] / (2.0 * mv * mv * mv) + J / (config.tau * mv) -
                        (config.n - 1) / r;
    }
    return f;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json diagnostics_to_json(const Diagnostics& d) {
    nlohmann::json j;
    j["weak_residual_linf"] = d.weak_residual_linf;
    j["weak_residual_l2"] = d.weak_residual_l2;
    j["weak_residual_interior_linf"] = d.weak_residual_interior_linf;
    if (std::isfinite(d.lambda_star)) j["lambda_star"] = d.lambda_star;
    if (std::isfinite(d.ell)) j["ell"] = d.ell;
    if (std::isfinite(d.interior_gap)) j["interior_gap"] = d.interior_gap;
    j["holder_seminorm"] = d.holder_seminorm;
    j["iterations_per_stage"] = d.iterations_per_stage;
    j["total_inner_iterations"] = d.total_inner_iterations;
    j["bound_violation_count"] = d.bound_violation_count;
    j["bound_violation_max"] = d.bound_violation_max;
    j["stage_reg_params"] = d.stage_reg_params;
    j["stage_diffs"] = d.stage_diffs;
    if (!d.v_max_per_stage.empty()) j["v_max_per_stage"] = d.v_max_per_stage;
    j["continuation_converged"] = d.continuation_converged;
    return j;
}

}  // namespace

void export_fields(const FieldProfiles& fields, const Solution& solution,
                   const std::filesystem::path& path, ExportFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("export_fields: cannot open " + path.string());

    const auto& x = solution.m.grid->nodes;
    if (format == ExportFormat::Csv) {
        out << "r,m,rho,u,flux,E,mach\n";
        for (std::size_t i = 0; i < x.size(); ++i) {
            out << fmt_double(x[i]) << ',' << fmt_double(solution.m.values[i]) << ','
                << fmt_double(fields.rho.values[i]) << ',' << fmt_double(fields.u.values[i])
                << ',' << fmt_double(fields.flux.values[i]) << ','
                << fmt_double(fields.E.values[i]) << ',' << fmt_double(fields.mach.values[i])
                << '\n';
        }
    } else {
        nlohmann::json j;
        j["schema"] = "sonic-annulus/solution/v1";
        j["regime"] = regime_name(solution.regime);
        j["reg_param"] = solution.reg_param;
        j["grid"]["spacing"] = solution.m.grid->spacing == RadialGrid::Spacing::Uniform
                                   ? "uniform"
                                   : "clustered";
        j["grid"]["nodes"] = x;
        j["m"] = solution.m.values;
        j["fields"]["rho"] = fields.rho.values;
        j["fields"]["u"] = fields.u.values;
        j["fields"]["flux"] = fields.flux.values;
        j["fields"]["E"] = fields.E.values;
        j["fields"]["mach"] = fields.mach.values;
        j["diagnostics"] = diagnostics_to_json(solution.diagnostics);
        out << j.dump(2) << '\n';
    }
    if (!out) throw SchemaError("export_fields: write failure on " + path.string());
}

ImportedSolution import_solution(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("import_solution: cannot open " + path.string());

    ImportedSolution result;
    const std::string ext = path.extension().string();
    if (ext == ".csv") {
        std::string line;
        if (!std::getline(in, line)) throw SchemaError("import_solution: empty CSV");
        if (line.rfind("r,m,", 0) != 0)
            throw SchemaError("import_solution: unexpected CSV header: " + line);
        std::vector<double> r, m;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string tok;
            std::vector<double> row;
            while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
            if (row.size() != 7)
                throw SchemaError("import_solution: CSV row with " +
                                  std::to_string(row.size()) + " columns");
            r.push_back(row[0]);
            m.push_back(row[1]);
        }
        if (r.size() < 9) throw SchemaError("import_solution: too few CSV rows");
        GridPtr grid;
        try {
            grid = make_grid(RadialGrid::from_nodes(std::move(r)));
        } catch (const DomainError& e) {
            throw SchemaError(std::string("import_solution: bad grid: ") + e.what());
        }
        result.m = make_profile(grid, std::move(m));
        return result;
    }

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("import_solution: JSON parse error: ") + e.what());
    }
    try {
        std::vector<double> nodes = j.at("grid").at("nodes").get<std::vector<double>>();
        std::vector<double> m = j.at("m").get<std::vector<double>>();
        if (nodes.size() != m.size())
            throw SchemaError("import_solution: grid/profile length mismatch (" +
                              std::to_string(nodes.size()) + " vs " +
                              std::to_string(m.size()) + ")");
        GridPtr grid;
        try {
            grid = make_grid(RadialGrid::from_nodes(std::move(nodes)));
        } catch (const DomainError& e) {
            throw SchemaError(std::string("import_solution: bad grid: ") + e.what());
        }
        result.m = make_profile(grid, std::move(m));
        const std::string regime = j.at("regime").get<std::string>();
        if (regime == "subsonic")
            result.regime = Regime::Subsonic;
        else if (regime == "supersonic")
            result.regime = Regime::Supersonic;
        else
            throw SchemaError("import_solution: unknown regime " + regime);
        if (j.contains("reg_param")) result.reg_param = j["reg_param"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("import_solution: missing field: ") + e.what());
    }
    return result;
}

}  // namespace sonic
