#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sonic/grid.hpp"
#include "sonic/model.hpp"
#include "sonic/solution.hpp"

namespace sonic {

enum class ExportFormat { Csv, Json };

/// Physical radial fields reconstructed from a converged m-profile.
struct FieldProfiles {
    Profile rho;   // density m / r^{n-1}
    Profile u;     // velocity J / m
    Profile flux;  // momentum J / r^{n-1}
    Profile E;     // electric field
    Profile mach;  // |u| / c with isothermal sound speed c = 1
};

/// rho = m/r^{n-1}, u = J/m, flux = J/r^{n-1}, mach = u and
///   E = (m+J) [(m-J)^2]' / (2 m^3) + J/(tau m) - (n-1)/r,
/// the derivative taken on w = (m-J)^2 (centered, one-sided second order at
/// the endpoints). Requires m > 0 nodewise.
FieldProfiles reconstruct(const Profile& m, const ProblemConfig& config);

/// CSV columns exactly: r,m,rho,u,flux,E,mach (full double precision).
void export_fields(const FieldProfiles& fields, const Solution& solution,
                   const std::filesystem::path& path, ExportFormat format);

/// Minimal content needed to re-verify a stored solution.
struct ImportedSolution {
    Profile m;
    std::optional<Regime> regime;     // absent for CSV (inferred by caller)
    std::optional<double> reg_param;  // absent for CSV
};

/// Reads a solution file produced by export_fields (either format).
/// Throws SchemaError on malformed content.
ImportedSolution import_solution(const std::filesystem::path& path);

}  // namespace sonic
