#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include "sonic/model.hpp"

namespace sonic {

struct Problem {
    ProblemConfig config;
    DopingProfile doping;
};

/// Parses {"n":2,"r0":1.0,"r1":2.0,"tau":1.0,"j0":1.0,"doping":{...}} where
/// doping is one of {"kind":"constant","value":v}, {"kind":"poly","coeffs":[...]},
/// {"kind":"pwl","knots":[[r,v],...]}. Throws SchemaError with the offending
/// field on malformed input.
Problem load_problem(const std::filesystem::path& path);
Problem parse_problem(const std::string& json_text);

std::string problem_to_json(const Problem& problem);

}  // namespace sonic
