#include "sonic/config_io.hpp"

#include <fstream>

#include <json.hpp>

#include "sonic/common.hpp"

namespace sonic {

namespace {

double require_number(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number())
        throw SchemaError(std::string("config: missing or non-numeric field \"") + field +
                          "\"");
    return j[field].get<double>();
}

DopingProfile parse_doping(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw SchemaError("config: doping must be an object with a \"kind\" string");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "constant") {
        return DopingProfile::constant(require_number(j, "value"));
    }
    if (kind == "poly") {
        if (!j.contains("coeffs") || !j["coeffs"].is_array())
            throw SchemaError("config: poly doping needs a \"coeffs\" array");
        return DopingProfile::polynomial(j["coeffs"].get<std::vector<double>>());
    }
    if (kind == "pwl") {
        if (!j.contains("knots") || !j["knots"].is_array())
            throw SchemaError("config: pwl doping needs a \"knots\" array");
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : j["knots"]) {
            if (!k.is_array() || k.size() != 2)
                throw SchemaError("config: each pwl knot must be [r, value]");
            knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
        return DopingProfile::piecewise_linear(std::move(knots));
    }
    throw SchemaError("config: unknown doping kind \"" + kind + "\"");
}

}  // namespace

Problem parse_problem(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw SchemaError("config: missing or non-integer field \"n\"");

    Problem p;
    try {
        p.config = ProblemConfig(j["n"].get<int>(), require_number(j, "r0"),
                                 require_number(j, "r1"), require_number(j, "tau"),
                                 require_number(j, "j0"));
    } catch (const DomainError& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
    if (!j.contains("doping")) throw SchemaError("config: missing field \"doping\"");
    try {
        p.doping = parse_doping(j["doping"]);
        p.doping.validate(p.config.r0, p.config.r1);
    } catch (const DomainError& e) {
        throw SchemaError(std::string("config: ") + e.what());
    }
    return p;
}

Problem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("config: cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_problem(text);
}

std::string problem_to_json(const Problem& problem) {
    nlohmann::json j;
    j["n"] = problem.config.n;
    j["r0"] = problem.config.r0;
    j["r1"] = problem.config.r1;
    j["tau"] = problem.config.tau;
    j["j0"] = problem.config.j0;
    j["J"] = problem.config.J;
    switch (problem.doping.kind) {
        case DopingProfile::Kind::Constant:
            j["doping"] = {{"kind", "constant"}, {"value", problem.doping.coeffs[0]}};
            break;
        case DopingProfile::Kind::Polynomial:
            j["doping"] = {{"kind", "poly"}, {"coeffs", problem.doping.coeffs}};
            break;
        case DopingProfile::Kind::PiecewiseLinear: {
            nlohmann::json knots = nlohmann::json::array();
            for (const auto& k : problem.doping.knots)
                knots.push_back({k.first, k.second});
            j["doping"] = {{"kind", "pwl"}, {"knots", knots}};
            break;
        }
    }
    return j.dump(2);
}

}  // namespace sonic
