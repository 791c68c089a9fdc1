#include "copulalab/registry.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "copulalab/families.hpp"

namespace copulalab::registry {

namespace {

using nlohmann::json;
using namespace copulalab::families;

double num_param(const json& params, const std::string& key, double fallback) {
    if (!params.contains(key)) return fallback;
    if (!params[key].is_number())
        throw std::invalid_argument("parameter '" + key + "' must be numeric");
    return params[key].get<double>();
}

int int_param(const json& params, const std::string& key, int fallback) {
    if (!params.contains(key)) return fallback;
    if (!params[key].is_number_integer())
        throw std::invalid_argument("parameter '" + key + "' must be an integer");
    return params[key].get<int>();
}

DependenceFunction resolve_base(const json& params, const std::string& key,
                                const std::string& fallback_family) {
    if (!params.contains(key)) return from_descriptor(json{{"family", fallback_family}});
    const json& value = params[key];
    if (value.is_string()) return from_descriptor(json{{"family", value.get<std::string>()}});
    if (value.is_object()) return from_descriptor(value);
    throw std::invalid_argument("parameter '" + key + "' must be a family name or descriptor");
}

TransformationMatrix matrix_param(const json& params) {
    if (params.contains("matrix")) {
        const json& rows = params["matrix"];
        if (!rows.is_array() || rows.empty())
            throw std::invalid_argument("parameter 'matrix' must be a non-empty array of rows");
        std::vector<std::vector<double>> entries;
        for (const auto& row : rows) {
            if (!row.is_array())
                throw std::invalid_argument("parameter 'matrix' rows must be arrays");
            entries.push_back(row.get<std::vector<double>>());
        }
        return TransformationMatrix(std::move(entries));
    }
    const double r = num_param(params, "r", 0.25);
    if (params.contains("a")) return corner_matrix(r, num_param(params, "a", r / 2.0));
    return corner_matrix(r);
}

std::vector<OrdinalBlock> blocks_param(const json& params) {
    if (!params.contains("blocks") || !params["blocks"].is_array())
        throw std::invalid_argument("parameter 'blocks' must be an array of {lo,hi,component}");
    std::vector<OrdinalBlock> blocks;
    for (const auto& b : params["blocks"]) {
        if (!b.contains("lo") || !b.contains("hi"))
            throw std::invalid_argument("ordinal block needs 'lo' and 'hi'");
        blocks.push_back({b["lo"].get<double>(), b["hi"].get<double>(),
                          resolve_base(b, "component", "pi2")});
    }
    return blocks;
}

}  // namespace

DependenceFunction from_descriptor(const nlohmann::json& descriptor) {
    if (!descriptor.is_object() || !descriptor.contains("family") ||
        !descriptor["family"].is_string())
        throw std::invalid_argument("descriptor must be an object with a 'family' name");
    const std::string family = descriptor["family"].get<std::string>();
    const json params = descriptor.value("params", json::object());

    if (family.size() == 2 || family.size() == 3) {
        const char head = family.front();
        if ((head == 'm' || head == 'w') && family.size() == 2 && std::isdigit(family[1]))
            return frechet(head == 'm' ? FrechetKind::M : FrechetKind::W, family[1] - '0');
        if (family.rfind("pi", 0) == 0 && family.size() == 3 && std::isdigit(family[2]))
            return frechet(FrechetKind::Pi, family[2] - '0');
    }
    if (family == "c_theta") return c_theta(num_param(params, "theta", 0.7));
    if (family == "phi") return phi_max_asym(resolve_base(params, "base", "pi2"));
    if (family == "c_lip") return c_lip(num_param(params, "c", 0.5));
    if (family == "d_lip") return d_lip(num_param(params, "a", 0.75));
    if (family == "c_lambda")
        return c_lambda(num_param(params, "lambda", 0.5), num_param(params, "c", 0.5),
                        num_param(params, "a", 0.75));
    if (family == "a_alpha")
        return a_alpha(AlmostDisjointIndex(num_param(params, "alpha", 0.5)),
                       num_param(params, "c", 0.5), num_param(params, "a", 0.75),
                       int_param(params, "depth", 32));
    if (family == "q_c") return q_c_quasi(resolve_base(params, "base", "m2"));
    if (family == "lift")
        return lift_to_n(resolve_base(params, "base", "q_c"), int_param(params, "n", 3));
    if (family == "theta_shuffle")
        return theta_shuffle(resolve_base(params, "base", "m2"), int_param(params, "N", 2));
    if (family == "psi_diagonal")
        return psi_diagonal(resolve_base(params, "base", "m2"), int_param(params, "N", 2));
    if (family == "transform")
        return apply_transformation(matrix_param(params), resolve_base(params, "base", "pi2"));
    if (family == "invariant")
        return invariant_copula(matrix_param(params), num_param(params, "tol", 1e-6),
                                int_param(params, "max_iter", 200))
            .copula;
    if (family == "diagonal_copula" || family == "omega_tilde") {
        const double exponent = num_param(params, "delta_exp", 2.0);
        if (exponent < 1.0 || exponent > 2.0)
            throw std::invalid_argument("parameter 'delta_exp' must lie in [1,2]");
        const Diagonal delta{[exponent](double t) { return std::pow(t, exponent); }};
        if (family == "diagonal_copula") return diagonal_copula(delta);
        return omega_tilde(diagonal_copula(delta), num_param(params, "t0", 0.5),
                           resolve_base(params, "q", "q_c"));
    }
    if (family == "c_n" || family == "c_osc") return c_n_oscillating(int_param(params, "n", 1));
    if (family == "ordinal_sum") return ordinal_sum(blocks_param(params));
    if (family == "w_ordinal_sum") return w_ordinal_sum(blocks_param(params));
    if (family == "mix")
        return mix(num_param(params, "lambda", 0.5), resolve_base(params, "f", "pi2"),
                   resolve_base(params, "g", "m2"));

    throw std::invalid_argument("unknown family '" + family + "'");
}

DependenceFunction from_descriptor_text(const std::string& text) {
    json descriptor;
    try {
        descriptor = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("descriptor is not valid JSON: ") + e.what());
    }
    return from_descriptor(descriptor);
}

std::vector<std::string> family_names() {
    return {"pi2",          "pi3",        "pi4",       "m2",          "m3",
            "m4",           "w2",         "w3",        "w4",          "c_theta",
            "phi",          "c_lip",      "d_lip",     "c_lambda",    "a_alpha",
            "q_c",          "lift",       "theta_shuffle", "psi_diagonal", "transform",
            "invariant",    "diagonal_copula", "omega_tilde", "c_n",  "ordinal_sum",
            "w_ordinal_sum", "mix"};
}

}  // namespace copulalab::registry
