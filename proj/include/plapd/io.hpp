#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "plapd/eigen.hpp"
#include "plapd/existence.hpp"
#include "plapd/fem.hpp"
#include "plapd/identities.hpp"
#include "plapd/nonlinearity.hpp"
#include "plapd/radial.hpp"

namespace plapd::io {

using nlohmann::json;

json to_json(const CheckResult& c);
json to_json(const HypothesisReport& h);
json to_json(const SolveReport& r, bool with_values = false);
json to_json(const IdentityReport& r);
json to_json(const EigenPair& e);
json to_json(const BranchPoint& b);
json to_json(const BranchReport& b);
json to_json(const LambdaMaxReport& r);
json to_json(const AlphaRow& r);
json to_json(const BvpResult& r);
json mesh_stats(const Mesh& m);

/// Mesh, nodal values, p and the nonlinearity name in one document.
json solution_document(const FeFunction& u, double p, const std::string& f);
/// Inverse of solution_document; the domain is rebuilt from its description.
FeFunction read_solution(const json& doc, double* p = nullptr, std::string* f = nullptr);

std::string nodal_csv(const FeFunction& u);               // x,y,u
std::string profile_csv(const RadialProfile& profile);    // r,u

}  // namespace plapd::io
