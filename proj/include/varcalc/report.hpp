#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "varcalc/calculus.hpp"
#include "varcalc/catalog.hpp"
#include "varcalc/estimators.hpp"
#include "varcalc/growth.hpp"

namespace varcalc::report {

using json = nlohmann::ordered_json;

json value(const ExtReal& v);  // number, or the string "+inf"
json value(const Vec& v);
json value(const Generators& g);
json value(const Polyhedron& p);

// tool, version, command and seed.
json header(const std::string& command, std::uint64_t seed);

json growth(const GrowthReport& r);
json estimate(const LiminfEstimate& e, bool with_witnesses = false);
json falsify(const FalsifyResult& r, bool verified);
json max_formula(const MaxFormula& m);
json catalog_run(const CatalogEntry& e, bool& all_ok);

// Indented key: value rendering; conditions keep their (i)-(vi) labels.
std::string text(const json& report);

}  // namespace varcalc::report
