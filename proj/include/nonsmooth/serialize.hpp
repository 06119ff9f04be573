#pragma once

#include <json.hpp>

#include "nonsmooth/bsg.hpp"
#include "nonsmooth/comity.hpp"
#include "nonsmooth/decomposer.hpp"
#include "nonsmooth/spectrum.hpp"

namespace nonsmooth {

using json = nlohmann::json;

/// Floats go out rounded to 9 decimals; NaN and infinities become null.
json fixed9(double v);
double read_double(const json& j);
json big(const Exact& v);
Exact read_big(const json& j);

GroupSet read_set(const json& j);  // embedded set object, same schema as set files
json element_json(const GroupSpec& spec, uint64_t index);
uint64_t read_element(const GroupSpec& spec, const json& j);

json to_json(const AdditiveStructure& s);
AdditiveStructure structure_from_json(const json& j);

json to_json(const ComityCertificate& c);
ComityCertificate comity_from_json(const json& j);

json to_json(const SidewaysCertificate& q);
SidewaysCertificate sideways_from_json(const json& j);

json to_json(const BsgCertificate& c);
BsgCertificate bsg_from_json(const json& j);

json to_json(const Block& b);
Block block_from_json(const json& j);
json to_json(const Decomposition& d);
Decomposition decomposition_from_json(const json& j);

json to_json(const HolderReport& h);
json to_json(const EnergyResult& e);
json to_json(const ValidationReport& v);

}  // namespace nonsmooth
