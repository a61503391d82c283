#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "adic/diagnostics.hpp"
#include "adic/measure.hpp"
#include "adic/number_theory.hpp"
#include "adic/selection.hpp"
#include "adic/torus.hpp"

namespace adic {

// Key order is preserved so that dumps are byte-for-byte reproducible.
using Json = nlohmann::ordered_json;

// Big values are decimal strings; rationals are "num/den".
Json to_json(const BigInt& value);
Json to_json(const Rational& value);
Json to_json(const PlainInterval& value);
Json to_json(const AdicInterval& value);
Json to_json(const Enclosure& value);
Json to_json(const LogValue& value);

BigInt bigint_from(const Json& j);
Rational rational_from(const Json& j);
PlainInterval plain_from(const Json& j);
AdicInterval adic_from(const Json& j);

Json to_json(const OrderProfile& profile);
Json to_json(const FarCheck& check);

Json to_json(const SelectionCertificate& cert);
SelectionCertificate selection_from(const Json& j);
Json to_json(const SelectionFamily& family);
SelectionFamily family_from(const Json& j);

Json to_json(const XCertificate& cert);
XCertificate x_certificate_from(const Json& j);
Json to_json(const DependenceRelation& relation, const std::vector<long>& bases);
DependenceRelation relation_from(const Json& j);

Json to_json(const MeasureTree& tree);
MeasureTree tree_from(const Json& j);

Json to_json(const DoublingReport& report);
Json to_json(const OscillationReport& report);
Json to_json(const std::vector<VmoRow>& rows);

// Self-contained documents: {"type": ..., "version": 1, "body": ...}.
Json pairs_document(const OrderProfile& profile, long m1, const BigInt& k, const std::vector<CongruencePair>& pairs);
Json document(const std::string& type, Json body);

struct VerifyOutcome {
  bool ok = false;
  std::string type;
  std::string reason;
};

// Parses the document and re-checks every invariant it carries.
VerifyOutcome verify_document(const Json& doc);

Json parse_json(const std::string& text);
std::string dump(const Json& j);

}  // namespace adic
