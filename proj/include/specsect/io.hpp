#ifndef SPECSECT_IO_HPP
#define SPECSECT_IO_HPP

#include <string>

#include <json.hpp>

#include "specsect/families.hpp"
#include "specsect/family.hpp"
#include "specsect/graded.hpp"
#include "specsect/sections.hpp"
#include "specsect/types.hpp"

namespace specsect {

using Json = nlohmann::json;

// Matrices travel as {"re": [[...]], "im": [[...]]}, row-major.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json tail_to_json(const TailDescriptor& t);
TailDescriptor tail_from_json(const Json& j);

// {"dim", "re", "im", "tail": {"kind", "rate": "polynomial", "exponent"}}
Json operator_to_json(const TruncatedOperator& a);
TruncatedOperator operator_from_json(const Json& j);

Json projection_to_json(const ProjectionMatrix& p);
ProjectionMatrix projection_from_json(const Json& j);

Json family_to_json(const SampledFamily& f);
SampledFamily family_from_json(const Json& j);

Json certificate_to_json(const SectionCertificate& c);
SectionCertificate certificate_from_json(const Json& j);

Json trivializer_to_json(const TrivializerRecord& r);
TrivializerRecord trivializer_from_json(const Json& j);

Json grading_to_json(const Grading& g);
Grading grading_from_json(const Json& j);

Json symbol_to_json(const SymbolSample& s);
SymbolSample symbol_from_json(const Json& j);

Json continuity_to_json(const ContinuityReport& r);
Json lower_bound_to_json(const LowerBoundCurve& c);

/// Family curve CSV: columns x, c_x, riesz_step, graph_step, flags.
/// Steps are attributed to the row's pair (x_k, x_{k+1}); the last row
/// carries empty step fields. Flags: semicolon-joined tokens.
std::string family_curves_csv(const SampledFamily& f, const ContinuityReport& cont,
                              const LowerBoundCurve& lower);

}  // namespace specsect

#endif
