#ifndef FSG_REPORT_JSON_HPP
#define FSG_REPORT_JSON_HPP

#include <json.hpp>

#include "fsg/cohomology.hpp"

namespace fsg {

using Json = nlohmann::ordered_json;

// Bound values always carry their sidedness.
Json bound_json(double value, const char* side);

Json classification_to_json(const DirectedMultigraph& g, const ClassificationReport& rep);
Json graded_to_json(const GradedH1Report& rep);
Json h1_to_json(const DirectedMultigraph& g, const H1Result& result);
Json spec_to_json(const DerivationSpec& spec);
Json fourier_to_json(const PathBasis& basis, const FourierSeries& series);

}  // namespace fsg

#endif
