#pragma once

#include <string_view>

namespace crowdkb::ns {

// Classes, properties and default vocabulary terms.
inline constexpr std::string_view kOntology = "http://example.org/crowdkb/ontology#";
// Minted instance nodes (tracks, composers, reified facts).
inline constexpr std::string_view kResource = "http://example.org/crowdkb/resource/";

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdYear = "http://www.w3.org/2001/XMLSchema#gYear";

}  // namespace crowdkb::ns
