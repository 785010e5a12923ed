#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bioace/core/types.hpp"
#include "bioace/gateway/gateway.hpp"

namespace bioace::nugget {

/// Atomic-fact extraction prompt with `text` substituted.
std::string nugget_generation_prompt(std::string_view text);

/// One nugget per non-blank line, with bullet and enumeration prefixes removed.
std::vector<std::string> parse_nugget_list(std::string_view response);

/// Throws EmptyNuggetList when the model returns nothing usable.
std::vector<std::string> extract_nugget_texts(std::string_view text, gateway::ModelGateway& gateway,
                                              const gateway::EndpointConfig& endpoint);

/// Same as extract_nugget_texts, wrapped as system nuggets of one answer.
std::vector<core::Nugget> extract_nuggets(std::string_view text, gateway::ModelGateway& gateway,
                                          const gateway::EndpointConfig& endpoint, const std::string& question_id,
                                          const std::string& system_id);

}  // namespace bioace::nugget
