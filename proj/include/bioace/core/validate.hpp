#pragma once

#include <string>
#include <vector>

#include "bioace/core/types.hpp"

namespace bioace::core {

struct Violation {
    std::string record_id;
    std::string rule;
    std::string message;
};

/// Checks every typed invariant of the data model; an empty result means valid.
std::vector<Violation> validate_corpus(const Corpus& corpus);

}  // namespace bioace::core
