#pragma once

#include <string>
#include <vector>

#include "capprice/model/instance.hpp"

namespace capprice::model {

struct Diagnostic {
    std::string invariant;  // stable class name, e.g. "contract.discount"
    std::string part;       // network, profiles, contract, prices or config
    std::string message;
};

/// One diagnostic per violated invariant instance; empty when all hold.
std::vector<Diagnostic> validate_instance(const Instance& inst);

}  // namespace capprice::model
