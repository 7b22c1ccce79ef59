#include "homog/errors.hpp"

#include <utility>

namespace homog {

ValidationError::ValidationError(const std::string& message, std::string field)
    : Error(field.empty() ? message : field + ": " + message), field_(std::move(field))
{}

} // namespace homog
