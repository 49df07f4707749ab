#include "abc/errors.hpp"

namespace abc {

Error::Error(std::string_view kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

void require_dim(std::size_t got, std::size_t expected, std::string_view what) {
    if (got != expected) {
        throw DimensionMismatch(std::string(what) + ": expected dimension " +
                                std::to_string(expected) + ", got " + std::to_string(got));
    }
}

}  // namespace abc
