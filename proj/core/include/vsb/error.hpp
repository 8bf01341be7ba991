#ifndef VSB_ERROR_HPP
#define VSB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace vsb {

/// Base error for everything the toolkit raises on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid input data or configuration (bad file, schema violation,
/// precondition failure). The CLI maps this to exit code 2.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(what) {}
};

} // namespace vsb

#endif
