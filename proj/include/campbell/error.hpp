#pragma once

#include <stdexcept>
#include <string>

namespace campbell {

// Bad input: wrong shapes, broken preconditions, malformed model files.
class invalid_argument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure: non-convergence, singular pencils, degenerate cases.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A quantity sits on a classification boundary (zero discriminant and the like).
class degenerate_case : public numerical_error {
public:
    using numerical_error::numerical_error;
};

}  // namespace campbell
