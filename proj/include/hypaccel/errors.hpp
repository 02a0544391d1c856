#pragma once

#include <stdexcept>
#include <string>

namespace hypaccel {

/// Argument outside the region where the requested quantity exists.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Series diverges for the given parameters and argument.
class divergence_error : public domain_error {
public:
    using domain_error::domain_error;
};

/// A lower parameter is a non-positive integer.
class undefined_function_error : public domain_error {
public:
    using domain_error::domain_error;
};

/// Gamma function evaluated at a pole.
class pole_error : public domain_error {
public:
    using domain_error::domain_error;
};

/// The two remainder weights of the pair formula coincide.
class degenerate_weights_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class no_convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class singular_system_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class underflow_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class parse_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace hypaccel
