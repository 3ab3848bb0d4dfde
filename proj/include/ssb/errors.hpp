#ifndef SSB_ERRORS_HPP
#define SSB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ssb {

/// Root of every exception thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or unresolvable configuration (unknown preset, parity mismatch, ...).
class config_error : public error {
public:
    using error::error;
};

/// Evaluation point outside the admissible domain (chart box, r < domain_min).
class domain_error : public error {
public:
    using error::error;
};

/// A metric that should be SPD is not.
class geometry_error : public error {
public:
    using error::error;
};

class unsupported_order_error : public error {
public:
    using error::error;
};

/// An optional capability (analytic gradient, jet closure) was not supplied.
class capability_error : public error {
public:
    using error::error;
};

class unsupported_configuration_error : public error {
public:
    using error::error;
};

} // namespace ssb

#endif // SSB_ERRORS_HPP
