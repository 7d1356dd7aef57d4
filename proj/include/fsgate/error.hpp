#pragma once

#include <stdexcept>
#include <string>

namespace fsgate {

// Base for every error the library raises. The CLI maps subclasses onto exit
// statuses (input/config problems -> 2, numerical failures -> 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A column named by the schema does not exist in the file.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A cell could not be read as a finite number, or the file is empty.
class ParseError : public Error {
public:
    using Error::Error;
};

// Data is well-formed but breaks a dataset invariant (mixed labels per subject,
// too few subjects in a class).
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Bad arguments to a numerical routine: dimension mismatch, non-finite input,
// a single class where two are needed.
class InputError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace fsgate
