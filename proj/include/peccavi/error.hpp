#pragma once

#include <stdexcept>
#include <string>

namespace peccavi {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Spectrum handed to the inverse transform is not Hermitian.
class SymmetryError : public Error {
public:
    using Error::Error;
};

class ChannelError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// A file parsed but its content does not follow the expected schema.
class FormatError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace peccavi
