#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mnarp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A grid or time span cannot represent the requested pulse.
class GridError : public Error
{
public:
    using Error::Error;
};

/// Arguments violate a documented precondition.
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// Integration failed its accuracy or conservation checks.
class NumericalError : public Error
{
public:
    using Error::Error;
};

/// A file could not be read or written, or its contents are malformed.
class IoError : public Error
{
public:
    using Error::Error;
};

/// Bad configuration; key() is the dotted path of the offending entry.
class ConfigError : public Error
{
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), m_key(std::move(key))
    {
    }

    const std::string& key() const { return m_key; }

private:
    std::string m_key;
};

} // namespace mnarp
