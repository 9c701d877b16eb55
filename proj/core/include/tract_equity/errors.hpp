#pragma once

#include <stdexcept>
#include <string>

namespace tract_equity {

// Base for all fatal library errors. Row-level data problems are not thrown;
// they are collected into reject lists by the parsing functions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input file unreadable, or a required column is absent from the header.
class CsvError : public Error {
public:
    using Error::Error;
};

class MissingColumnError : public CsvError {
public:
    explicit MissingColumnError(const std::string& column)
        : CsvError("missing required column: " + column), column_(column) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

class EmptyNameError : public Error {
public:
    EmptyNameError() : Error("owner name is empty") {}
};

class MissingPredictionError : public Error {
public:
    explicit MissingPredictionError(const std::string& parcel_id)
        : Error("no race prediction for individual-owned parcel: " + parcel_id),
          parcel_id_(parcel_id) {}
    const std::string& parcel_id() const { return parcel_id_; }

private:
    std::string parcel_id_;
};

class MixedGeoidsError : public Error {
public:
    using Error::Error;
};

class GeoidMismatchError : public Error {
public:
    using Error::Error;
};

class ZeroTotalValueError : public Error {
public:
    ZeroTotalValueError() : Error("total individually-owned assessed value is zero") {}
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class FnrOutOfRangeError : public Error {
public:
    using Error::Error;
};

class TooFewPointsError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class InvalidSpecError : public Error {
public:
    using Error::Error;
};

}  // namespace tract_equity
