#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fleetscrub {

/// Base class for all recoverable fleetscrub errors. CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyFile : public Error {
public:
    explicit EmptyFile(const std::string& path)
        : Error("empty file: " + path), path(path) {}
    std::string path;
};

class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line, const std::string& reason)
        : Error("malformed row at line " + std::to_string(line) + ": " + reason),
          line(line),
          reason(reason) {}
    std::size_t line;
    std::string reason;
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(double value)
        : Error("utilization value out of [0,100]: " + std::to_string(value)), value(value) {}
    double value;
};

class NonMonotonicTime : public Error {
public:
    explicit NonMonotonicTime(std::int64_t hour)
        : Error("hour index not strictly increasing at hour " + std::to_string(hour)),
          hour(hour) {}
    std::int64_t hour;
};

class ClassAbsent : public Error {
public:
    explicit ClassAbsent(int label)
        : Error("class " + std::to_string(label) + " absent or too small"), label(label) {}
    int label;
};

class TooFewPoints : public Error {
public:
    TooFewPoints(std::size_t have, std::size_t need)
        : Error("training set has " + std::to_string(have) + " points, need >= " +
                std::to_string(need)),
          have(have),
          need(need) {}
    std::size_t have;
    std::size_t need;
};

class SingleClassTraining : public Error {
public:
    SingleClassTraining() : Error("training set contains a single class") {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t got, std::size_t expected)
        : Error("feature vector has dimension " + std::to_string(got) + ", model expects " +
                std::to_string(expected)),
          got(got),
          expected(expected) {}
    std::size_t got;
    std::size_t expected;
};

class EmptyCalibration : public Error {
public:
    EmptyCalibration() : Error("calibration set is empty") {}
};

class EmptyTest : public Error {
public:
    EmptyTest() : Error("test set is empty") {}
};

class NotConcern : public Error {
public:
    explicit NotConcern(int disk_index)
        : Error("disk " + std::to_string(disk_index) + " is not a concern disk"),
          disk_index(disk_index) {}
    int disk_index;
};

class SeriesTooShort : public Error {
public:
    explicit SeriesTooShort(std::size_t length)
        : Error("utilization series has " + std::to_string(length) +
                " samples, need >= 2"),
          length(length) {}
    std::size_t length;
};

class UnfittedModel : public Error {
public:
    UnfittedModel() : Error("forecast model has not been fitted") {}
};

class MissingActuals : public Error {
public:
    explicit MissingActuals(std::int64_t hour)
        : Error("actual utilization missing for hour " + std::to_string(hour)), hour(hour) {}
    std::int64_t hour;
};

}  // namespace fleetscrub
