#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace drsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- trace ingest ---

class RecordParseError : public Error {
public:
    RecordParseError(std::size_t row, const std::string& reason)
        : Error("row " + std::to_string(row) + ": " + reason), row_(row), reason_(reason) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t row_;
    std::string reason_;
};

class EmptyTraceError : public Error {
public:
    EmptyTraceError() : Error("no usage records to aggregate") {}
};

// --- forecaster ---

class DegenerateRangeError : public Error {
public:
    DegenerateRangeError() : Error("min-max range is degenerate (max <= min)") {}
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class EmptySplitError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class NonFiniteLossError : public Error {
public:
    explicit NonFiniteLossError(std::size_t epoch)
        : Error("non-finite training loss at epoch " + std::to_string(epoch)), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

class AllTargetsNearZeroError : public Error {
public:
    AllTargetsNearZeroError() : Error("MAPE undefined: every target is near zero") {}
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

// --- cluster simulation ---

class UnknownClusterError : public Error {
public:
    explicit UnknownClusterError(const std::string& name) : Error("unknown cluster '" + name + "'") {}
};

class AppNotRunningError : public Error {
public:
    AppNotRunningError(const std::string& app, const std::string& cluster)
        : Error("app '" + app + "' is not running on cluster '" + cluster + "'") {}
};

class BackupNotFoundError : public Error {
public:
    explicit BackupNotFoundError(const std::string& cluster)
        : Error("no backup found for cluster '" + cluster + "'") {}
};

class AlreadyDisconnectedError : public Error {
public:
    explicit AlreadyDisconnectedError(const std::string& cluster)
        : Error("cluster '" + cluster + "' is already disconnected") {}
};

class TargetDisconnectedError : public Error {
public:
    explicit TargetDisconnectedError(const std::string& cluster)
        : Error("restore target '" + cluster + "' is disconnected") {}
};

// --- recovery pipeline ---

class ReplayExhaustedError : public Error {
public:
    ReplayExhaustedError() : Error("replay target list exhausted") {}
};

class SelectionError : public Error {
public:
    using Error::Error;
};

class PipelineStateError : public Error {
public:
    using Error::Error;
};

// --- harness ---

class ConfigParseError : public Error {
public:
    ConfigParseError(const std::string& path, const std::string& key, const std::string& reason)
        : Error(path + ": key '" + key + "': " + reason), path_(path), key_(key) {}

    const std::string& path() const noexcept { return path_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::string path_;
    std::string key_;
};

class ConfigInvalidError : public Error {
public:
    using Error::Error;
};

class ModelLoadError : public Error {
public:
    using Error::Error;
};

}  // namespace drsim
