// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pforge {

// Stable error categories. The C API maps these one-to-one onto status codes.
enum class ErrorCode {
    Schema,
    Cardinality,
    Transport,
    BackendRefusal,
    BudgetExceeded,
    UnknownPurpose,
    TurnParse,
    MissingSuggestions,
    Template,
    Storage,
    InvalidText,
    GenerationExhausted,
    Validation,
    UnknownSession,
    UnknownParticipant,
    OutOfRangeScore,
    DuplicateJudgment,
    JudgeParse,
    Config,
    Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class SchemaError : public Error {
public:
    SchemaError(std::string field_path, std::string reason)
        : Error(ErrorCode::Schema, field_path + ": " + reason),
          field_path_(std::move(field_path)),
          reason_(std::move(reason)) {}
    const std::string& field_path() const noexcept { return field_path_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_path_;
    std::string reason_;
};

class CardinalityError : public Error {
public:
    explicit CardinalityError(const std::string& detail) : Error(ErrorCode::Cardinality, detail) {}
};

class TransportError : public Error {
public:
    TransportError(const std::string& detail, int last_status)
        : Error(ErrorCode::Transport, detail), last_status_(last_status) {}
    int last_status() const noexcept { return last_status_; }

private:
    int last_status_;
};

class BackendRefusal : public Error {
public:
    BackendRefusal(int status, std::string body)
        : Error(ErrorCode::BackendRefusal, "backend refused with HTTP " + std::to_string(status) + ": " + body),
          status_(status),
          body_(std::move(body)) {}
    int status() const noexcept { return status_; }
    const std::string& body() const noexcept { return body_; }

private:
    int status_;
    std::string body_;
};

class TurnParseError : public Error {
public:
    TurnParseError(std::string turn, int attempts, const std::string& last_error)
        : Error(ErrorCode::TurnParse,
                turn + " failed validation after " + std::to_string(attempts) + " attempts: " + last_error),
          turn_(std::move(turn)),
          attempts_(attempts) {}
    const std::string& turn() const noexcept { return turn_; }
    int attempts() const noexcept { return attempts_; }

private:
    std::string turn_;
    int attempts_;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field_path, const std::string& reason)
        : Error(ErrorCode::Config, field_path + ": " + reason), field_path_(std::move(field_path)) {}
    const std::string& field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};

}  // namespace pforge
