#pragma once

#include <stdexcept>
#include <string>

namespace vforge {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration / IO
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct MissingPathError : Error { using Error::Error; };

// Corpus
struct MalformedProblemError : Error {
  MalformedProblemError(std::string file_in, std::string reason_in)
      : Error("malformed problem " + file_in + ": " + reason_in),
        file(std::move(file_in)), reason(std::move(reason_in)) {}
  std::string file;
  std::string reason;
};
struct DuplicateIdError : Error {
  explicit DuplicateIdError(std::string id_in)
      : Error("duplicate problem id: " + id_in), id(std::move(id_in)) {}
  std::string id;
};

// Prompt rendering
struct EmptyDescriptionError : Error { using Error::Error; };
struct MissingSignatureError : Error { using Error::Error; };
struct EmptyVerifierOutputError : Error { using Error::Error; };
struct StrategyRequiresSignatureError : Error { using Error::Error; };

// Generation backends
struct TimeoutError : Error { using Error::Error; };
struct EndpointError : Error {
  EndpointError(int status_in, std::string body_in)
      : Error("endpoint error, status " + std::to_string(status_in) +
              (body_in.empty() ? "" : ": " + body_in.substr(0, 200))),
        status(status_in), body(std::move(body_in)) {}
  int status;
  std::string body;
};
struct ReplayMissError : Error {
  explicit ReplayMissError(std::string key_in)
      : Error("replay store has no entry for request key " + key_in),
        key(std::move(key_in)) {}
  std::string key;
};

// Toolchain
struct DafnyNotFoundError : Error { using Error::Error; };
struct SpawnError : Error { using Error::Error; };

// Metrics
struct DomainError : Error { using Error::Error; };
struct InsufficientAttemptsError : Error {
  InsufficientAttemptsError(std::string cell_in, int n_in, int k_in)
      : Error("cell " + cell_in + " has " + std::to_string(n_in) +
              " attempts, need " + std::to_string(k_in)),
        cell(std::move(cell_in)), n(n_in), k(k_in) {}
  std::string cell;
  int n;
  int k;
};

}  // namespace vforge
