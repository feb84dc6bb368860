// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace velocomp {

// Every library failure derives from Error so callers can map categories to
// process exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (e.g. t > 1).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (empty batch, non-scalar loss, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated binary file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed file whose payload violates a data invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

class SplitError : public DataError {
 public:
  using DataError::DataError;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite value encountered during training or inference.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace velocomp
