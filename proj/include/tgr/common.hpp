#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tgr {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

// Row-major so that id-indexed rows are contiguous (checkpoint IO, TSV export,
// per-node math all walk rows).
using EmbeddingTable =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad configuration (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

/// Bad input data (CLI exit code 3).
struct DataError : Error {
  using Error::Error;
};

/// Non-finite loss or other numeric failure (CLI exit code 4).
struct NumericError : Error {
  using Error::Error;
};

}  // namespace tgr
