#pragma once

#include <filesystem>
#include <string>

#include "movsph/quadrature.hpp"

namespace movsph::cli {

inline constexpr int kSchemaVersion = 1;

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Solution CSV: a `# movsph solution schema_version=1 n=.. p=.. center=..`
/// comment, an `r,u` header, then one row per node at full precision.
std::string solution_csv(const RadialField& u, double p);

struct LoadedSolution {
  RadialField field;
  double p;
};

/// Reads a solution CSV; throws ConfigError (line-anchored) on malformed
/// input and DomainError on nonpositive values.
LoadedSolution read_solution_csv(const std::filesystem::path& path);

}  // namespace movsph::cli
