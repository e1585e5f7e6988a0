#pragma once

#include "hmsbench/harness/compare.hpp"
#include "hmsbench/harness/runner.hpp"
#include "hmsbench/harness/suite.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmsbench::harness {

class ArtifactError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The suite manifest: environment stamp, inputs and run index.
json make_manifest(const BenchmarkSuite& suite, const RunOptions& options,
                   const std::vector<RunOutput>& runs);

/// Writes manifest.json, reports/, logs/, comparison.csv and summary.txt
/// into `dir`. A non-empty `dir` is refused unless `force`; with `force`
/// only the files this function owns are replaced. Throws ArtifactError.
/// The comparison files are skipped when `table` is empty.
void emit_artifacts(const std::string& dir, bool force, const BenchmarkSuite& suite,
                    const RunOptions& options, const std::vector<RunOutput>& runs,
                    const std::optional<ComparisonTable>& table);

/// Loads run summaries back from an artifact directory for compare.
std::vector<RunSummary> load_run_summaries(const std::string& dir,
                                           std::vector<std::string>* measures = nullptr);

std::vector<RunSummary> summaries(const std::vector<RunOutput>& runs);

} // namespace hmsbench::harness
