#pragma once

#include <string>
#include <vector>

#include "depsvm/harness.hpp"
#include "depsvm/mixing.hpp"

namespace depsvm {

/// 17-significant-digit decimal rendering; round-trips doubles exactly.
std::string format_g17(double v);

std::string sweep_csv(const ExperimentResult& result);
std::string stability_csv(const StabilityResult& result);
std::string lln_csv(const std::vector<LlnFunctionTable>& tables);
std::string mixing_csv(const std::vector<MixingReport>& reports);
std::string path_csv(const TrainingSet& t);

void write_file(const std::string& path, const std::string& content);

/// Median-excess-vs-n log-log line plot with per-seed scatter.
std::string sweep_svg(const ExperimentResult& result);

}  // namespace depsvm
