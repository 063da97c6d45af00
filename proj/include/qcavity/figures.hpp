#pragma once

#include <string>
#include <vector>

namespace qcavity {

// Prebaked datasets behind the published plots. Each id writes one or more
// CSV files plus a JSON sidecar per file into out_dir; reruns are
// deterministic (stochastic datasets carry fixed seeds).
struct FigureResult {
  std::vector<std::string> files;
};

const std::vector<std::string>& figure_ids();  // fig2 .. fig9
std::string figure_synopsis(const std::string& id);
FigureResult emit_figure(const std::string& id, const std::string& out_dir);

}  // namespace qcavity
