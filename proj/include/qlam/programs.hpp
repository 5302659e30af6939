#pragma once

#include <string>
#include <vector>

namespace qlam {

/// A program of the bundled corpus (the files under programs/).
struct ExampleProgram {
  std::string name;  // file stem, e.g. "teleport-applied"
  std::string source;
};

const std::vector<ExampleProgram>& example_programs();
/// Source of the named example; throws std::out_of_range if unknown.
const std::string& example_source(const std::string& name);

}  // namespace qlam
