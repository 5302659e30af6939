#include "qlam/programs.hpp"

#include <stdexcept>

namespace qlam {

const std::vector<ExampleProgram>& example_programs() {
  static const std::vector<ExampleProgram> all = {
#include "qlam_programs.inc"
  };
  return all;
}

const std::string& example_source(const std::string& name) {
  for (const auto& p : example_programs())
    if (p.name == name) return p.source;
  throw std::out_of_range("no example program named '" + name + "'");
}

}  // namespace qlam
