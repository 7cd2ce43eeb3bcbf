#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace spdc {

// (file name, file content) for every Verilog support module shipped with
// the compiler, in sorted name order. Populated at build time from hdl_lib/.
const std::vector<std::pair<std::string_view, std::string_view>>&
hdl_library_files();

}  // namespace spdc
