#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modalkit::cli {

//! Run one command; returns the process exit code (0 ok, 1 domain error,
//! 2 usage error). Output and diagnostics go to the given streams.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace modalkit::cli
