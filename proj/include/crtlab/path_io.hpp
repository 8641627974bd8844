#ifndef CRTLAB_PATH_IO_HPP
#define CRTLAB_PATH_IO_HPP

#include "crtlab/excursion.hpp"

#include <string>

namespace crtlab {

// Layout: "CRTLABP1" magic, u32 version, f64 alpha, f64 c, f64 dt, u64 length,
// then length f64 values. All fields little-endian.
inline constexpr unsigned kPathFormatVersion = 1;

void save_path(const ExcursionPath& path, const std::string& file);
ExcursionPath load_path(const std::string& file);

}  // namespace crtlab

#endif
