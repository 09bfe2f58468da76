#ifndef GENDIFF_VERSION_HPP
#define GENDIFF_VERSION_HPP

namespace gendiff {

inline constexpr const char* kVersion = "0.1.0";

} // namespace gendiff

#endif
