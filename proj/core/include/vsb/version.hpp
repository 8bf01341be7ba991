#ifndef VSB_VERSION_HPP
#define VSB_VERSION_HPP

namespace vsb {

inline constexpr const char* kVersion = "0.1.0";

} // namespace vsb

#endif
