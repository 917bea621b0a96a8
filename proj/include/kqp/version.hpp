#ifndef KQP_VERSION_HPP
#define KQP_VERSION_HPP

namespace kqp {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
