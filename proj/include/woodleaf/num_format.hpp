#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace woodleaf {

/// Print a double with 17 significant digits (general format). Every finite
/// value round-trips exactly through try_parse_double, which keeps file
/// outputs byte-stable and re-readable without loss.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Parse a whole token as a double. Returns false on trailing garbage.
inline bool try_parse_double(std::string_view token, double& out) {
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, out, std::chars_format::general);
    return res.ec == std::errc{} && res.ptr == last;
}

/// Parse a whole token as a signed long long.
inline bool try_parse_int(std::string_view token, long long& out) {
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

} // namespace woodleaf
