#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bioace::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_space(char c);
bool is_blank(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Removes every ASCII whitespace byte; used for character-conservation checks.
std::string strip_whitespace(std::string_view s);

/// NFC-normalizes a UTF-8 string. Invalid UTF-8 is returned unchanged.
std::string nfc(std::string_view s);

/// printf("%.17g") with a '.' decimal separator regardless of locale.
std::string format_real(double v);

}  // namespace bioace::text
