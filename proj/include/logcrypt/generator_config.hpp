#pragma once

#include "logcrypt/generators.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace logcrypt {

/// Built-in generators: "a51", "threshold5", "summation4", "gifford".
/// Throws InputError for an unknown name.
[[nodiscard]] GeneratorSpec builtin_generator(std::string_view name);
[[nodiscard]] std::vector<std::string> builtin_generator_names();

/// Generator description as JSON, e.g.
///
///   {"kind": "a51",
///    "registers": [{"length": 5, "taps": [3, 5], "clock": 3}, ...]}
///   {"kind": "threshold", "registers": [{"length": 3, "taps": [2, 3]}, ...]}
///   {"kind": "summation", "registers": [...]}
///   {"kind": "gifford"}
///
/// The result is validated before it is returned.
[[nodiscard]] GeneratorSpec parse_generator_spec(std::string_view json_text);
[[nodiscard]] GeneratorSpec load_generator_spec(const std::string &path);
[[nodiscard]] std::string generator_spec_to_json(const GeneratorSpec &gen);

} // namespace logcrypt
