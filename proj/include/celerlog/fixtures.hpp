#pragma once

#include <string_view>

// Shipped fixture files from data/, compiled into the library.
namespace celerlog::fixtures {

std::string_view default_mask_rules();
std::string_view default_verb_lexicon();
std::string_view default_prompt();

}  // namespace celerlog::fixtures
