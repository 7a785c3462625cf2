#pragma once

#include <string>
#include <string_view>

namespace impsense::textprep {

/// Porter (1980) suffix-stripping stemmer, original rule set.
/// Expects a lowercase word; words containing non a-z bytes are returned as is.
std::string porter_stem(std::string_view word);

}  // namespace impsense::textprep
