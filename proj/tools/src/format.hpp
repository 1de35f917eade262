#pragma once

#include <string>
#include <vector>

namespace bwalloc::cli {

std::string num(double v, int digits = 10);

// Left-aligned columns separated by two spaces.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

}  // namespace bwalloc::cli
