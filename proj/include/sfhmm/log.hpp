#pragma once

#include <functional>
#include <string>

namespace sfhmm {

// Warnings go to stderr unless a sink is installed (tests capture them).
using WarningSink = std::function<void(const std::string&)>;

void warn(const std::string& message);
void set_warning_sink(WarningSink sink);
long warning_count();

}  // namespace sfhmm
