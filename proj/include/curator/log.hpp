#pragma once

#include <functional>
#include <string>

namespace curator {

using WarningHandler = std::function<void(const std::string&)>;

// Emits a warning through the installed handler (stderr by default).
void warn(const std::string& message);

// Replaces the warning handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

// Installs a handler for the lifetime of the guard.
class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(WarningHandler handler)
      : previous_(set_warning_handler(std::move(handler))) {}
  ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }
  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace curator
