#pragma once

#include <stdexcept>
#include <string>

namespace aquactl {

/// Invalid configuration value. key is the dotted path of the offending entry
/// in the scenario file, e.g. "controller.mpc.M".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace aquactl
