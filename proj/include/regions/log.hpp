#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace regions {

/// Library logger writing to stderr; level taken from REGIONS_LOG
/// (trace, debug, info, warn, error, off; default warn).
spdlog::logger& logger();

}  // namespace regions
