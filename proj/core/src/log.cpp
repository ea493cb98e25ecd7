/*
Copyright 2026 The n2n-lite Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "n2n/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace n2n {

void init_logging(std::string_view fallback) {
    static bool sink_ready = false;
    if (!sink_ready) {
        auto logger = spdlog::stderr_color_mt("n2n");
        logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
        spdlog::set_default_logger(logger);
        sink_ready = true;
    }
    std::string level = "warn";
    if (!fallback.empty())
        level = std::string(fallback);
    if (const char *env = std::getenv("N2N_LOG_LEVEL"); env && *env)
        level = env;
    spdlog::set_level(spdlog::level::from_str(level));
}

} // namespace n2n
