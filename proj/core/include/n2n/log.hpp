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

#pragma once

#include <string_view>

namespace n2n {

/// Sets the log level from N2N_LOG_LEVEL (trace, debug, info, warn, error,
/// off), falling back to `fallback` and then to warn. Logs go to stderr.
void init_logging(std::string_view fallback = {});

} // namespace n2n
