/*
 * Copyright 2026 The PriorBoost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIORBOOST_COMMON_TEXT_HPP_
#define PRIORBOOST_COMMON_TEXT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace priorboost::text {

std::string_view Trim(std::string_view s);

std::vector<std::string> Split(std::string_view s, char delimiter);

// Splits one line of comma-delimited text. Double-quoted fields may contain
// commas and doubled quotes ("").
std::vector<std::string> SplitCsvLine(std::string_view line);

// Quotes a CSV field only when it needs quoting.
std::string CsvField(std::string_view field);

// Strict decimal parse: the whole (trimmed) string must be consumed and the
// result must be finite. Accepts the usual exponent forms.
std::optional<double> ParseDouble(std::string_view s);
std::optional<std::int64_t> ParseInt(std::string_view s);
std::optional<std::uint64_t> ParseUint(std::string_view s);

// Shortest representation that parses back to the identical double.
std::string FormatDouble(double value);

// Fixed-point with the given number of decimals (report tables only).
std::string FormatFixed(double value, int decimals);

std::vector<std::string> ReadLines(const std::string& path);
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

std::uint64_t Fnv1a(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

}  // namespace priorboost::text

#endif  // PRIORBOOST_COMMON_TEXT_HPP_
