// core/include/uti/text_io.hpp

// Copyright 2026  The uti-detect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef UTI_TEXT_IO_HPP_
#define UTI_TEXT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace uti {

std::string ReadTextFile(const std::filesystem::path &path);
std::vector<std::uint8_t> ReadBinaryFile(const std::filesystem::path &path);
void WriteTextFile(const std::filesystem::path &path, std::string_view text);
void WriteBinaryFile(const std::filesystem::path &path,
                     const std::vector<std::uint8_t> &bytes);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string> SplitLines(std::string_view text);
std::vector<std::string> SplitTabs(std::string_view line);
std::string Trim(std::string_view s);

/// Parses "key=value" lines. Blank lines and lines starting with '#' are
/// skipped; anything else without '=' is an error mentioning `source`.
std::map<std::string, std::string> ParseKeyValue(std::string_view text,
                                                 const std::string &source);

/// Strict decimal parsing; throws InputError mentioning `what`.
double ParseDouble(std::string_view s, const std::string &what);
long long ParseInt(std::string_view s, const std::string &what);

/// Minimal RFC 4180 CSV.
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);
std::string CsvEscape(std::string_view field);
std::string CsvRow(const std::vector<std::string> &fields);

/// Fixed-point formatting with `precision` decimals, shared by every report
/// writer. Negative zero prints as zero.
std::string FormatReal(double v, int precision = 6);

}  // namespace uti

#endif  // UTI_TEXT_IO_HPP_
