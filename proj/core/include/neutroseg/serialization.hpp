#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "neutroseg/pipeline.hpp"

namespace neutroseg {

/// Flat `key = value` config text. Blank lines and `#` comments are ignored.
/// Unknown keys and bad values raise ParseError with the line number.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);
/// Round-trips through parse_config.
std::string format_config(const PipelineConfig& cfg);

/// Deterministic JSON document (sorted keys, integer boundary arrays).
std::string result_to_json(const SegmentationResult& result, int indent = 2);
/// Throws ParseError on malformed documents.
SegmentationResult result_from_json(std::string_view text);

SegmentationResult load_result(const std::filesystem::path& path);
void save_result(const SegmentationResult& result, const std::filesystem::path& path);

}  // namespace neutroseg
