#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsr/bench.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// Raised for unreadable, unwritable or malformed files. The message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// GSRM matrix file: "GSRM", u32 n, u32 p, u8 dtype (1 = f64), then n*p
/// row-major doubles. All fields little-endian.
void write_gsrm(const std::filesystem::path& path, const Mat& a);
Mat read_gsrm(const std::filesystem::path& path);

/// Raw little-endian f64 array.
void write_f64(const std::filesystem::path& path, const Vec& v);
Vec read_f64(const std::filesystem::path& path);

/// Comma-separated numeric rows. Blank lines and lines starting with '#' are
/// skipped, as is a first line that does not parse as numbers.
Mat read_csv_matrix(const std::filesystem::path& path);
Mat parse_csv_matrix(const std::string& text);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Directory with A.gsrm, b.f64, groups.json, meta.json and, when known, x_true.f64.
void save_instance(const std::filesystem::path& dir, const Instance& inst);
Instance load_instance(const std::filesystem::path& dir);

struct MultitaskData {
  std::vector<std::string> task_ids;  // order of first appearance
  std::vector<TaskData> tasks;
};

/// Rows "task id, features..., response"; an optional header line is skipped.
MultitaskData read_multitask_csv(const std::filesystem::path& path);
MultitaskData parse_multitask_csv(const std::string& text);

}  // namespace gsr
