#include "gsr/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace gsr {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::string& buf, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T get_le(const char* p) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void dump(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> out;
  std::string_view all(text);
  std::size_t start = 0;
  while (start <= all.size()) {
    const auto pos = all.find('\n', start);
    const auto line = trim(all.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (!line.empty() && line.front() != '#') out.push_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_gsrm(const fs::path& path, const Mat& a) {
  if (a.rows() > UINT32_MAX || a.cols() > UINT32_MAX)
    throw IoError("matrix too large for GSRM: '" + path.string() + "'");
  std::string buf = "GSRM";
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(a.rows()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(a.cols()));
  put_le<std::uint8_t>(buf, 1);
  buf.reserve(buf.size() + 8 * a.size());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) put_le<double>(buf, a(i, j));
  dump(path, buf);
}

Mat read_gsrm(const fs::path& path) {
  const std::string data = slurp(path);
  constexpr std::size_t header = 4 + 4 + 4 + 1;
  if (data.size() < header || data.compare(0, 4, "GSRM") != 0)
    throw IoError("'" + path.string() + "' is not a GSRM file");
  const auto n = get_le<std::uint32_t>(data.data() + 4);
  const auto p = get_le<std::uint32_t>(data.data() + 8);
  const auto dtype = get_le<std::uint8_t>(data.data() + 12);
  if (dtype != 1) throw IoError("'" + path.string() + "': unsupported GSRM dtype " + std::to_string(dtype));
  const std::uint64_t count = std::uint64_t{n} * p;
  if (data.size() != header + 8 * count)
    throw IoError("'" + path.string() + "': GSRM payload size does not match header");
  Mat a(n, p);
  const char* ptr = data.data() + header;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < p; ++j, ptr += 8) a(i, j) = get_le<double>(ptr);
  return a;
}

void write_f64(const fs::path& path, const Vec& v) {
  std::string buf;
  buf.reserve(8 * v.size());
  for (Index i = 0; i < v.size(); ++i) put_le<double>(buf, v[i]);
  dump(path, buf);
}

Vec read_f64(const fs::path& path) {
  const std::string data = slurp(path);
  if (data.size() % 8 != 0) throw IoError("'" + path.string() + "': size is not a multiple of 8");
  Vec v(static_cast<Index>(data.size() / 8));
  for (Index i = 0; i < v.size(); ++i) v[i] = get_le<double>(data.data() + 8 * i);
  return v;
}

Mat parse_csv_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  bool first = true;
  for (auto line : lines_of(text)) {
    const auto cells = split(line);
    std::vector<double> row(cells.size());
    bool ok = true;
    for (std::size_t k = 0; k < cells.size() && ok; ++k) ok = parse_double(cells[k], row[k]);
    if (!ok) {
      if (first) {
        first = false;
        continue;
      }
      throw IoError("CSV: non-numeric cell in line '" + std::string(line) + "'");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("CSV: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Mat(0, 0);
  Mat a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = rows[i][j];
  return a;
}

Mat read_csv_matrix(const fs::path& path) {
  const std::string text = slurp(path);
  try {
    return parse_csv_matrix(text);
  } catch (const IoError& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) { dump(path, j.dump(2) + "\n"); }

void write_text(const fs::path& path, const std::string& text) { dump(path, text); }

void save_instance(const fs::path& dir, const Instance& inst) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  write_gsrm(dir / "A.gsrm", inst.A);
  write_f64(dir / "b.f64", inst.b);
  if (inst.x_true) write_f64(dir / "x_true.f64", *inst.x_true);
  write_json(dir / "groups.json", inst.groups.to_json());
  nlohmann::json meta = inst.meta;
  std::vector<Index> support1;
  for (Index i : inst.support_true) support1.push_back(i + 1);
  meta["support_true"] = support1;
  meta["radius"] = inst.radius;
  meta["seed"] = inst.seed;
  write_json(dir / "meta.json", meta);
}

Instance load_instance(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("instance directory '" + dir.string() + "' not found");
  Instance inst;
  inst.A = read_gsrm(dir / "A.gsrm");
  inst.b = read_f64(dir / "b.f64");
  try {
    inst.groups = GroupStructure::from_json(read_json(dir / "groups.json"));
  } catch (const std::invalid_argument& e) {
    throw IoError("'" + (dir / "groups.json").string() + "': " + e.what());
  }
  if (fs::exists(dir / "x_true.f64")) inst.x_true = read_f64(dir / "x_true.f64");
  if (fs::exists(dir / "meta.json")) inst.meta = read_json(dir / "meta.json");
  const auto& meta = inst.meta;
  if (meta.contains("support_true"))
    for (Index i : meta.at("support_true").get<std::vector<Index>>()) inst.support_true.push_back(i - 1);
  if (meta.contains("radius")) inst.radius = meta.at("radius").get<double>();
  if (meta.contains("seed")) inst.seed = meta.at("seed").get<std::uint64_t>();
  if (inst.b.size() != inst.A.rows() || inst.groups.dim() != inst.A.cols() ||
      (inst.x_true && inst.x_true->size() != inst.A.cols()))
    throw IoError("instance '" + dir.string() + "' has inconsistent dimensions");
  return inst;
}

MultitaskData parse_multitask_csv(const std::string& text) {
  MultitaskData out;
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<std::vector<double>>> rows;
  std::size_t width = 0;
  bool first = true;
  for (auto line : lines_of(text)) {
    const auto cells = split(line);
    if (cells.size() < 3) throw IoError("multitask CSV: need task, >=1 feature, response");
    std::vector<double> vals(cells.size() - 1);
    bool ok = true;
    for (std::size_t k = 1; k < cells.size() && ok; ++k) ok = parse_double(cells[k], vals[k - 1]);
    if (!ok) {
      if (first) {
        first = false;
        continue;
      }
      throw IoError("multitask CSV: non-numeric cell in line '" + std::string(line) + "'");
    }
    first = false;
    if (width == 0) width = vals.size();
    if (vals.size() != width) throw IoError("multitask CSV: ragged rows");
    const std::string id(cells[0]);
    auto [it, inserted] = slot.emplace(id, out.task_ids.size());
    if (inserted) {
      out.task_ids.push_back(id);
      rows.emplace_back();
    }
    rows[it->second].push_back(std::move(vals));
  }
  if (rows.empty()) throw IoError("multitask CSV: no data rows");
  for (const auto& task : rows) {
    TaskData t{Mat(static_cast<Index>(task.size()), static_cast<Index>(width - 1)),
               Vec(static_cast<Index>(task.size()))};
    for (Index i = 0; i < t.X.rows(); ++i) {
      for (Index j = 0; j < t.X.cols(); ++j) t.X(i, j) = task[i][j];
      t.y[i] = task[i][width - 1];
    }
    out.tasks.push_back(std::move(t));
  }
  return out;
}

MultitaskData read_multitask_csv(const fs::path& path) {
  const std::string text = slurp(path);
  try {
    return parse_multitask_csv(text);
  } catch (const IoError& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace gsr
