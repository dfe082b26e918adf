#include "rise/dataset_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <unordered_map>

#include "rise/error.hpp"

namespace rise {

namespace {

constexpr std::uint8_t kMagic[4] = {'R', 'M', 'A', 'T'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | p[i];
  return x;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits on '\n'; a single trailing empty line (final newline) is dropped.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

template <typename F>
void for_each_field(std::string_view line, F&& f) {
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    f(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  write_file_bytes({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, path);
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

}  // namespace

void MultiViewDataset::validate() const {
  if (views.size() != index_vectors.size()) {
    throw ArgumentError("dataset: views and index vectors differ in count");
  }
  if (views.empty()) throw ArgumentError("dataset: no views");
  std::vector<std::uint8_t> seen(n_total, 0);
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].rows() != index_vectors[i].size()) {
      throw ArgumentError("dataset: view " + std::to_string(i) + " has " +
                          std::to_string(views[i].rows()) + " rows but " +
                          std::to_string(index_vectors[i].size()) + " indices");
    }
    if (index_vectors[i].extent() > n_total) {
      throw ArgumentError("dataset: view " + std::to_string(i) + " indexes past n_total");
    }
    for (const std::size_t r : index_vectors[i]) seen[r] = 1;
  }
  for (std::size_t r = 0; r < n_total; ++r) {
    if (!seen[r]) throw ArgumentError("dataset: sample " + std::to_string(r) + " is in no view");
  }
  if (labels && labels->size() != n_total) {
    throw ArgumentError("dataset: label count differs from n_total");
  }
}

MultiViewDataset apply_mask(std::span<const Matrix> views, const Mask& mask,
                            std::optional<Labels> labels) {
  if (views.size() != mask.views()) {
    throw ArgumentError("apply_mask: " + std::to_string(views.size()) + " views but the mask has " +
                        std::to_string(mask.views()) + " columns");
  }
  MultiViewDataset ds;
  ds.n_total = mask.n();
  ds.index_vectors = mask_to_index_vectors(mask);
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].rows() == mask.n()) {
      ds.views.push_back(gather(views[i], ds.index_vectors[i]));
    } else if (views[i].rows() == ds.index_vectors[i].size()) {
      ds.views.push_back(views[i]);
    } else {
      throw ArgumentError("apply_mask: view " + std::to_string(i) + " has " +
                          std::to_string(views[i].rows()) + " rows; expected " +
                          std::to_string(mask.n()) + " or " +
                          std::to_string(ds.index_vectors[i].size()));
    }
  }
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

std::vector<std::uint8_t> encode_rmat(const Matrix& m) {
  std::vector<std::uint8_t> out;
  out.reserve(kRmatHeaderBytes + 8 * m.size());
  for (const auto b : kMagic) out.push_back(b);
  out.push_back(kRmatVersion);
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (const double x : m.data()) put_u64(out, std::bit_cast<std::uint64_t>(x));
  return out;
}

Matrix decode_rmat(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kRmatHeaderBytes) throw FormatError("RMAT header is truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("missing RMAT magic bytes");
  if (bytes[4] != kRmatVersion) {
    throw FormatError("unsupported RMAT version " + std::to_string(bytes[4]));
  }
  const std::uint64_t rows = get_u64(bytes.data() + 5);
  const std::uint64_t cols = get_u64(bytes.data() + 13);
  const std::uint64_t payload = bytes.size() - kRmatHeaderBytes;
  if (cols != 0 && rows > payload / 8 / cols) {
    throw LengthError("RMAT payload holds " + std::to_string(payload) + " bytes, header declares " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (rows * cols * 8 != payload) {
    throw LengthError("RMAT payload holds " + std::to_string(payload) + " bytes, expected " +
                      std::to_string(rows * cols * 8));
  }
  std::vector<double> data(rows * cols);
  const std::uint8_t* p = bytes.data() + kRmatHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i, p += 8) {
    data[i] = std::bit_cast<double>(get_u64(p));
    if (!std::isfinite(data[i])) throw DataError("non-finite value at entry " + std::to_string(i));
  }
  return Matrix(rows, cols, std::move(data));
}

Matrix parse_csv_matrix(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<double> data;
  std::size_t cols = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::size_t count = 0;
    for_each_field(lines[li], [&](std::string_view field) {
      double x = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), x);
      if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError("not a number: '" + std::string(field) + "'", li + 1);
      }
      if (!std::isfinite(x)) throw DataError("line " + std::to_string(li + 1) + ": non-finite value");
      data.push_back(x);
      ++count;
    });
    if (li == 0) {
      cols = count;
    } else if (count != cols) {
      throw FormatError("line " + std::to_string(li + 1) + ": expected " + std::to_string(cols) +
                        " fields, found " + std::to_string(count));
    }
  }
  return Matrix(lines.size(), cols, std::move(data));
}

Matrix read_matrix(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return decode_rmat(bytes);
    return parse_csv_matrix({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const LengthError& e) {
    throw LengthError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_matrix(const Matrix& m, const std::filesystem::path& path) {
  write_file_bytes(encode_rmat(m), path);
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::string text;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) text += ',';
      text += format_double(m(r, c));
    }
    text += '\n';
  }
  write_text(text, path);
}

Labels canonicalize_labels(std::span<const long long> raw) {
  std::unordered_map<long long, std::size_t> ids;
  Labels out;
  out.reserve(raw.size());
  for (const long long x : raw) {
    const auto [it, inserted] = ids.try_emplace(x, ids.size());
    out.push_back(it->second);
  }
  return out;
}

Labels parse_labels(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<long long> raw;
  raw.reserve(lines.size());
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto tok = trim(lines[li]);
    long long x = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ParseError("not an integer label: '" + std::string(tok) + "'", li + 1);
    }
    raw.push_back(x);
  }
  return canonicalize_labels(raw);
}

Labels read_labels(const std::filesystem::path& path) {
  try {
    return parse_labels(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_labels(const Labels& labels, const std::filesystem::path& path) {
  std::string text;
  for (const auto l : labels) text += std::to_string(l) + '\n';
  write_text(text, path);
}

Mask parse_mask(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<std::uint8_t> table;
  std::size_t views = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::size_t count = 0;
    for_each_field(lines[li], [&](std::string_view field) {
      if (field != "0" && field != "1") {
        throw ParseError("mask entries must be 0 or 1, got '" + std::string(field) + "'", li + 1);
      }
      table.push_back(field == "1");
      ++count;
    });
    if (li == 0) {
      views = count;
    } else if (count != views) {
      throw FormatError("mask line " + std::to_string(li + 1) + " has " + std::to_string(count) +
                        " columns, expected " + std::to_string(views));
    }
  }
  return Mask(lines.size(), views, std::move(table));
}

Mask read_mask(const std::filesystem::path& path) {
  try {
    return parse_mask(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_mask(const Mask& mask, const std::filesystem::path& path) {
  std::string text;
  for (std::size_t r = 0; r < mask.n(); ++r) {
    for (std::size_t v = 0; v < mask.views(); ++v) {
      if (v) text += ',';
      text += mask.available(r, v) ? '1' : '0';
    }
    text += '\n';
  }
  write_text(text, path);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file_bytes(std::span<const std::uint8_t> bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rise
