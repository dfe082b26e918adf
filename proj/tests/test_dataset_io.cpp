#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <limits>

#include "oracles.hpp"
#include "rise/dataset_io.hpp"
#include "rise/error.hpp"

namespace fs = std::filesystem;
using rise::Matrix;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rise_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::uint8_t> rmat_header(std::uint64_t rows, std::uint64_t cols) {
  std::vector<std::uint8_t> b = {'R', 'M', 'A', 'T', 1};
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(rows >> (8 * i)));
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(cols >> (8 * i)));
  return b;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("read_matrix: hand-built 1x1 zero RMAT") {
  auto bytes = rmat_header(1, 1);
  bytes.resize(bytes.size() + 8, 0);
  const auto path = temp_path("zero.rmat");
  rise::write_file_bytes(bytes, path);
  CHECK(rise::read_matrix(path) == Matrix(1, 1, {0.0}));
}

TEST_CASE("read_matrix: CSV text") {
  const auto path = temp_path("small.csv");
  const std::string text = "1.5,2.0\n3.0,4.0";
  rise::write_file_bytes({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, path);
  CHECK(rise::read_matrix(path) == Matrix(2, 2, {1.5, 2.0, 3.0, 4.0}));
}

TEST_CASE("write_matrix: header layout") {
  const auto bytes = rise::encode_rmat(Matrix(1, 2, {1.0, 2.0}));
  CHECK(bytes.size() == 21 + 16);
  CHECK(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 21) == rmat_header(1, 2));
  // 1.0 little-endian: 00 .. 00 f0 3f
  CHECK(bytes[21 + 6] == 0xf0);
  CHECK(bytes[21 + 7] == 0x3f);
}

TEST_CASE("write_matrix / read_matrix round trips bitwise") {
  rise::Rng rng(1);
  const Matrix random = oracle::random_matrix(7, 3, rng);
  for (const Matrix& m : {random, Matrix(), Matrix::identity(3),
                          Matrix(1, 3, {-0.0, std::numeric_limits<double>::denorm_min(), 1e308})}) {
    const auto path = temp_path("rt.rmat");
    rise::write_matrix(m, path);
    CHECK(bitwise_equal(rise::read_matrix(path), m));
  }
}

TEST_CASE("CSV output parses back exactly") {
  rise::Rng rng(2);
  const Matrix m = oracle::random_matrix(5, 4, rng);
  const auto path = temp_path("rt.csv");
  rise::write_matrix_csv(m, path);
  CHECK(bitwise_equal(rise::read_matrix(path), m));
}

TEST_CASE("decode_rmat: error paths") {
  CHECK_THROWS_AS(rise::decode_rmat(std::vector<std::uint8_t>{'R', 'M', 'A', 'T', 1, 0}), rise::FormatError);
  auto bad_version = rmat_header(0, 0);
  bad_version[4] = 2;
  CHECK_THROWS_AS(rise::decode_rmat(bad_version), rise::FormatError);
  auto truncated = rmat_header(2, 2);
  truncated.resize(truncated.size() + 24, 0);
  CHECK_THROWS_AS(rise::decode_rmat(truncated), rise::LengthError);
  auto huge = rmat_header(std::uint64_t{1} << 62, 4);
  CHECK_THROWS_AS(rise::decode_rmat(huge), rise::LengthError);
  auto nan = rise::encode_rmat(Matrix(1, 1, {0.0}));
  nan[21 + 7] = 0x7f;
  nan[21 + 6] = 0xf8;
  CHECK_THROWS_AS(rise::decode_rmat(nan), rise::DataError);
}

TEST_CASE("parse_csv_matrix: error paths") {
  CHECK_THROWS_AS(rise::parse_csv_matrix("1,2\n3\n"), rise::FormatError);
  CHECK_THROWS_AS(rise::parse_csv_matrix("1,x\n"), rise::ParseError);
  CHECK_THROWS_AS(rise::parse_csv_matrix("1,nan\n"), rise::DataError);
  CHECK(rise::parse_csv_matrix("").empty());
  CHECK(rise::parse_csv_matrix(" 1 , 2 \r\n").cols() == 2);
}

TEST_CASE("read_matrix: missing file names the path") {
  try {
    rise::read_matrix("/nonexistent/dir/x.rmat");
    FAIL("expected an exception");
  } catch (const rise::IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/x.rmat") != std::string::npos);
  }
}

TEST_CASE("labels: canonicalization by first occurrence") {
  CHECK(rise::parse_labels("5\n5\n9\n") == rise::Labels{0, 0, 1});
  CHECK(rise::parse_labels("0\n1\n2\n") == rise::Labels{0, 1, 2});
  CHECK(rise::parse_labels("-3\n7\n-3\n") == rise::Labels{0, 1, 0});
  try {
    rise::parse_labels("a\n");
    FAIL("expected a parse error");
  } catch (const rise::ParseError& e) {
    CHECK(e.line() == 1);
  }
  CHECK_THROWS_AS(rise::parse_labels("1\n\n2\n"), rise::ParseError);
}

TEST_CASE("labels: canonicalization is idempotent") {
  rise::Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<long long> raw(1 + rng.below(40));
    for (auto& x : raw) x = static_cast<long long>(rng.below(9)) * 13 - 40;
    const rise::Labels once = rise::canonicalize_labels(raw);
    const std::vector<long long> again(once.begin(), once.end());
    CHECK(rise::canonicalize_labels(again) == once);
  }
}

TEST_CASE("labels and masks round trip through files") {
  const rise::Labels labels = {0, 2, 1, 1, 0};
  const auto lp = temp_path("labels.txt");
  rise::write_labels(labels, lp);
  CHECK(rise::read_labels(lp) == rise::Labels{0, 1, 2, 2, 0});

  const rise::Mask mask = rise::generate_mask(30, 3, 0.5, 4);
  const auto mp = temp_path("mask.csv");
  rise::write_mask(mask, mp);
  CHECK(rise::read_mask(mp) == mask);
  CHECK_THROWS_AS(rise::parse_mask("1,2\n"), rise::ParseError);
}

TEST_CASE("apply_mask gathers complete views and accepts pre-gathered ones") {
  const Matrix v0(3, 1, {10, 11, 12});
  const Matrix v1(2, 1, {20, 21});  // rows 0 and 1 only
  const rise::Mask mask(3, 2, {1, 1, 0, 1, 1, 0});
  const std::vector<Matrix> views = {v0, v1};
  const auto ds = rise::apply_mask(views, mask);
  CHECK(ds.views[0] == Matrix(2, 1, {10, 12}));
  CHECK(ds.views[1] == v1);
  CHECK(ds.n_total == 3);
  const std::vector<Matrix> wrong = {v0, Matrix(1, 1, {0})};
  CHECK_THROWS_AS(rise::apply_mask(wrong, mask), rise::ArgumentError);
}
