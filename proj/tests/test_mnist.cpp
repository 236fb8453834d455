#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "sparsec/mnist.hpp"

using namespace sparsec;

namespace {

void write_be32(std::ofstream& out, uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

struct TempIdx {
  std::string path;
  explicit TempIdx(const std::string& name) : path("/tmp/sparsec_test_" + name) {}
  ~TempIdx() { std::remove(path.c_str()); }
};

void write_images(const std::string& path, const std::vector<std::vector<uint8_t>>& images, int rows, int cols,
                  uint32_t magic = 0x00000803u) {
  std::ofstream out(path, std::ios::binary);
  write_be32(out, magic);
  write_be32(out, static_cast<uint32_t>(images.size()));
  write_be32(out, static_cast<uint32_t>(rows));
  write_be32(out, static_cast<uint32_t>(cols));
  for (const auto& img : images) out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

void write_labels(const std::string& path, const std::vector<uint8_t>& labels, uint32_t magic = 0x00000801u) {
  std::ofstream out(path, std::ios::binary);
  write_be32(out, magic);
  write_be32(out, static_cast<uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

}  // namespace

TEST_CASE("mnist_to_dataset extracts the 7-vs-9 subset") {
  TempIdx img("idx_images"), lab("idx_labels");
  write_images(img.path,
               {{0, 51, 102, 255}, {10, 20, 30, 40}, {1, 2, 3, 4}, {255, 255, 0, 0}}, 2, 2);
  write_labels(lab.path, {7, 9, 3, 7});

  const Dataset ds = mnist_to_dataset(img.path, lab.path);
  REQUIRE(ds.n() == 3);  // the 3 is dropped
  REQUIRE(ds.feature_count() == 4);
  REQUIRE(ds.labels == std::vector<int>{1, 0, 1});  // 7 -> 1, 9 -> 0
  REQUIRE(ds.features(0, 1) == 51.0 / 255.0);
  REQUIRE(ds.features(0, 3) == 1.0);
  REQUIRE(ds.features(2, 0) == 1.0);
  REQUIRE(ds.features(2, 2) == 0.0);
  REQUIRE(ds.feature_names[0] == "px0");
}

TEST_CASE("IDX error handling") {
  SECTION("bad image magic") {
    TempIdx img("idx_badmagic");
    write_images(img.path, {{0, 0, 0, 0}}, 2, 2, 0xdeadbeefu);
    REQUIRE_THROWS_WITH(read_idx_images(img.path), Catch::Matchers::ContainsSubstring("bad magic"));
  }
  SECTION("bad label magic") {
    TempIdx lab("idx_badlabelmagic");
    write_labels(lab.path, {7}, 0x00000803u);
    REQUIRE_THROWS_WITH(read_idx_labels(lab.path), Catch::Matchers::ContainsSubstring("bad magic"));
  }
  SECTION("truncated image data") {
    TempIdx img("idx_trunc");
    {
      std::ofstream out(img.path, std::ios::binary);
      write_be32(out, 0x00000803u);
      write_be32(out, 2);
      write_be32(out, 2);
      write_be32(out, 2);
      const char partial[3] = {1, 2, 3};
      out.write(partial, 3);
    }
    REQUIRE_THROWS_WITH(read_idx_images(img.path), Catch::Matchers::ContainsSubstring("truncated"));
  }
  SECTION("image/label count mismatch") {
    TempIdx img("idx_count_i"), lab("idx_count_l");
    write_images(img.path, {{0, 0, 0, 0}, {1, 1, 1, 1}}, 2, 2);
    write_labels(lab.path, {7});
    REQUIRE_THROWS_WITH(mnist_to_dataset(img.path, lab.path),
                        Catch::Matchers::ContainsSubstring("mismatch"));
  }
  SECTION("missing file") {
    REQUIRE_THROWS_WITH(read_idx_images("/tmp/not_a_real_idx_file"),
                        Catch::Matchers::ContainsSubstring("cannot open"));
  }
}
