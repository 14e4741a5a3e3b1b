#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <vector>

#include "gtnn/config.hpp"
#include "gtnn/network.hpp"

using namespace gtnn;

TEST_CASE("config parsing") {
  const Config cfg = Config::from_string(
      "# experiment setup\n"
      "iterations = 500\n"
      "family = ctnn   # trailing comment\n"
      "lr_start = 5e-3\n"
      "verbose = true\n"
      "widths = 8,16,32\n"
      "\n");
  CHECK(cfg.get_int("iterations", 0) == 500);
  CHECK(cfg.get_string("family", "") == "ctnn");
  CHECK(cfg.get_double("lr_start", 0.0) == doctest::Approx(5e-3));
  CHECK(cfg.get_bool("verbose", false));
  CHECK(cfg.get_int_list("widths", {}) == std::vector<int>{8, 16, 32});
  // defaults for missing keys
  CHECK(cfg.get_int("missing", 7) == 7);
  CHECK_FALSE(cfg.has("missing"));
  // malformed values raise
  const Config bad = Config::from_string("iterations = soon\n");
  CHECK_THROWS_AS((void)bad.get_int("iterations", 0), std::runtime_error);
  CHECK_THROWS_AS(Config::from_string("no equals sign\n"), std::runtime_error);
  CHECK_THROWS_AS(Config::from_file("/nonexistent/gtnn.cfg"), std::runtime_error);
}

TEST_CASE("checkpoint round trip preserves spec and parameters bitwise") {
  for (Family fam : {Family::fnn, Family::qtnn, Family::ctnn}) {
    for (int depth : {2, 3}) {
      const NetworkSpec spec = make_spec(fam, depth, 6, 5, Activation::sigmoid);
      const Network net = make_network(spec, 123);
      const std::string path =
          (std::filesystem::temp_directory_path() / "gtnn_ckpt_test.bin").string();
      save_checkpoint(path, net);
      const Network back = load_checkpoint(path);
      CHECK(back.spec.family == spec.family);
      CHECK(back.spec.depth == spec.depth);
      CHECK(back.spec.widths == spec.widths);
      CHECK(back.spec.input_dim == spec.input_dim);
      CHECK(back.spec.activation == spec.activation);
      CHECK(back.spec.output_bias == spec.output_bias);
      CHECK(back.spec.composed == spec.composed);
      REQUIRE(back.params.size() == net.params.size());
      for (std::size_t i = 0; i < net.params.size(); ++i)
        CHECK(back.params.all()[i] == net.params.all()[i]);
      std::filesystem::remove(path);
    }
  }
}

TEST_CASE("checkpoint loader rejects corrupt files") {
  const auto tmp = std::filesystem::temp_directory_path();
  {
    const std::string path = (tmp / "gtnn_bad_header.bin").string();
    std::ofstream out(path);
    out << "not a checkpoint\n";
    out.close();
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
    std::filesystem::remove(path);
  }
  {
    const NetworkSpec spec = make_spec(Family::qtnn, 2, 4, 2, Activation::relu);
    const Network net = make_network(spec, 5);
    const std::string path = (tmp / "gtnn_truncated.bin").string();
    save_checkpoint(path, net);
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 16);
    CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
    std::filesystem::remove(path);
  }
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/gtnn.bin"), std::runtime_error);
}
