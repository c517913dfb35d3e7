#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "qpkick/io.hpp"
#include "qpkick/sweep.hpp"

namespace fs = std::filesystem;

namespace {

int cli(const std::string &args) {
  const std::string cmd = std::string(QPKICK_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli: exit codes") {
  CHECK(cli("--help") == 0);
  CHECK(cli("sweep --no-such-flag") == 2);
  CHECK(cli("sweep -W 1.0 --hardware-faithful") == 2);
  CHECK(cli("sweep --backend gpu") == 2);
  CHECK(cli("sweep -N 30 -W 2 --max-cycles 1 -o " + (fs::temp_directory_path() / "qpkick_cli_cap").string()) == 3);
  CHECK(cli("fit /definitely/not/here.csv") == 1);
}

TEST_CASE("cli: flags override the config file, env sets the output directory") {
  const fs::path dir = fs::temp_directory_path() / "qpkick_cli_cfg";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "cfg.json";
  qpkick::write_text_file(cfg.string(),
                          R"({"N": 4, "W": [2.0], "schedule": {"max_cycles": 3}, "prefix": "fromfile"})");
  const std::string env = "QPKICK_OUTPUT_DIR=" + dir.string() + " ";
  REQUIRE(std::system((env + QPKICK_CLI + " sweep -c " + cfg.string() + " --max-cycles 5 >/dev/null").c_str()) == 0);
  const auto rows = qpkick::read_series((dir / "fromfile_series.csv").string());
  CHECK(rows.back().t == 5);
  CHECK(rows.back().num_qubits == 4);

  qpkick::write_text_file(cfg.string(), R"({"N": 4, "Wvalues": [2.0]})");
  CHECK(cli("sweep -c " + cfg.string()) == 2);
}

TEST_CASE("cli: export verbs") {
  const fs::path dir = fs::temp_directory_path() / "qpkick_cli_export";
  fs::remove_all(dir);
  CHECK(cli("lattice export --model heavyhex --rows 7 --cols 3 -o " + (dir / "hh.json").string()) == 0);
  const auto lat = qpkick::lattice_from_json(qpkick::json::parse(qpkick::read_text_file((dir / "hh.json").string())));
  CHECK(lat.num_qubits == 144);
  CHECK(lat.edges.size() == 164);

  CHECK(cli("circuit export -N 129 -W 2 --cycles 2 -o " + (dir / "c.json").string()) == 0);
  const auto c = qpkick::circuit_from_json(qpkick::json::parse(qpkick::read_text_file((dir / "c.json").string())));
  CHECK(c.layers.size() == 8);
  CHECK(c.num_cycles() == 2);
}
