#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = wmsense::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("wmsense-cli-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("cli exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"roc", "--trials", "0"}).code == 1);
  CHECK(run({"roc", "--config", "/nonexistent/config.json"}).code == 2);
  CHECK(run({"detect", "--iq", "/nonexistent/capture.cf32"}).code == 2);
  CHECK(run({"scf-surface", "--synthetic", "cw", "--alpha-range", "9:2"}).code == 1);
  CHECK(run({"scf-surface", "--synthetic", "triangle"}).code == 1);
}

TEST_CASE("cli print-config resolves flags over the file") {
  const fs::path dir = scratch("cfg");
  std::ofstream(dir / "c.json") << R"({"trials": 1500, "snr_db": [-19], "scf": {"kappa1": 0.2}})";
  const auto r = run({"roc", "--config", (dir / "c.json").string(), "--snr", "-23", "--print-config"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["trials"] == 1500);
  CHECK(doc["snr_db"] == nlohmann::json::array({-23.0}));
  CHECK(doc["scf"]["kappa1"] == 0.2);
  fs::remove_all(dir);
}

TEST_CASE("cli roc, calibrate, synth, detect and scf-surface") {
  const fs::path dir = scratch("run");
  ::setenv("WMSENSE_CALIBRATION_DIR", (dir / "cal").c_str(), 1);

  const auto roc = run({"roc", "--detector", "scf", "--trials", "200", "--fa", "0.05", "--snr", "-21", "--beta", "2",
                        "--out", (dir / "roc.csv").string()});
  CHECK(roc.code == 0);
  CHECK(fs::file_size(dir / "roc.csv") > 60);

  const auto cal = run({"calibrate", "--detector", "periodogram", "--fa", "0.05", "--calibration-trials", "200",
                        "--snr", "-17"});
  REQUIRE(cal.code == 0);
  CHECK(nlohmann::json::parse(cal.out)["cache_hit"] == false);
  CHECK(nlohmann::json::parse(run({"calibrate", "--detector", "periodogram", "--fa", "0.05", "--calibration-trials",
                                   "200", "--snr", "-17"})
                                  .out)["cache_hit"] == true);

  CHECK(run({"synth", "--signal", "fm", "--beta", "2", "--snr", "-17", "--offset-hz", "4000", "--out",
             (dir / "fm.cf32").string()})
            .code == 0);
  const auto det = run({"detect", "--iq", (dir / "fm.cf32").string(), "--detector", "periodogram",
                        "--calibration-trials", "200"});
  REQUIRE(det.code == 0);
  CHECK(det.out.find("H1_WirelessMic") != std::string::npos);

  // Calibration directory that cannot be created is an I/O failure.
  std::ofstream(dir / "file") << "x";
  ::setenv("WMSENSE_CALIBRATION_DIR", (dir / "file" / "sub").c_str(), 1);
  CHECK(run({"calibrate", "--calibration-trials", "200", "--detector", "periodogram"}).code == 2);
  ::unsetenv("WMSENSE_CALIBRATION_DIR");

  const auto surf = run({"scf-surface", "--synthetic", "cw", "--alpha-range", "0:0", "--f-range", "0:0"});
  CHECK(surf.code == 0);
  CHECK(surf.out == "alpha_bin,f_bin,magnitude\n");
  CHECK(run({"scf-surface", "--iq", (dir / "fm.cf32").string(), "--alpha-range", "-4:5", "--f-range", "-2:3"}).code == 0);
  fs::remove_all(dir);
}
