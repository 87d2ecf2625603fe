#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "vigil/common/text.hpp"

namespace fs = std::filesystem;
using namespace vigil;

namespace {

struct Result {
  int status = -1;
  std::string out;  // stdout and stderr
};

const std::string kFix = VIGIL_FIXTURES;

Result vigil_run(const std::string& args) {
  std::string cmd = std::string(VIGIL_BIN) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  while (auto n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("vigil_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("check") {
  CHECK(vigil_run("check " + kFix + "/ac1/base.ckp").status == 0);
  auto multi = vigil_run("check " + kFix + "/ac1/row07_multi_cond.ckp");
  CHECK(multi.status == 1);
  CHECK(multi.out.find("ROW7 E_MULTI_COND") != std::string::npos);
  auto missing = vigil_run("check /nonexistent/x.ckp");
  CHECK(missing.status == 1);
  CHECK(missing.out.find("E_IO") != std::string::npos);
}

TEST_CASE("build is deterministic and the rename hook trips the linker") {
  TempDir t;
  REQUIRE(vigil_run("build " + kFix + "/ac1/base.ckp -o " + (t / "a.img") + " --emit-listing --hex " + (t / "a.hex")).status == 0);
  REQUIRE(vigil_run("build " + kFix + "/ac1/base.ckp -o " + (t / "b.img")).status == 0);
  CHECK(text::read_file(t / "a.img") == text::read_file(t / "b.img"));
  CHECK(fs::exists(t / "a.img.a.lst"));
  CHECK(fs::exists(t / "a.img.b.lst"));
  CHECK(fs::exists(t / "a.hex"));
  auto renamed = vigil_run("build " + kFix + "/ac1/base.ckp -o " + (t / "c.img") + " --rename-b count=counter");
  CHECK(renamed.status == 1);
  CHECK(renamed.out.find("E_NAME_MISMATCH") != std::string::npos);
}

TEST_CASE("sim exit codes") {
  TempDir t;
  REQUIRE(vigil_run("build " + kFix + "/ac1/base.ckp -o " + (t / "a.img")).status == 0);
  text::write_file(t / "nominal.scn", "at 0 input 1 ON\nat 10 input 2 ON\nrun 30\n");
  auto ok = vigil_run("sim " + (t / "a.img") + " " + (t / "nominal.scn"));
  CHECK(ok.status == 0);
  CHECK(ok.out.find("END C30 RUNNING") != std::string::npos);

  auto fault = vigil_run("sim " + (t / "a.img") + " " + kFix + "/ac1/row17_stuck_output.scn");
  CHECK(fault.status == 2);
  CHECK(fault.out.find("PANIC") != std::string::npos);

  auto bytes = text::read_file(t / "a.img");
  bytes[bytes.size() - 10] ^= 0x01;
  text::write_file(t / "bad.img", bytes);
  auto bad = vigil_run("sim " + (t / "bad.img") + " " + (t / "nominal.scn"));
  CHECK(bad.status == 1);
  CHECK(bad.out.find("E_UPLOAD_CRC") != std::string::npos);

  auto json = vigil_run("sim --trace-format json " + (t / "a.img") + " " + (t / "nominal.scn"));
  CHECK(json.status == 0);
  CHECK(json.out.find("\"cycles\"") != std::string::npos);
}

TEST_CASE("translate-relay emits check-clean source and warns on oscillation") {
  TempDir t;
  REQUIRE(vigil_run("translate-relay " + kFix + "/relay/light_signal.rly -o " + (t / "ls.ckp")).status == 0);
  CHECK(vigil_run("check " + (t / "ls.ckp")).status == 0);
  auto osc = vigil_run("translate-relay " + kFix + "/relay/oscillator.rly -o " + (t / "osc.ckp"));
  CHECK(osc.status == 0);
  CHECK(osc.out.find("warning") != std::string::npos);
  CHECK(vigil_run("check " + (t / "osc.ckp")).status == 0);
}

TEST_CASE("translate-sm") {
  TempDir t;
  auto r = vigil_run("translate-sm " + kFix + "/sm/obstacle.csm --cycle-unit 100 -o " + (t / "o.ckp"));
  REQUIRE(r.status == 0);
  CHECK(vigil_run("check " + (t / "o.ckp")).status == 0);
  auto bad = vigil_run("translate-sm " + kFix + "/sm/obstacle.csm --const av=9");
  CHECK(bad.status == 1);
  CHECK(bad.out.find("E_CONST_RANGE") != std::string::npos);
}

TEST_CASE("modelcheck verdicts, counterexample files and caps") {
  TempDir t;
  REQUIRE(vigil_run("translate-relay " + kFix + "/relay/light_signal.rly -o " + (t / "ok.ckp")).status == 0);
  REQUIRE(vigil_run("translate-relay " + kFix + "/relay/light_signal_broken.rly -o " + (t / "bad.ckp")).status == 0);
  text::write_file(t / "true.prop", "always: true\n");
  CHECK(vigil_run("modelcheck " + (t / "ok.ckp") + " " + (t / "true.prop")).status == 0);
  CHECK(vigil_run("modelcheck " + (t / "ok.ckp") + " " + kFix + "/relay/light_signal.prop --jobs 3").status == 0);
  auto cex = vigil_run("modelcheck " + (t / "bad.ckp") + " " + kFix + "/relay/light_signal.prop --cex-dir " + (t / "cex"));
  CHECK(cex.status == 2);
  CHECK(fs::exists(t / "cex/stop_overrides_green.scn"));
  auto cap = vigil_run("modelcheck " + (t / "ok.ckp") + " " + (t / "true.prop") + " --max-states 3");
  CHECK(cap.status == 1);
  CHECK(cap.out.find("E_STATE_EXPLOSION") != std::string::npos);
}

TEST_CASE("config file supplies defaults and flags win") {
  TempDir t;
  REQUIRE(vigil_run("build " + kFix + "/ac1/base.ckp -o " + (t / "a.img")).status == 0);
  text::write_file(t / "nominal.scn", "run 3\n");
  text::write_file(t / "vigil.toml", "cycle-ms = 10\ntrace-format = json\n");
  auto json = vigil_run("--config " + (t / "vigil.toml") + " sim " + (t / "a.img") + " " + (t / "nominal.scn"));
  CHECK(json.out.find("\"ms\": 20") != std::string::npos);
  auto text_out = vigil_run("--config " + (t / "vigil.toml") + " --trace-format text sim " + (t / "a.img") + " " +
                            (t / "nominal.scn"));
  CHECK(text_out.out.find("END C3") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(vigil_run("").status != 0);
  CHECK(vigil_run("frobnicate").status != 0);
  CHECK(vigil_run("sim --trace-format xml a b").status != 0);
}
