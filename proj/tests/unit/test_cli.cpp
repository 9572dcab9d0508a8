#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  const auto dir = fs::temp_directory_path() / "hemo_unit_cli";
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI with stdout and stderr captured into files; returns the exit status.
int hemotbd(const std::string& args, std::string* out = nullptr) {
  const auto o = workdir() / "stdout.txt";
  const std::string cmd = std::string("\"") + HEMOTBD_EXE + "\" " + args + " > \"" + o.string() +
                          "\" 2> \"" + (workdir() / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream is(o);
    std::stringstream ss;
    ss << is.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// 20 x 10 channel at tau = 0.8.
std::string channel_ini(double dp, const std::string& extra = "") {
  const double dx = 2e-4;
  const double dt = 0.1 * dx * dx / 3.5e-6;
  std::ostringstream os;
  os.precision(17);
  os << "[geometry]\ntype = channel\nlength = 4e-3\nheight = 2e-3\n"
     << "[lattice]\ndx = " << dx << "\ndt = " << dt << "\n"
     << "[rheology]\nmodel = newtonian\neta = 3.5e-3\n"
     << "[inlet0]\npreset = sine\nmean_pa = " << dp << "\namplitude_pa = " << 0.5 * dp << "\n"
     << "[outlet0]\npreset = constant\n"
     << "[sample.bottom]\nposition = 2e-3 0 0\n"
     << "[run]\ncycles = 2\nperiod = " << 600 * dt << "\nsnapshots_per_cycle = 0\n"
     << extra;
  return os.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  CHECK(hemotbd("--help") == 0);
  CHECK(hemotbd("frobnicate") == 2);
  CHECK(hemotbd("validate") == 2);
  CHECK(hemotbd("validate " + (workdir() / "missing.ini").string()) == 2);
}

TEST_CASE("validate prints derived values") {
  const auto ini = workdir() / "ok.ini";
  std::ofstream(ini) << channel_ini(0.05);
  std::string out;
  CHECK(hemotbd("validate " + ini.string(), &out) == 0);
  CHECK(out.find("tau = 0.8") != std::string::npos);
  CHECK(out.find("cs_phys") != std::string::npos);

  const auto bad = workdir() / "bad.ini";
  std::ofstream(bad) << channel_ini(0.05, "bogus = 1\n");
  CHECK(hemotbd("validate " + bad.string()) == 2);
}

TEST_CASE("waveform and tbd subcommands") {
  const auto trace = workdir() / "trace.csv";
  CHECK(hemotbd("waveform --preset cardiac --mean 10 --amplitude 40 --samples 200 -o " +
                trace.string()) == 0);
  const auto text = read_file(trace);
  CHECK(text.rfind("time_s,pressure_pa\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 201);
  CHECK(hemotbd("waveform --preset zigzag -o " + trace.string()) == 2);
  CHECK(hemotbd("waveform --samples 16 -o " + trace.string()) == 2);

  const auto signal = workdir() / "signal.csv";
  {
    std::ofstream os(signal);
    os << "time_s,S_pa\n";
    for (int i = 0; i < 1000; ++i) os << i * 1e-3 << ',' << std::sin(6 * std::numbers::pi * i / 1000) << '\n';
  }
  std::string out;
  CHECK(hemotbd("tbd --input " + signal.string() + " --sigma-max 2 --sigma-steps 5", &out) == 0);
  CHECK(out.rfind("sigma_pa,n_plus,n_zero,n_minus\n0,", 0) == 0);
  CHECK(out.find("\n0.5,3,6,3\n") != std::string::npos);
  CHECK(out.find("# healthy_threshold") != std::string::npos);

  const auto table = workdir() / "tbd.csv";
  CHECK(hemotbd("tbd --input " + signal.string() + " --endpoints open -o " + table.string(), &out) == 0);
  CHECK(out.find("healthy threshold") != std::string::npos);
  CHECK(read_file(table).find("endpoints open") != std::string::npos);
  CHECK(hemotbd("tbd --input " + signal.string() + " --endpoints sideways") == 2);
  CHECK(hemotbd("tbd --input " + (workdir() / "none.csv").string()) == 4);
}

TEST_CASE("run exit codes") {
  const auto ini = workdir() / "run.ini";
  std::ofstream(ini) << channel_ini(0.05);
  const auto out_dir = workdir() / "run_out";
  fs::remove_all(out_dir);
  std::string out;
  CHECK(hemotbd("run " + ini.string() + " -o " + out_dir.string(), &out) == 0);
  CHECK(out.find("healthy threshold [bottom]") != std::string::npos);
  CHECK(fs::exists(out_dir / "tbd_bottom.csv"));
  CHECK(fs::exists(out_dir / "metadata.json"));

  const auto wild = workdir() / "wild.ini";
  std::ofstream(wild) << channel_ini(2e3);
  CHECK(hemotbd("run " + wild.string() + " -o " + (workdir() / "wild_out").string()) == 3);
  CHECK(read_file(workdir() / "wild_out" / "metadata.json").find("aborted") != std::string::npos);

  const auto voxels = workdir() / "c.vox";
  CHECK(hemotbd("voxelize " + ini.string() + " -o " + voxels.string(), &out) == 0);
  CHECK(out.find("fluid sites 200") != std::string::npos);
}

}  // TEST_SUITE
