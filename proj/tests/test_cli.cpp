#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dvspix_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = DVSPIX_CLI_PATH " "s + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// small stochastic run: two speeds, one luma level, 16x16 pixels
fs::path write_config(const fs::path& dir) {
  const fs::path path = dir / "run.cfg";
  std::ofstream out(path);
  out << "mode = stochastic\n"
         "seed = 3\n"
         "k_delay = 0.45\n"
         "noise_sigma = 1.5811388300841895\n"
         "theta_on = 0.025\n"
         "theta_off = 0.025\n"
         "stimulus = ramp-grid\n"
         "ramp_mu = 50,100\n"
         "ramp_l = 20\n"
         "ramp_span_frac = 0.2\n"
         "sensor_width = 16\n"
         "sensor_height = 16\n"
         "mu_centers = 50,100\n"
         "l_centers = 20\n"
         "bin_width = 0.0005\n"
         "floor_fraction = 0.02\n";
  return path;
}

}  // namespace

TEST_CASE("cli: simulate writes event files and provenance") {
  const fs::path dir = fresh_dir("simulate");
  const fs::path cfg = write_config(dir);
  const fs::path out = dir / "out";
  CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out.string(),
                dir / "log.txt") == 0);
  CHECK(fs::exists(out / "events_mu50_l20.txt"));
  CHECK(fs::exists(out / "events_mu100_l20.txt"));
  CHECK(fs::exists(out / "provenance.txt"));
  CHECK(slurp(dir / "log.txt").find("simulated mu=50 l=20") != std::string::npos);
  CHECK(slurp(out / "provenance.txt").find("config_hash = ") != std::string::npos);

  SUBCASE("rerunning reproduces the files byte for byte") {
    const fs::path out2 = dir / "out2";
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out2.string(),
                  dir / "log2.txt") == 0);
    CHECK(slurp(out / "events_mu50_l20.txt") == slurp(out2 / "events_mu50_l20.txt"));
    CHECK(slurp(out / "events_mu100_l20.txt") == slurp(out2 / "events_mu100_l20.txt"));
  }

  SUBCASE("a different seed changes the stream") {
    const fs::path out3 = dir / "out3";
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out3.string() +
                      " --seed 99",
                  dir / "log3.txt") == 0);
    CHECK(slurp(out / "events_mu50_l20.txt") != slurp(out3 / "events_mu50_l20.txt"));
  }
}

TEST_CASE("cli: analyze reports gaps, products and figures") {
  const fs::path dir = fresh_dir("analyze");
  const fs::path cfg = write_config(dir);
  const fs::path out = dir / "out";
  REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + out.string(),
                  dir / "sim_log.txt") == 0);
  CHECK(run_cli("analyze --config " + cfg.string() + " --out " + out.string(),
                dir / "log.txt") == 0);

  const std::string csv = slurp(out / "report.csv");
  CHECK(csv.rfind("mu_bin,l_bin,n_samples,gap_start,gap_length,product,ig_mean,ig_shape,"
                  "ig_mean_shifted,ig_shape_shifted\n",
                  0) == 0);
  CHECK(fs::exists(out / "cell_mu50_l20.svg"));
  CHECK(fs::exists(out / "cell_mu100_l20.svg"));
  const std::string log = slurp(dir / "log.txt");
  CHECK(log.find("mean gap*mu product") != std::string::npos);

  SUBCASE("--cells restricts the report") {
    CHECK(run_cli("analyze --config " + cfg.string() + " --out " + out.string() +
                      " --cells 50:20",
                  dir / "log_cells.txt") == 0);
    const std::string sub = slurp(out / "report.csv");
    CHECK(sub.find("\n50,20,") != std::string::npos);
    CHECK(sub.find("\n100,20,") == std::string::npos);
  }

  SUBCASE("calibrate recovers the delay constant from the report") {
    CHECK(run_cli("calibrate " + (out / "report.csv").string(), dir / "calib.txt") == 0);
    const std::string calib = slurp(dir / "calib.txt");
    CHECK(calib.find("k_delay = 0.4") != std::string::npos);
  }
}

TEST_CASE("cli: calibrate accepts plain mu,gap rows") {
  const fs::path dir = fresh_dir("calibrate");
  const fs::path csv = dir / "gaps.csv";
  std::ofstream(csv) << "mu,gap\n50,0.009\n";
  CHECK(run_cli("calibrate " + csv.string(), dir / "log.txt") == 0);
  const std::string log = slurp(dir / "log.txt");
  const auto pos = log.find("k_delay = ");
  REQUIRE(pos != std::string::npos);
  const double k = std::strtod(log.c_str() + pos + 10, nullptr);
  CHECK(k == doctest::Approx(0.45).epsilon(1e-12));

  std::ofstream(csv) << "not,a,number\nstill,not,one\n";
  CHECK(run_cli("calibrate " + csv.string(), dir / "log2.txt") == 2);
}

TEST_CASE("cli: oracle passes with the adaptive step and fails when forced coarse") {
  const fs::path dir = fresh_dir("oracle");
  const fs::path cfg = write_config(dir);
  CHECK(run_cli("oracle --config " + cfg.string(), dir / "log.txt") == 0);
  CHECK(slurp(dir / "log.txt").find("max rel err") != std::string::npos);

  CHECK(run_cli("oracle --config " + cfg.string() + " --dt 0.5", dir / "log2.txt") == 3);
  CHECK(slurp(dir / "log2.txt").find("verification failed") != std::string::npos);
}

TEST_CASE("cli: configuration problems exit with code 1") {
  const fs::path dir = fresh_dir("badcfg");
  const fs::path cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "no_such_key = 1\n";
  CHECK(run_cli("simulate --config " + cfg.string(), dir / "log.txt") == 1);
  CHECK(slurp(dir / "log.txt").find("config error") != std::string::npos);

  CHECK(run_cli("simulate --config " + (dir / "absent.cfg").string(), dir / "log2.txt") ==
        1);
  CHECK(run_cli("simulate", dir / "log3.txt") == 1);  // --config is required
  CHECK(run_cli("", dir / "log4.txt") == 1);          // a subcommand is required
}

TEST_CASE("cli: analyzing before simulating is a data error") {
  const fs::path dir = fresh_dir("noevents");
  const fs::path cfg = write_config(dir);
  CHECK(run_cli("analyze --config " + cfg.string() + " --out " + (dir / "empty").string(),
                dir / "log.txt") == 2);
  CHECK(slurp(dir / "log.txt").find("data error") != std::string::npos);
}

TEST_CASE("cli: version and help") {
  const fs::path dir = fresh_dir("version");
  CHECK(run_cli("--version", dir / "v.txt") == 0);
  CHECK(!slurp(dir / "v.txt").empty());
  CHECK(run_cli("--help", dir / "h.txt") == 0);
  CHECK(slurp(dir / "h.txt").find("simulate") != std::string::npos);
}
