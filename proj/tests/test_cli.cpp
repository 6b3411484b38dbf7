// Config and matrix parsing, subcommand exit codes, and artifact layout,
// exercised in-process through run_cli with scratch directories.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tofrec/cli.hpp"
#include "tofrec/errors.hpp"
#include "tofrec/measurement.hpp"

namespace fs = std::filesystem;
using namespace tofrec;
using doctest::Contains;

namespace {

// Unique scratch directory, removed when the test case ends.
struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    static const auto token =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path = fs::temp_directory_path() /
           ("tofrec_cli_" + tag + "_" + std::to_string(token));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }

  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
  out.flush();
  REQUIRE(out.good());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Drives the full argv entry point with stdout/stderr captured so test
// output stays clean and the printed reports can be asserted on.
CliResult run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  std::ostringstream out, err;
  std::streambuf* const prev_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* const prev_err = std::cerr.rdbuf(err.rdbuf());
  CliResult res;
  res.code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(prev_out);
  std::cerr.rdbuf(prev_err);
  res.out = out.str();
  res.err = err.str();
  return res;
}

const char* const kMaterial =
    "rho = 7800\n"
    "c = 400\n"
    "k = 50\n"
    "a = -0.4521\n"
    "b = 3259.9\n";

// Small exact-data synthesis setup that keeps every CLI run fast.
std::string synth_config() {
  return std::string(kMaterial) +
         "tau = 500\n"
         "M = 8\n"
         "N = 10\n"
         "L_true_mm = 50\n"
         "q_true = 1e5\n"
         "accuracy = 0\n"
         "synth_refine = 1\n"
         "seed = 3\n";
}

}  // namespace

TEST_CASE("config parsing handles units, comments, sections and key tracking") {
  TempDir tmp("cfg");
  const std::string path = tmp.file("run.cfg");
  write_file(path,
             "# material block\n"
             "[material]\n"
             "rho = 7800\n"
             "c=400\n"
             "  k = 50  \n"
             "a = -0.4521\r\n"
             "b = 3259.9\n"
             "\n"
             "tau = 500\n"
             "M = 12\n"
             "N = 24\n"
             "L_true_mm = 50\n"
             "q_true = 1e5\n"
             "L0_mm = 45\n"
             "L_min_mm = 2\n"
             "L_max_mm = 120\n"
             "eps_stagnate_mm = 0.01\n"
             "alpha0 = 0.25\n"
             "alpha_decay = 8\n"
             "crl = 1e-17\n"
             "n_max = 77\n"
             "wolfe_rho = 0.3\n"
             "wolfe_sigma = 0.7\n"
             "lambda_max = 2.5\n"
             "max_bisections = 9\n"
             "accuracy = 1e-9\n"
             "dither = true\n"
             "seed = 12345\n");

  const RunConfig cfg = parse_config(path);
  CHECK(cfg.rho == 7800.0);
  CHECK(cfg.c == 400.0);
  CHECK(cfg.k == 50.0);
  CHECK(cfg.a == doctest::Approx(-0.4521));
  CHECK(cfg.b == doctest::Approx(3259.9));
  CHECK(cfg.tau == 500.0);
  CHECK(cfg.M == 12);
  CHECK(cfg.N == 24);

  // All *_mm keys arrive in metres.
  CHECK(cfg.L_true == doctest::Approx(0.050));
  CHECK(cfg.L0 == doctest::Approx(0.045));
  CHECK(cfg.L_min == doctest::Approx(0.002));
  CHECK(cfg.L_max == doctest::Approx(0.120));
  CHECK(cfg.obj.eps_stagnate == doctest::Approx(1e-5));

  CHECK(cfg.has_q_true);
  CHECK(cfg.q_true.kind == FluxSpec::Kind::Constant);
  CHECK(cfg.q_true.value == 1e5);
  CHECK(cfg.has_L0);
  CHECK(cfg.obj.alpha == 0.25);
  CHECK(cfg.obj.alpha_decay == 8.0);
  CHECK(cfg.obj.crl == 1e-17);
  CHECK(cfg.obj.n_max == 77);
  CHECK(cfg.wolfe.rho == 0.3);
  CHECK(cfg.wolfe.sigma == 0.7);
  CHECK(cfg.wolfe.lambda_max == 2.5);
  CHECK(cfg.wolfe.max_bisections == 9);
  CHECK(cfg.accuracy == 1e-9);
  CHECK(cfg.dither);
  CHECK(cfg.seed == 12345ull);

  CHECK(cfg.provided.count("rho") == 1);
  CHECK(cfg.provided.count("T0") == 0);
  CHECK(cfg.T0 == 26.0);  // untouched default
}

TEST_CASE("config parsing rejects malformed input naming the offending line") {
  TempDir tmp("cfgbad");
  const auto path_for = [&](const char* name, const std::string& text) {
    const std::string p = tmp.file(name);
    write_file(p, text);
    return p;
  };

  CHECK_THROWS_WITH_AS(
      parse_config(path_for("unknown.cfg", "rho = 1\nbanana = 2\n")),
      Contains("unknown key banana"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(path_for("dup.cfg", "rho = 1\nrho = 2\n")),
                       Contains("duplicate key rho"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(path_for("num.cfg", "rho = 1\nc = twelve\n")),
                       Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(parse_config(path_for("eq.cfg", "rho 1\n")),
                       Contains("missing '='"), ParseError);
  CHECK_THROWS_WITH_AS(parse_config(path_for("int.cfg", "M = 2.5\n")),
                       Contains("integer"), ParseError);
  CHECK_THROWS_WITH_AS(parse_config(path_for("bool.cfg", "dither = banana\n")),
                       Contains("true/false"), ParseError);
  CHECK_THROWS_WITH_AS(parse_config(path_for("seed.cfg", "seed = 12x\n")),
                       Contains("seed"), ParseError);
  CHECK_THROWS_AS(parse_config(tmp.file("does_not_exist.cfg")), IoError);
}

TEST_CASE("required-key validation treats the flux sources as alternatives") {
  RunConfig cfg;
  CHECK_THROWS_WITH_AS(cfg.require_keys({"q_true"}),
                       "missing required key q_true (or q_true_file)",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(cfg.require_keys({"rho"}),
                       Contains("missing required key rho"),
                       std::invalid_argument);

  cfg.provided.insert("rho");
  CHECK_NOTHROW(cfg.require_keys({"rho"}));

  cfg.has_q_true = true;  // as set by either q_true or q_true_file
  CHECK_NOTHROW(cfg.require_keys({"q_true"}));
}

TEST_CASE("flux tables load from CSV and plug into the config") {
  TempDir tmp("flux");
  const std::string good = tmp.file("q.csv");
  write_file(good, "t_s,q_W_per_m2\n0,0\n250,2e5\n500,0\n");

  const FluxSpec spec = load_flux_table(good);
  REQUIRE(spec.kind == FluxSpec::Kind::Table);
  REQUIRE(spec.table.size() == 3);
  CHECK(spec.table[0] == 0.0);
  CHECK(spec.table[1] == 2e5);
  CHECK(spec.table[2] == 0.0);

  const std::string cfg_path = tmp.file("run.cfg");
  write_file(cfg_path, "q_true_file = " + good + "\n");
  const RunConfig cfg = parse_config(cfg_path);
  CHECK(cfg.has_q_true);
  CHECK(cfg.q_true.kind == FluxSpec::Kind::Table);

  const std::string bad_header = tmp.file("h.csv");
  write_file(bad_header, "time,q\n0,0\n1,1\n");
  CHECK_THROWS_WITH_AS(load_flux_table(bad_header), Contains("header"),
                       ParseError);

  const std::string too_short = tmp.file("short.csv");
  write_file(too_short, "t_s,q_W_per_m2\n0,5\n");
  CHECK_THROWS_WITH_AS(load_flux_table(too_short), Contains("two rows"),
                       ParseError);

  const std::string bad_num = tmp.file("badnum.csv");
  write_file(bad_num, "t_s,q_W_per_m2\n0,0\n1,oops\n");
  CHECK_THROWS_WITH_AS(load_flux_table(bad_num), Contains("line 3"), ParseError);

  CHECK_THROWS_AS(load_flux_table(tmp.file("missing.csv")), IoError);
}

TEST_CASE("sweep matrix parsing accepts comments and validates its shape") {
  TempDir tmp("matrix");
  const auto path_for = [&](const char* name, const std::string& text) {
    const std::string p = tmp.file(name);
    write_file(p, text);
    return p;
  };

  const SweepMatrix m = parse_matrix(path_for("good.mtx",
                                              "# starts\n"
                                              "accuracy = 1e-9, 1e-10\n"
                                              "cell = 0, 3\n"
                                              "cell = 1e3, 45  # far guess\n"));
  REQUIRE(m.accuracies.size() == 2);
  CHECK(m.accuracies[0] == 1e-9);
  CHECK(m.accuracies[1] == 1e-10);
  REQUIRE(m.cells.size() == 2);
  CHECK(m.cells[0].first == 0.0);
  CHECK(m.cells[0].second == doctest::Approx(0.003));  // mm in, metres out
  CHECK(m.cells[1].first == 1e3);
  CHECK(m.cells[1].second == doctest::Approx(0.045));

  CHECK_THROWS_WITH_AS(
      parse_matrix(path_for("dup.mtx",
                            "accuracy = 1e-9\naccuracy = 1e-10\ncell = 0, 3\n")),
      Contains("duplicate accuracy"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_matrix(path_for("unknown.mtx", "accuracy = 1e-9\nrows = 2\n")),
      Contains("unknown key"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_matrix(path_for("cell3.mtx", "accuracy = 1e-9\ncell = 0, 3, 7\n")),
      Contains("q0, L0_mm"), ParseError);
  CHECK_THROWS_AS(
      parse_matrix(path_for("negacc.mtx", "accuracy = -1\ncell = 0, 3\n")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_matrix(path_for("zerol.mtx", "accuracy = 1e-9\ncell = 0, 0\n")),
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_matrix(path_for("noacc.mtx", "cell = 0, 3\n")),
                       Contains("accuracy"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_matrix(path_for("nocell.mtx", "accuracy = 1e-9\n")),
                       Contains("cell"), std::invalid_argument);
  CHECK_THROWS_AS(parse_matrix(tmp.file("missing.mtx")), IoError);
}

TEST_CASE("simulate writes a loadable measurement set and reports its range") {
  TempDir tmp("sim");
  const std::string cfg_path = tmp.file("run.cfg");
  write_file(cfg_path, synth_config());

  const std::string out_dir = tmp.file("out");
  const CliResult r =
      run({"tofrec", "simulate", "--config", cfg_path, "--out", out_dir});
  CHECK(r.code == kExitOk);
  CHECK(r.err.empty());
  CHECK(r.out.find("rows = 11") != std::string::npos);
  CHECK(r.out.find("accuracy = 0 (exact data)") != std::string::npos);
  CHECK(r.out.find("lambda_min_s = ") != std::string::npos);

  const MeasurementSet set =
      load_measurements(tmp.file("out/measurements.csv"));
  CHECK(set.steps() == 10);
  CHECK(set.tau() == doctest::Approx(500.0));
  CHECK(set.meta.count("L_true_mm") == 1);

  SUBCASE("a tabulated true flux drives the synthesis through its own grid") {
    const std::string table = tmp.file("q.csv");
    write_file(table, "t_s,q_W_per_m2\n0,0\n250,2e5\n500,0\n");
    write_file(tmp.file("tab.cfg"),
               std::string(kMaterial) +
                   "tau = 500\nM = 8\nN = 10\nL_true_mm = 50\n"
                   "q_true_file = " + table +
                   "\naccuracy = 0\nsynth_refine = 2\nseed = 3\n");
    const CliResult rt = run({"tofrec", "simulate", "--config",
                              tmp.file("tab.cfg"), "--out", tmp.file("out2")});
    CHECK(rt.code == kExitOk);
    const MeasurementSet heated =
        load_measurements(tmp.file("out2/measurements.csv"));
    // Net energy went in, so the wall ends hotter and slower than it began.
    CHECK(heated.lambda_m.values.back() > heated.lambda_m.values.front());
  }
}

TEST_CASE("invert runs from a measurement file, writes artifacts, repeats "
          "byte for byte") {
  TempDir tmp("inv");
  write_file(tmp.file("synth.cfg"), synth_config());
  REQUIRE(run({"tofrec", "simulate", "--config", tmp.file("synth.cfg"), "--out",
               tmp.file("data")})
              .code == kExitOk);
  const std::string meas = tmp.file("data/measurements.csv");

  write_file(tmp.file("inv.cfg"), std::string(kMaterial) +
                                      "tau = 500\nM = 8\nN = 10\n"
                                      "L0_mm = 45\nq0 = 0\nn_max = 15\nseed = 3\n");

  const CliResult r1 = run({"tofrec", "invert", "--config", tmp.file("inv.cfg"),
                            "--out", tmp.file("runA"), "--measurements", meas});
  CHECK(r1.code == kExitOk);
  CHECK(r1.out.find("stop_reason = ") != std::string::npos);
  CHECK(r1.out.find("L_mm = ") != std::string::npos);

  for (const char* name :
       {"trajectory.csv", "events.csv", "summary.txt", "q_reconstructed.csv"})
    CHECK(fs::exists(fs::path(tmp.file("runA")) / name));

  const std::string traj = read_file(tmp.file("runA/trajectory.csv"));
  CHECK(traj.rfind("n,J,L_mm,grad_q_norm,d_n,alpha,beta,lambda\n", 0) == 0);

  // The reconstructed flux is itself a valid flux table.
  const FluxSpec q_rec = load_flux_table(tmp.file("runA/q_reconstructed.csv"));
  CHECK(q_rec.table.size() == 11);

  const CliResult r2 = run({"tofrec", "invert", "--config", tmp.file("inv.cfg"),
                            "--out", tmp.file("runB"), "--measurements", meas});
  CHECK(r2.code == kExitOk);
  CHECK(read_file(tmp.file("runB/trajectory.csv")) == traj);
  CHECK(read_file(tmp.file("runB/summary.txt")) ==
        read_file(tmp.file("runA/summary.txt")));
}

TEST_CASE("invert rejects inputs that contradict the config before solving") {
  TempDir tmp("invbad");
  write_file(tmp.file("synth.cfg"), synth_config());
  REQUIRE(run({"tofrec", "simulate", "--config", tmp.file("synth.cfg"), "--out",
               tmp.file("data")})
              .code == kExitOk);
  const std::string meas = tmp.file("data/measurements.csv");

  SUBCASE("row count mismatch against a provided N") {
    write_file(tmp.file("badn.cfg"),
               std::string(kMaterial) + "N = 7\nL0_mm = 45\n");
    const CliResult r = run({"tofrec", "invert", "--config", tmp.file("badn.cfg"),
                             "--out", tmp.file("o"), "--measurements", meas});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("rows") != std::string::npos);
  }

  SUBCASE("horizon mismatch against a provided tau") {
    write_file(tmp.file("badtau.cfg"),
               std::string(kMaterial) + "tau = 123\nL0_mm = 45\n");
    const CliResult r = run({"tofrec", "invert", "--config",
                             tmp.file("badtau.cfg"), "--out", tmp.file("o"),
                             "--measurements", meas});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("horizon") != std::string::npos);
  }

  SUBCASE("missing measurement file") {
    write_file(tmp.file("ok.cfg"), std::string(kMaterial) + "L0_mm = 45\n");
    const CliResult r = run({"tofrec", "invert", "--config", tmp.file("ok.cfg"),
                             "--out", tmp.file("o"), "--measurements",
                             tmp.file("nope.csv")});
    CHECK(r.code == kExitIo);
  }

  SUBCASE("corrupt measurement file") {
    write_file(tmp.file("garbage.csv"), "bogus\n1,2,3\n");
    write_file(tmp.file("ok.cfg"), std::string(kMaterial) + "L0_mm = 45\n");
    const CliResult r = run({"tofrec", "invert", "--config", tmp.file("ok.cfg"),
                             "--out", tmp.file("o"), "--measurements",
                             tmp.file("garbage.csv")});
    CHECK(r.code == kExitParse);
    CHECK(r.err.find("header") != std::string::npos);
  }

  SUBCASE("missing starting thickness") {
    write_file(tmp.file("nol0.cfg"), kMaterial);
    const CliResult r = run({"tofrec", "invert", "--config", tmp.file("nol0.cfg"),
                             "--out", tmp.file("o"), "--measurements", meas});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("L0_mm") != std::string::npos);
  }
}

TEST_CASE("gradcheck passes clean and fails when the adjoint source is skewed") {
  TempDir tmp("gc");
  write_file(tmp.file("gc.cfg"), std::string(kMaterial) +
                                     "tau = 500\nM = 6\nN = 8\nL_true_mm = 50\n"
                                     "q_true = 1e5\naccuracy = 0\n"
                                     "synth_refine = 1\nseed = 3\n");

  const CliResult ok = run({"tofrec", "gradcheck", "--config", tmp.file("gc.cfg"),
                            "--out", tmp.file("ok")});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("gradcheck = PASS") != std::string::npos);
  CHECK(ok.out.find("dJdL_sign_agreement = 20/20") != std::string::npos);
  const std::string report = read_file(tmp.file("ok/gradcheck.txt"));
  CHECK(report.find("max_rel_err_q") != std::string::npos);
  CHECK(report.find("dJdL_neglected_term_rel") != std::string::npos);

  // A 10% multiplicative skew on the adjoint source must blow the 1e-3 gate.
  const CliResult bad =
      run({"tofrec", "gradcheck", "--config", tmp.file("gc.cfg"), "--out",
           tmp.file("bad"), "--corrupt-source"});
  CHECK(bad.code == kExitCheckFailed);
  CHECK(bad.out.find("gradcheck = FAIL") != std::string::npos);

  SUBCASE("large grids are refused to keep finite differencing honest") {
    write_file(tmp.file("big.cfg"), std::string(kMaterial) +
                                        "tau = 500\nM = 100\nN = 8\n"
                                        "L_true_mm = 50\nq_true = 1e5\n");
    const CliResult r = run({"tofrec", "gradcheck", "--config",
                             tmp.file("big.cfg"), "--out", tmp.file("o")});
    CHECK(r.code == kExitValidation);
  }
}

TEST_CASE("sweep covers the start matrix and matches a lone invert run") {
  TempDir tmp("sweep");
  // n_max keeps each cell short; results still land in sweep.csv.
  write_file(tmp.file("sw.cfg"), synth_config() + "n_max = 12\n");
  write_file(tmp.file("m.mtx"), "accuracy = 0\ncell = 0, 45\ncell = 1e5, 50\n");

  const CliResult r = run({"tofrec", "sweep", "--config", tmp.file("sw.cfg"),
                           "--out", tmp.file("out"), "--matrix",
                           tmp.file("m.mtx")});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(tmp.file("out/measurements_acc0.csv")));

  const std::string table = read_file(tmp.file("out/sweep.csv"));
  CHECK(table.rfind("accuracy_s,q0,L0_mm,L_rec_mm,iterations,final_J\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);  // header + 2 cells

  const std::string cell_dir = tmp.file("out/cells/acc0_q0_L45mm");
  for (const char* name : {"trajectory.csv", "summary.txt"})
    CHECK(fs::exists(fs::path(cell_dir) / name));

  // The same start driven through invert on the synthesized file reproduces
  // the sweep cell exactly: save/load is bit-exact and both paths share one
  // deterministic pipeline.
  write_file(tmp.file("inv.cfg"), std::string(kMaterial) +
                                      "tau = 500\nM = 8\nN = 10\n"
                                      "L0_mm = 45\nq0 = 0\nn_max = 12\nseed = 3\n");
  const CliResult inv = run({"tofrec", "invert", "--config", tmp.file("inv.cfg"),
                             "--out", tmp.file("solo"), "--measurements",
                             tmp.file("out/measurements_acc0.csv")});
  CHECK(inv.code == kExitOk);
  CHECK(read_file(tmp.file("solo/trajectory.csv")) ==
        read_file(cell_dir + "/trajectory.csv"));
}

TEST_CASE("argument and config errors map to distinct exit codes") {
  TempDir tmp("codes");

  SUBCASE("help exits cleanly") {
    const CliResult r = run({"tofrec", "--help"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("simulate") != std::string::npos);
  }

  SUBCASE("missing subcommand or unknown flag is a usage error") {
    CHECK(run({"tofrec"}).code == kExitParse);
    CHECK(run({"tofrec", "simulate", "--config", "x", "--frobnicate"}).code ==
          kExitParse);
  }

  SUBCASE("nonexistent config file") {
    const CliResult r = run({"tofrec", "simulate", "--config",
                             tmp.file("missing.cfg"), "--out", tmp.file("o")});
    CHECK(r.code == kExitIo);
  }

  SUBCASE("malformed config value") {
    write_file(tmp.file("bad.cfg"), "rho = abc\n");
    const CliResult r = run({"tofrec", "simulate", "--config", tmp.file("bad.cfg"),
                             "--out", tmp.file("o")});
    CHECK(r.code == kExitParse);
    CHECK(r.err.find("malformed") != std::string::npos);
  }

  SUBCASE("incomplete config fails validation naming the key") {
    write_file(tmp.file("norho.cfg"),
               "c = 400\nk = 50\na = -0.4521\nb = 3259.9\n"
               "tau = 500\nL_true_mm = 50\nq_true = 1e5\n");
    const CliResult r = run({"tofrec", "simulate", "--config",
                             tmp.file("norho.cfg"), "--out", tmp.file("o")});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("rho") != std::string::npos);
  }

  SUBCASE("invalid synthesis parameters fail validation") {
    write_file(tmp.file("badacc.cfg"),
               std::string(kMaterial) +
                   "tau = 500\nM = 8\nN = 10\nL_true_mm = 50\nq_true = 1e5\n"
                   "accuracy = -1\n");
    const CliResult r = run({"tofrec", "simulate", "--config",
                             tmp.file("badacc.cfg"), "--out", tmp.file("o")});
    CHECK(r.code == kExitValidation);
  }

  SUBCASE("--seed overrides the config seed deterministically") {
    // Dither and trace noise both draw from the seeded generator.
    write_file(tmp.file("s.cfg"),
               std::string(kMaterial) +
                   "tau = 500\nM = 8\nN = 10\nL_true_mm = 50\nq_true = 1e5\n"
                   "accuracy = 1e-9\ndither = true\ntemp_noise = 0.05\n"
                   "synth_refine = 1\n");
    REQUIRE(run({"tofrec", "simulate", "--config", tmp.file("s.cfg"), "--out",
                 tmp.file("a"), "--seed", "11"})
                .code == kExitOk);
    REQUIRE(run({"tofrec", "simulate", "--config", tmp.file("s.cfg"), "--out",
                 tmp.file("b"), "--seed", "11"})
                .code == kExitOk);
    REQUIRE(run({"tofrec", "simulate", "--config", tmp.file("s.cfg"), "--out",
                 tmp.file("c"), "--seed", "12"})
                .code == kExitOk);
    const std::string a = read_file(tmp.file("a/measurements.csv"));
    CHECK(a == read_file(tmp.file("b/measurements.csv")));
    CHECK(a != read_file(tmp.file("c/measurements.csv")));
  }
}
