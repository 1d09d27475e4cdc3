// End-to-end tests that spawn the installed CLI binary and inspect its
// artifacts: CSV outputs, model and envelope JSON, trace files, sidecar
// metadata, exit codes, and stderr messages.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;

std::string scratch(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  return ::testing::TempDir() + info->name() + "_" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  EXPECT_TRUE(in.good()) << "cannot open " << path;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  ASSERT_TRUE(out.good()) << "cannot write " << path;
}

bool file_exists(const std::string& path) { return std::ifstream(path).good(); }

// Missing cells serialize as empty CSV fields.
int count_empty_cells(const std::string& csv) {
  std::istringstream lines(csv);
  std::string line;
  int empties = 0;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ','))
      if (cell.empty()) ++empties;
    if (!line.empty() && line.back() == ',') ++empties;
  }
  return empties;
}

struct RunResult {
  int status = -1;
  std::string out, err;
};

RunResult run(const std::string& args) {
  static int counter = 0;
  const std::string out_path = scratch("stdout_" + std::to_string(counter));
  const std::string err_path = scratch("stderr_" + std::to_string(counter));
  ++counter;
  const std::string cmd =
      std::string(DRIM_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
  const int rc = std::system(cmd.c_str());
  RunResult result;
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

// Complete CSV with y = 2 x0 - x1 on dyadic grid points.
std::string write_linear_csv(const std::string& name, int rows = 24) {
  const std::string path = scratch(name);
  std::ostringstream csv;
  csv << "x0,x1,y\n";
  for (int r = 0; r < rows; ++r) {
    const double x0 = 0.25 * r - 1.5;
    const double x1 = (r % 3) * 0.5 - 0.5;
    csv << x0 << "," << x1 << "," << 2.0 * x0 - x1 << "\n";
  }
  write_file(path, csv.str());
  return path;
}

// Two-blob CSV with a trailing 0/1 label column.
std::string write_blobs_csv(const std::string& name, int n_per = 40) {
  const std::string path = scratch(name);
  std::mt19937_64 gen(23);
  std::normal_distribution<double> noise(0.0, 0.4);
  std::ostringstream csv;
  csv << "x0,x1,label\n";
  for (int r = 0; r < 2 * n_per; ++r) {
    const double center = r < n_per ? -1.5 : 1.5;
    csv << center + noise(gen) << "," << center + noise(gen) << ","
        << (r < n_per ? 0 : 1) << "\n";
  }
  write_file(path, csv.str());
  return path;
}

// The "config: {...}" line every subcommand prints first.
json stdout_config(const std::string& out) {
  const auto pos = out.find("config: ");
  EXPECT_NE(pos, std::string::npos) << out;
  const auto end = out.find('\n', pos);
  return json::parse(out.substr(pos + 8, end - pos - 8));
}

TEST(Cli, VersionAndHelp) {
  const RunResult version = run("--version");
  EXPECT_EQ(version.status, 0);
  EXPECT_NE(version.out.find("0.1.0"), std::string::npos);

  const RunResult help = run("--help");
  EXPECT_EQ(help.status, 0);
  EXPECT_NE(help.out.find("generate-missing"), std::string::npos);
  EXPECT_NE(help.out.find("train-regression"), std::string::npos);

  const RunResult bare = run("");
  EXPECT_NE(bare.status, 0);
  EXPECT_FALSE(bare.err.empty());
}

TEST(Cli, GenerateMissingIsSeededAndLeavesTheInputAlone) {
  const std::string input = write_linear_csv("input.csv");
  const std::string before = read_file(input);

  const std::string out1 = scratch("masked1.csv");
  const std::string out2 = scratch("masked2.csv");
  const std::string base =
      " --input " + input + " --p 0.4 --seed 5 --mechanism mcar";
  const RunResult r1 = run("generate-missing --output " + out1 + base);
  const RunResult r2 = run("generate-missing --output " + out2 + base);
  ASSERT_EQ(r1.status, 0) << r1.err;
  ASSERT_EQ(r2.status, 0) << r2.err;

  EXPECT_EQ(read_file(out1), read_file(out2));
  EXPECT_EQ(read_file(input), before);

  // Seeded masking is deterministic; the realized fraction on 72 cells just
  // has to sit near p.
  const auto pos = r1.out.find("missing_fraction: ");
  ASSERT_NE(pos, std::string::npos) << r1.out;
  const double fraction = std::stod(r1.out.substr(pos + 18));
  EXPECT_GT(fraction, 0.2);
  EXPECT_LT(fraction, 0.7);

  const json meta = json::parse(read_file(out1 + ".meta.json"));
  EXPECT_EQ(meta.at("config").at("command"), "generate-missing");
  EXPECT_EQ(meta.at("config").at("seed"), 5);
  EXPECT_EQ(meta.at("config"), stdout_config(r1.out));

  const RunResult mnar = run("generate-missing --input " + input + " --output " +
                             scratch("mnar.csv") + " --mechanism mnar --a 1.0 --b -0.5");
  EXPECT_EQ(mnar.status, 0) << mnar.err;
}

TEST(Cli, ZeroMaskingProbabilityIsTheIdentityOnCells) {
  const std::string input = write_linear_csv("input.csv");
  const std::string canonical = scratch("canonical.csv");
  const RunResult r =
      run("generate-missing --input " + input + " --output " + canonical + " --p 0");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("missing_fraction: 0.000000"), std::string::npos);

  // An already-complete dataset passes through imputation untouched; both
  // artifacts are the canonical serialization of the same cells.
  const std::string imputed = scratch("imputed.csv");
  const RunResult imp = run("impute --input " + canonical + " --output " + imputed +
                            " --c 0 --lambda 1e-6 --k 3");
  ASSERT_EQ(imp.status, 0) << imp.err;
  EXPECT_EQ(read_file(imputed), read_file(canonical));
}

TEST(Cli, TrainRegressionRecoversTheLinearRuleAtZeroRadius) {
  const std::string input = write_linear_csv("input.csv");
  const std::string model_path = scratch("model.json");
  const RunResult r = run("train-regression --input " + input +
                          " --target y --output " + model_path +
                          " --c 0 --lambda 1e-8 --tol 1e-12 --k 5");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("converged: yes"), std::string::npos);

  const json model = json::parse(read_file(model_path));
  EXPECT_EQ(model.at("type"), "regression_model");
  EXPECT_EQ(model.at("target"), "y");
  ASSERT_EQ(model.at("theta").size(), 2u);
  EXPECT_NEAR(model.at("theta")[0].get<double>(), 2.0, 1e-4);
  EXPECT_NEAR(model.at("theta")[1].get<double>(), -1.0, 1e-4);
  EXPECT_EQ(model.at("config"), stdout_config(r.out));

  // The default trace path sits next to the model and holds one JSON line
  // per iteration with the objective value.
  const std::string trace = read_file(model_path + ".trace.jsonl");
  std::istringstream lines(trace);
  std::string line;
  int n_lines = 0;
  while (std::getline(lines, line)) {
    const json entry = json::parse(line);
    EXPECT_TRUE(entry.contains("iteration"));
    EXPECT_TRUE(entry.contains("g"));
    ++n_lines;
  }
  EXPECT_GE(n_lines, 1);
}

TEST(Cli, SolversReachDifferentAnswersOnABindingEnvelope) {
  const std::string env_path = std::string(DRIM_FIXTURE_DIR) + "/binding_envelope.json";
  const std::string pga_path = scratch("pga.json");
  const std::string admm_path = scratch("admm.json");

  const RunResult pga = run("train-regression --envelope " + env_path + " --output " +
                            pga_path + " --solver pga --lambda 1 --iters 20000 --tol 1e-10");
  ASSERT_EQ(pga.status, 0) << pga.err;
  const RunResult admm =
      run("train-regression --envelope " + env_path + " --output " + admm_path +
          " --solver admm --lambda 1 --rho 1 --iters 20000 --tol 1e-5");
  ASSERT_EQ(admm.status, 0) << admm.err;

  const json pga_model = json::parse(read_file(pga_path));
  const json admm_model = json::parse(read_file(admm_path));
  double gap = 0.0;
  for (int i = 0; i < 3; ++i)
    gap = std::max(gap, std::abs(pga_model.at("theta")[i].get<double>() -
                                 admm_model.at("theta")[i].get<double>()));
  EXPECT_GT(gap, 1e-3);

  // The ADMM trace carries the dual residual alongside the objective.
  std::istringstream lines(read_file(admm_path + ".trace.jsonl"));
  std::string line;
  ASSERT_TRUE(std::getline(lines, line));
  EXPECT_TRUE(json::parse(line).contains("residual"));
}

TEST(Cli, NonConvergenceFailsLoudlyButKeepsTheArtifacts) {
  // Three ADMM sweeps cannot push the constraint residual to 1e-14.
  const std::string env_path = std::string(DRIM_FIXTURE_DIR) + "/binding_envelope.json";
  const std::string model_path = scratch("model.json");
  const RunResult r =
      run("train-regression --envelope " + env_path + " --output " + model_path +
          " --solver admm --lambda 1 --rho 1 --iters 3 --tol 1e-14");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("did not reach its tolerance"), std::string::npos) << r.err;
  EXPECT_TRUE(file_exists(model_path));
  EXPECT_TRUE(file_exists(model_path + ".trace.jsonl"));
}

TEST(Cli, PredictAndEvaluateCloseTheLoop) {
  const std::string input = write_linear_csv("input.csv");
  const std::string model_path = scratch("model.json");
  ASSERT_EQ(run("train-regression --input " + input + " --target y --output " +
                model_path + " --c 0 --lambda 1e-8 --tol 1e-12 --k 5")
                .status,
            0);

  const std::string pred_path = scratch("pred.csv");
  const RunResult pred =
      run("predict --model " + model_path + " --input " + input + " --output " + pred_path);
  ASSERT_EQ(pred.status, 0) << pred.err;
  EXPECT_EQ(read_file(pred_path).rfind("y\n", 0), 0u);  // named after the target
  EXPECT_TRUE(file_exists(pred_path + ".meta.json"));

  const std::string jsonl = scratch("metrics.jsonl");
  std::remove(jsonl.c_str());  // --jsonl appends; drop leftovers of prior runs
  const RunResult eval = run("evaluate --pred " + pred_path + " --truth " + input +
                             " --column y --metric nrmse --jsonl " + jsonl +
                             " --label fit");
  ASSERT_EQ(eval.status, 0) << eval.err;
  const json line = json::parse(read_file(jsonl));
  EXPECT_EQ(line.at("metric"), "nrmse");
  EXPECT_LT(line.at("value").get<double>(), 1e-3);
  EXPECT_EQ(line.at("rows"), 24);
  EXPECT_EQ(line.at("label"), "fit");

  // Truth against itself is exactly zero.
  const RunResult self = run("evaluate --pred " + input + " --truth " + input +
                             " --column y --metric nrmse");
  ASSERT_EQ(self.status, 0);
  EXPECT_NE(self.out.find("nrmse: 0\n"), std::string::npos) << self.out;

  // A masked truth cell drops that row from the comparison.
  std::string holed = read_file(input);
  const auto last_comma = holed.rfind(',');
  holed = holed.substr(0, last_comma + 1) + "NA\n";
  const std::string holed_path = scratch("holed.csv");
  write_file(holed_path, holed);
  const RunResult partial = run("evaluate --pred " + pred_path + " --truth " + holed_path +
                                " --column y --metric nrmse --jsonl " + jsonl);
  ASSERT_EQ(partial.status, 0) << partial.err;
  std::istringstream lines(read_file(jsonl));
  std::string first, second;
  ASSERT_TRUE(std::getline(lines, first));
  ASSERT_TRUE(std::getline(lines, second));  // --jsonl appends
  EXPECT_EQ(json::parse(second).at("rows"), 23);
}

TEST(Cli, ImputeFillsCellsDeterministicallyAcrossThreads) {
  const std::string input = write_linear_csv("input.csv");
  const std::string masked = scratch("masked.csv");
  ASSERT_EQ(run("generate-missing --input " + input + " --output " + masked +
                " --p 0.3 --seed 7")
                .status,
            0);

  const std::string one = scratch("one.csv");
  const std::string four = scratch("four.csv");
  const std::string base = " --c 0 --lambda 1e-6 --k 5 --solver pga";
  ASSERT_EQ(run("impute --input " + masked + " --output " + one + base + " --threads 1")
                .status,
            0);
  ASSERT_EQ(run("impute --input " + masked + " --output " + four + base + " --threads 4")
                .status,
            0);
  EXPECT_EQ(read_file(one), read_file(four));
  EXPECT_EQ(count_empty_cells(read_file(one)), 0);
  EXPECT_GT(count_empty_cells(read_file(masked)), 0);
}

TEST(Cli, EnvelopeArtifactsDoNotDependOnTheThreadCount) {
  const std::string input = write_linear_csv("input.csv");
  const std::string masked = scratch("masked.csv");
  ASSERT_EQ(run("generate-missing --input " + input + " --output " + masked +
                " --p 0.2 --seed 9")
                .status,
            0);

  const std::string one = scratch("env1.json");
  const std::string four = scratch("env4.json");
  ASSERT_EQ(run("estimate-moments --input " + masked + " --output " + one +
                " --target y --k 20 --c 1.5 --seed 3 --threads 1")
                .status,
            0);
  ASSERT_EQ(run("estimate-moments --input " + masked + " --output " + four +
                " --target y --k 20 --c 1.5 --seed 3 --threads 4")
                .status,
            0);

  // The embedded config echoes the differing thread counts; everything
  // numeric must match exactly.
  json env1 = json::parse(read_file(one));
  json env4 = json::parse(read_file(four));
  EXPECT_EQ(env1.at("config").at("threads"), 1);
  EXPECT_EQ(env4.at("config").at("threads"), 4);
  env1.erase("config");
  env4.erase("config");
  EXPECT_EQ(env1, env4);

  // A prebuilt envelope trains the same model as the end-to-end path.
  const std::string via_env = scratch("via_env.json");
  const std::string direct = scratch("direct.json");
  ASSERT_EQ(run("train-regression --envelope " + one + " --output " + via_env +
                " --solver pga --lambda 0.5 --iters 10000 --tol 1e-10")
                .status,
            0);
  ASSERT_EQ(run("train-regression --input " + masked + " --target y --output " + direct +
                " --solver pga --lambda 0.5 --k 20 --c 1.5 --seed 3 --iters 10000"
                " --tol 1e-10")
                .status,
            0);
  EXPECT_EQ(json::parse(read_file(via_env)).at("theta"),
            json::parse(read_file(direct)).at("theta"));
}

TEST(Cli, LdaTrainsPredictsAndScores) {
  const std::string input = write_blobs_csv("blobs.csv");
  const std::string model_path = scratch("lda.json");
  const RunResult train = run("train-lda --input " + input + " --label label --output " +
                              model_path +
                              " --k 2 --iters 40 --alpha 0.1 --n-mc 128 --mu-c 1 --seed 11");
  ASSERT_EQ(train.status, 0) << train.err;
  const json model = json::parse(read_file(model_path));
  EXPECT_EQ(model.at("type"), "lda_model");
  EXPECT_EQ(model.at("label"), "label");
  EXPECT_EQ(model.at("config"), stdout_config(train.out));

  const std::string pred_path = scratch("pred.csv");
  ASSERT_EQ(run("predict --model " + model_path + " --input " + input + " --output " +
                pred_path)
                .status,
            0);
  EXPECT_EQ(read_file(pred_path).rfind("label\n", 0), 0u);

  const RunResult eval = run("evaluate --pred " + pred_path + " --truth " + input +
                             " --column label --metric accuracy");
  ASSERT_EQ(eval.status, 0) << eval.err;
  const auto pos = eval.out.find("accuracy: ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GE(std::stod(eval.out.substr(pos + 10)), 0.9);
}

TEST(Cli, BadInvocationsExitNonzeroWithAMessage) {
  const std::string input = write_linear_csv("input.csv");

  const RunResult both = run("train-regression --input " + input + " --envelope x.json" +
                             " --target y --output " + scratch("m.json"));
  EXPECT_NE(both.status, 0);
  EXPECT_NE(both.err.find("exactly one of --input or --envelope"), std::string::npos);

  const RunResult no_target =
      run("train-regression --input " + input + " --output " + scratch("m.json"));
  EXPECT_NE(no_target.status, 0);
  EXPECT_NE(no_target.err.find("--target is required"), std::string::npos);

  const RunResult absent = run("train-regression --input /no/such.csv --target y --output " +
                               scratch("m.json"));
  EXPECT_NE(absent.status, 0);
  EXPECT_NE(absent.err.find("error: "), std::string::npos);

  const RunResult solver = run("train-regression --input " + input +
                               " --target y --solver sgd --output " + scratch("m.json"));
  EXPECT_NE(solver.status, 0);
  EXPECT_FALSE(solver.err.empty());

  const RunResult column = run("train-regression --input " + input +
                               " --target zz --output " + scratch("m.json"));
  EXPECT_NE(column.status, 0);
  EXPECT_NE(column.err.find("zz"), std::string::npos);

  // An envelope is not something predict accepts as a model.
  const std::string env_path = std::string(DRIM_FIXTURE_DIR) + "/binding_envelope.json";
  const RunResult wrong = run("predict --model " + env_path + " --input " + input +
                              " --output " + scratch("p.csv"));
  EXPECT_NE(wrong.status, 0);
  EXPECT_NE(wrong.err.find("not a predictive model"), std::string::npos);

  const std::string short_csv = scratch("short.csv");
  write_file(short_csv, "y\n1\n2\n");
  const RunResult rows = run("evaluate --pred " + short_csv + " --truth " + input +
                             " --column y");
  EXPECT_NE(rows.status, 0);
  EXPECT_NE(rows.err.find("row counts differ"), std::string::npos);
}

}  // namespace
