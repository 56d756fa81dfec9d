#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "densegame/cli.hpp"

namespace {

char decimal_char(const std::string& s) {
  if (s == "," || s == ".") return s[0];
  throw CLI::ValidationError("--decimal", "must be ',' or '.'");
}

void add_content_options(CLI::App* cmd, densegame::cli::ContentPaths& paths) {
  cmd->add_option("--catalog", paths.catalog, "Cube/liquid catalog file");
  cmd->add_option("--bank", paths.bank, "Item bank file");
  cmd->add_option("--strings", paths.strings, "String table file");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = densegame::cli;
  CLI::App app{"Density game engine: headless sessions, grading and study analytics.\n"
               "Default content is read from $DENSEGAME_CONFIG_DIR when set."};
  app.require_subcommand(1);

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Play one full session with a scripted agent and write its log");
  add_content_options(simulate, sim.content);
  simulate->add_option("--policy", sim.policy, "oracle|contrarian|random|scripted")->required();
  simulate->add_option("--script", sim.script, "Protocol command file for --policy scripted");
  simulate->add_option("--seed", sim.seed, "Session seed")->required();
  simulate->add_option("--out", sim.out, "Log file to write")->required();
  simulate->add_option("--participant", sim.participant, "Participant id (default: <policy>-<seed>)");

  cli::AnalyzeOptions ana;
  std::string ana_decimal = ".";
  auto* analyze = app.add_subcommand("analyze", "Timing table and pre/post summary for a directory of logs");
  analyze->add_option("--in", ana.in, "Directory of *.jsonl / *.log session logs")->required();
  analyze->add_option("--format", ana.format, "table|machine")->capture_default_str();
  analyze->add_option("--bank", ana.bank, "Item bank file");
  analyze->add_option("--decimal", ana_decimal, "Decimal separator for tables: ',' or '.'")->capture_default_str();
  analyze->add_option("--export-responses", ana.export_responses, "Also write test answers as a responses file");
  analyze->add_option("--test", ana.export_test, "pre|post, which test to export")->capture_default_str();

  cli::GradeOptions gr;
  std::string gr_decimal = ".";
  auto* grade = app.add_subcommand("grade", "Grade questionnaire responses per participant and for the cohort");
  grade->add_option("--responses", gr.responses, "Responses file")->required();
  grade->add_option("--bank", gr.bank, "Item bank file");
  grade->add_option("--decimal", gr_decimal, "Decimal separator: ',' or '.'")->capture_default_str();

  cli::ClusterOptions cl;
  auto* cluster = app.add_subcommand("cluster", "Group participants by answer-profile similarity");
  cluster->add_option("--responses", cl.responses, "Responses file")->required();
  cluster->add_option("--threshold", cl.threshold, "Average-linkage merge threshold in (0,1)")->capture_default_str();
  cluster->add_option("--bank", cl.bank, "Item bank file");

  cli::ContentPaths play_content;
  auto* play = app.add_subcommand("play", "Serve the line-delimited command protocol on stdin/stdout");
  add_content_options(play, play_content);

  try {
    app.parse(argc, argv);
    ana.decimal = decimal_char(ana_decimal);
    gr.decimal = decimal_char(gr_decimal);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (simulate->parsed()) return cli::simulate(sim, std::cout, std::cerr);
  if (analyze->parsed()) return cli::analyze(ana, std::cout, std::cerr);
  if (grade->parsed()) return cli::grade_cmd(gr, std::cout, std::cerr);
  if (cluster->parsed()) return cli::cluster_cmd(cl, std::cout, std::cerr);
  if (play->parsed()) return cli::play(play_content, std::cin, std::cout, std::cerr);
  return cli::kExitUsage;
}
