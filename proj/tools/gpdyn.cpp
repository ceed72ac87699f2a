// gpdyn-cli: batch front end. Loads JSON models, runs one command and prints
// a report. Exit codes: 0 all checks pass, 1 a checked property fails,
// 2 usage or input error, 10/11/12 load errors (parse, unknown kind, range).

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gpdyn/cli.hpp"

namespace fs = std::filesystem;
using namespace gpdyn;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

// Writes the corpus as model files plus one golden report per command.
int export_fixtures(const fs::path& dir) {
  fs::create_directories(dir / "golden");
  for (const auto& [name, bundle] : fixtures::corpus())
    write_file(dir / (name + ".json"), io::to_json(bundle).dump(2) + "\n");
  for (const auto& e : cli::run_corpus())
    write_file(dir / "golden" / (e.fixture + "." + e.command + ".json"),
               cli::emit_report(e.report, "json"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite groupoids, principal bundles and their actions"};
  std::string command;
  std::vector<std::string> files;
  cli::Options opt;
  std::string format = "json";
  bool corpus = false;
  std::string export_dir;

  app.add_option("command", command, "verify, groupoidify, bundleize, roundtrip, holonomy, "
                                     "trivial, orbits, ambit, universal, sections, semigroup, ea");
  app.add_option("files", files, "model files; '-' or none reads standard input");
  app.add_option("--basepoint", opt.basepoint, "basepoint object")->default_val(0);
  app.add_option("--format", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->default_val("json");
  app.add_flag("--fixtures", corpus, "run the built-in fixture corpus");
  app.add_option("--export-fixtures", export_dir)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (!export_dir.empty()) return export_fixtures(export_dir);
    if (corpus) {
      std::vector<std::string> commands = cli::command_names();
      if (!command.empty()) commands = {command};
      for (const auto& c : commands)
        if (std::find(cli::command_names().begin(), cli::command_names().end(), c) ==
            cli::command_names().end())
          throw cli::UsageError("unknown command \"" + c + "\"");
      const auto entries = cli::run_corpus(commands);
      if (format == "json") {
        std::cout << cli::corpus_json(entries).dump() << "\n";
      } else {
        for (const auto& e : entries)
          std::cout << "== fixture " << e.fixture << "\n" << cli::emit_report(e.report, "text");
      }
      int code = 0;
      for (const auto& e : entries) code = std::max(code, e.report.exit_code());
      return code;
    }
    if (command.empty()) throw cli::UsageError("no command given");
    if (files.empty()) files = {"-"};
    std::vector<io::Model> models;
    for (const auto& f : files) models.push_back(io::load_model(f));
    const cli::Report r = cli::run_command(command, models, opt);
    std::cout << cli::emit_report(r, format);
    return r.exit_code();
  } catch (const io::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
