// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cacaobpmn/bpmn/codec.hpp"
#include "cacaobpmn/bpmn/well_formed.hpp"
#include "cacaobpmn/cacao/codec.hpp"
#include "cacaobpmn/cacao/diff.hpp"
#include "cacaobpmn/cacao/inspect.hpp"
#include "cacaobpmn/cacao/validate.hpp"
#include "cacaobpmn/layout/layout.hpp"
#include "cacaobpmn/mapping/forward.hpp"
#include "cacaobpmn/mapping/reverse.hpp"

namespace {

namespace cacao = cacaobpmn::cacao;
namespace bpmn = cacaobpmn::bpmn;
namespace mapping = cacaobpmn::mapping;
namespace layout = cacaobpmn::layout;
using cacaobpmn::Violation;
using cacaobpmn::Violations;

enum class Format { Cacao, Bpmn };

struct Options {
  std::string input;
  std::string output;
  std::string from;
  std::string to;
  std::string parallel_style = "gateway-pair";
  std::string conditional_style = "gateway-pair";
  std::string import_mode = "strict";
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw std::runtime_error("cannot read \"" + path + "\"");
  return std::move(buffer).str();
}

// The converted document reaches the output path only complete: it is
// staged next to it and moved into place.
void write_output(const Options& opt, const std::string& content) {
  if (opt.output.empty()) {
    std::cout << content;
    return;
  }
  std::string staged = opt.output + ".tmp";
  {
    std::ofstream out(staged, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(staged, ignored);
      throw std::runtime_error("cannot write \"" + staged + "\"");
    }
  }
  std::error_code error;
  std::filesystem::rename(staged, opt.output, error);
  if (error) {
    std::error_code ignored;
    std::filesystem::remove(staged, ignored);
    throw std::runtime_error("cannot replace \"" + opt.output + "\": " +
                             error.message());
  }
}

Format detect_format(const Options& opt, const std::string& text) {
  if (opt.from == "cacao") return Format::Cacao;
  if (opt.from == "bpmn") return Format::Bpmn;
  std::size_t i = text.rfind("\xEF\xBB\xBF", 0) == 0 ? 3 : 0;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    if (c == '{') return Format::Cacao;
    if (c == '<') return Format::Bpmn;
    break;
  }
  throw std::runtime_error(
      "cannot detect the input format (the document opens with neither "
      "\"{\" nor \"<\"); pass --from");
}

mapping::MappingOptions mapping_options(const Options& opt) {
  auto style = [](const std::string& name) {
    return name == "sub-process" ? mapping::BranchStyle::SubProcess
                                 : mapping::BranchStyle::GatewayPair;
  };
  return {style(opt.parallel_style), style(opt.conditional_style)};
}

mapping::ImportPolicy import_policy(const Options& opt) {
  mapping::ImportPolicy policy;
  if (opt.import_mode == "best-effort")
    policy.mode = mapping::ImportMode::BestEffort;
  return policy;
}

void print_violations(const Violations& violations, std::ostream& out) {
  for (const Violation& violation : violations)
    out << violation.code << " " << violation.path << " " << violation.message
        << "\n";
}

// Parses and gates BPMN input. Best-effort imports shrug off presentation
// defects; strict imports accept only flawless documents.
bool load_definitions(const Options& opt, const std::string& text,
                      bpmn::Definitions& defs) {
  defs = bpmn::parse_definitions(text);
  Violations violations = bpmn::check_well_formed(defs);
  if (opt.import_mode == "best-effort")
    std::erase_if(violations, bpmn::tolerable_on_import);
  if (violations.empty()) return true;
  print_violations(violations, std::cerr);
  return false;
}

int run_convert(const Options& opt) {
  std::string text = read_file(opt.input);
  Format from = detect_format(opt, text);
  Format to = from == Format::Cacao ? Format::Bpmn : Format::Cacao;
  if (opt.to == "cacao") to = Format::Cacao;
  if (opt.to == "bpmn") to = Format::Bpmn;

  std::string converted;
  if (from == Format::Cacao) {
    Violations violations = cacao::validate_document(text);
    if (!violations.empty()) {
      print_violations(violations, std::cerr);
      return 1;
    }
    cacao::Playbook playbook = cacao::parse_playbook(text);
    if (to == Format::Bpmn) {
      bpmn::Definitions defs =
          mapping::map_to_bpmn(playbook, mapping_options(opt));
      layout::attach_diagram(defs);
      converted = bpmn::serialize_definitions(defs);
    } else {
      converted = cacao::serialize_playbook(playbook);
    }
  } else {
    bpmn::Definitions defs;
    if (!load_definitions(opt, text, defs)) return 1;
    if (to == Format::Cacao) {
      converted = cacao::serialize_playbook(
          mapping::map_to_cacao(defs, import_policy(opt)));
    } else {
      layout::attach_diagram(defs);
      converted = bpmn::serialize_definitions(defs);
    }
  }
  write_output(opt, converted);
  return 0;
}

int run_validate(const Options& opt) {
  std::string text = read_file(opt.input);
  Violations violations =
      detect_format(opt, text) == Format::Cacao
          ? cacao::validate_document(text)
          : bpmn::check_well_formed(bpmn::parse_definitions(text));
  if (!opt.quiet) print_violations(violations, std::cout);
  return violations.empty() ? 0 : 1;
}

int run_roundtrip(const Options& opt) {
  std::string text = read_file(opt.input);
  if (detect_format(opt, text) != Format::Cacao)
    throw std::runtime_error("roundtrip expects a CACAO playbook document");
  Violations violations = cacao::validate_document(text);
  if (!violations.empty()) {
    print_violations(violations, std::cerr);
    return 1;
  }
  cacao::Playbook playbook = cacao::parse_playbook(text);
  cacao::Playbook back = mapping::map_to_cacao(
      mapping::map_to_bpmn(playbook, mapping_options(opt)));
  std::vector<std::string> differences = cacao::diff(playbook, back);
  if (!opt.quiet) {
    if (differences.empty())
      std::cout << "roundtrip: ok\n";
    else
      for (const std::string& line : differences) std::cout << line << "\n";
  }
  return differences.empty() ? 0 : 1;
}

int run_inspect(const Options& opt) {
  std::string text = read_file(opt.input);
  cacao::Playbook playbook;
  if (detect_format(opt, text) == Format::Cacao) {
    playbook = cacao::parse_playbook(text);
  } else {
    bpmn::Definitions defs;
    if (!load_definitions(opt, text, defs)) return 1;
    playbook = mapping::map_to_cacao(defs, import_policy(opt));
  }
  std::cout << cacao::format_inspect_report(playbook);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Converts CACAO 2.0 security playbooks to and from BPMN 2.0 "
      "process models.",
      "cacao-bpmn"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Options opt;
  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("input", opt.input, "Input document")->required();
    cmd->add_option("--from", opt.from,
                    "Input format (default: sniffed from the first byte)")
        ->check(CLI::IsMember({"cacao", "bpmn"}));
    cmd->add_flag("--quiet", opt.quiet, "Report through the exit code only");
  };
  auto add_styles = [&](CLI::App* cmd) {
    cmd->add_option("--parallel-style", opt.parallel_style,
                    "BPMN encoding for parallel steps")
        ->check(CLI::IsMember({"gateway-pair", "sub-process"}));
    cmd->add_option("--conditional-style", opt.conditional_style,
                    "BPMN encoding for if-condition steps")
        ->check(CLI::IsMember({"gateway-pair", "sub-process"}));
  };
  auto add_import_mode = [&](CLI::App* cmd) {
    cmd->add_option("--import-mode", opt.import_mode,
                    "How faithful imported BPMN must be")
        ->check(CLI::IsMember({"strict", "best-effort"}));
  };

  CLI::App* convert = app.add_subcommand(
      "convert", "Convert a document to the other (or the same) format");
  add_input(convert);
  convert->add_option("--to", opt.to, "Output format (default: the other one)")
      ->check(CLI::IsMember({"cacao", "bpmn"}));
  convert->add_option("-o,--output", opt.output,
                      "Output path (default: standard output)");
  add_styles(convert);
  add_import_mode(convert);

  CLI::App* validate = app.add_subcommand(
      "validate", "Report conformance violations, one per line");
  add_input(validate);

  CLI::App* roundtrip = app.add_subcommand(
      "roundtrip", "Convert to BPMN and back, then diff against the input");
  add_input(roundtrip);
  add_styles(roundtrip);

  CLI::App* inspect =
      app.add_subcommand("inspect", "Count the mapped constructs");
  add_input(inspect);
  add_import_mode(inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }

  try {
    if (convert->parsed()) return run_convert(opt);
    if (validate->parsed()) return run_validate(opt);
    if (roundtrip->parsed()) return run_roundtrip(opt);
    if (inspect->parsed()) return run_inspect(opt);
  } catch (const mapping::MappingError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }
  return 0;
}
