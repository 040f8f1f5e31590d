#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "uberledger/meta_ledger.hpp"
#include "uberledger/ntriples.hpp"
#include "uberledger/reputation.hpp"
#include "uberledger/scenario_config.hpp"
#include "uberledger/simulator.hpp"
#include "uberledger/snapshot.hpp"

namespace uberledger::cli {

namespace fs = std::filesystem;

namespace {

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot write " + p.string());
  f << content;
  if (!f) throw IoFailure("write failed for " + p.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

int do_run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
           std::ostream& out) {
  ScenarioConfig cfg = load_scenario(config_path);
  if (seed) cfg.seed = *seed;
  RunResult result = run_scenario(cfg);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create output directory " + out_dir + ": " + ec.message());

  std::ostringstream metrics;
  write_metrics_csv(metrics, result.metrics);
  write_file(fs::path(out_dir) / "metrics.csv", metrics.str());
  write_file(fs::path(out_dir) / "meta.nt", rdf::serialize_ntriples(meta_triples(result.world.meta)));
  save_snapshot(result.world, fs::path(out_dir) / kSnapshotFile);

  bool conserved = true;
  for (const auto& [_, ok] : result.metrics.conserved) conserved = conserved && ok;
  out << "released=" << result.metrics.released << " forfeited=" << result.metrics.forfeited
      << " conservation=" << (conserved ? "ok" : "VIOLATED") << '\n';
  return conserved ? kOk : kVerificationFailure;
}

int do_verify(const std::string& snapshot, std::ostream& out, std::ostream& err) {
  const World w = load_snapshot(snapshot);
  for (const auto& [id, l] : w.ledgers) {
    if (auto v = verify_chain(l)) {
      err << "ledger " << id << ": violation at height " << v->height << ": " << v->reason << '\n';
      return kVerificationFailure;
    }
  }
  if (auto v = verify_meta_chain(w.meta)) {
    err << "meta-ledger: violation at height " << v->height << ": " << v->reason << '\n';
    return kVerificationFailure;
  }
  out << "ok: " << w.ledgers.size() << " ledgers, meta-chain height " << w.meta.tip().height << '\n';
  return kOk;
}

int do_history(const std::string& snapshot, const std::string& facilitator, std::ostream& out) {
  const World w = load_snapshot(snapshot);
  for (const auto& h : facilitator_history(w.meta, facilitator)) {
    out << h.transfer_id << ',' << to_string(h.attested) << ',' << to_string(h.outcome) << ',' << h.tick << '\n';
  }
  return kOk;
}

void print_triples_csv(const std::vector<rdf::Triple>& triples, std::ostream& out) {
  // Same canonical order as the N-Triples export.
  const auto canonical = rdf::parse_ntriples(rdf::serialize_ntriples(triples));
  out << "subject,predicate,object,datatype\n";
  for (const auto& t : canonical) {
    out << csv_field(t.subject.value) << ',' << csv_field(t.predicate.value) << ',';
    if (const auto* iri = std::get_if<rdf::Iri>(&t.object)) {
      out << csv_field(iri->value) << ",\n";
    } else {
      const auto& lit = std::get<rdf::Literal>(t.object);
      out << csv_field(lit.lexical) << ',' << csv_field(lit.datatype) << '\n';
    }
  }
}

int do_export_graph(const std::string& snapshot, const std::string& format, std::ostream& out) {
  const World w = load_snapshot(snapshot);
  const auto triples = meta_triples(w.meta);
  if (format == "csv") {
    print_triples_csv(triples, out);
  } else {
    out << rdf::serialize_ntriples(triples);
  }
  return kOk;
}

int do_export_trust(const std::string& snapshot, const std::string& format, std::ostream& out) {
  const World w = load_snapshot(snapshot);
  if (format == "csv") {
    out << "facilitator,trust_ppb\n";
    for (std::size_t i = 0; i < w.trust.ids.size(); ++i) {
      out << w.trust.ids[i] << ',' << scaled_trust(w.trust.t(static_cast<Eigen::Index>(i))) << '\n';
    }
  } else {
    out << rdf::serialize_ntriples(trust_triples(w.trust));
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-ledger transfer simulator with a reputation-tracking meta-chain", "uberledger"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir, snapshot, facilitator, format = "ntriples";
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write metrics.csv, meta.nt, world.json");
  run_cmd->add_option("--config", config_path, "Scenario config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", seed, "Override the config seed");

  auto* verify_cmd = app.add_subcommand("verify", "Verify every ledger and the meta-chain in a snapshot");
  verify_cmd->add_option("snapshot", snapshot, "Run output directory or world.json")->required();

  auto* history_cmd = app.add_subcommand("history", "Print a facilitator's verdict history as CSV");
  history_cmd->add_option("snapshot", snapshot, "Run output directory or world.json")->required();
  history_cmd->add_option("facilitator", facilitator, "Facilitator name")->required();

  auto* graph_cmd = app.add_subcommand("export-graph", "Print the meta-chain as an RDF graph");
  graph_cmd->add_option("snapshot", snapshot, "Run output directory or world.json")->required();
  graph_cmd->add_option("--format", format, "csv or ntriples")->check(CLI::IsMember({"csv", "ntriples"}));

  auto* trust_cmd = app.add_subcommand("export-trust", "Print the final trust snapshot");
  trust_cmd->add_option("snapshot", snapshot, "Run output directory or world.json")->required();
  trust_cmd->add_option("--format", format, "csv or ntriples")->check(CLI::IsMember({"csv", "ntriples"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    if (*run_cmd) return do_run(config_path, out_dir, seed, out);
    if (*verify_cmd) return do_verify(snapshot, out, err);
    if (*history_cmd) return do_history(snapshot, facilitator, out);
    if (*graph_cmd) return do_export_graph(snapshot, format, out);
    if (*trust_cmd) return do_export_trust(snapshot, format, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ConfigError::Kind::io ? kIoError : kValidationError;
  } catch (const SnapshotError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const IoFailure& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
  return kValidationError;
}

}  // namespace uberledger::cli
