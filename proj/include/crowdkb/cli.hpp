#pragma once

// Command-line driver for the batch pipeline:
//
//   ingest -> campaign create / simulate -> export -> moderate -> build-kg
//   -> query / mine / recommend / sentiment, plus serve for the HTTP API.
//
// Exit codes: 0 success, 1 domain error (printed as "error: <Code>: ..."),
// 2 usage error.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdkb/analytics.hpp"
#include "crowdkb/campaign.hpp"
#include "crowdkb/campaign_io.hpp"
#include "crowdkb/catalog.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/io.hpp"
#include "crowdkb/knowledge_graph.hpp"
#include "crowdkb/moderation.hpp"
#include "crowdkb/query.hpp"
#include "crowdkb/rdf.hpp"
#include "crowdkb/sentiment.hpp"
#include "crowdkb/service.hpp"
#include "crowdkb/simulation.hpp"
#include "crowdkb/vocabulary.hpp"

namespace crowdkb {

namespace cli_detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline Timestamp timestamp_arg(const std::string& s, const char* what) {
  auto ts = text::parse_timestamp(s);
  if (!ts) throw Error(ErrorCode::InvalidArgument, std::string("bad ") + what + " '" + s + "'");
  return *ts;
}

// Records of a dataset file; row errors are reported and skipped.
inline std::vector<TrackRecord> read_records(const std::filesystem::path& path,
                                             const Vocabularies& vocab, std::ostream& err) {
  LoadResult loaded = load_dataset(path, vocab);
  for (const RowError& e : loaded.errors) {
    err << path.string() << ": line " << e.line << ": " << code_name(e.code) << ": "
        << e.message << "\n";
  }
  return loaded.records;
}

inline const TrackRecord& find_record(const std::vector<TrackRecord>& records,
                                      const std::string& id) {
  for (const TrackRecord& r : records) {
    if (r.europeana_id == id) return r;
  }
  throw Error(ErrorCode::UnknownItem, id);
}

inline std::filesystem::path event_log(const std::filesystem::path& data_dir) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir, ec);
  if (ec) throw Error(ErrorCode::WriteFailure, data_dir.string() + ": " + ec.message());
  return data_dir / kEventLogFile;
}

struct CampaignArgs {
  std::string id = "campaign";
  std::string title;
  std::string instructions;
  std::string start = "2023-03-01";
  std::string end = "2023-06-30";
  std::size_t batches = 8;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--id", id, "Campaign id")->capture_default_str();
    cmd->add_option("--title", title, "Campaign title");
    cmd->add_option("--instructions", instructions, "Instructions shown to annotators");
    cmd->add_option("--start", start, "Start (YYYY-MM-DD or ISO timestamp)")
        ->capture_default_str();
    cmd->add_option("--end", end, "End (YYYY-MM-DD or ISO timestamp)")->capture_default_str();
    cmd->add_option("--batches", batches, "Number of batches")->capture_default_str();
  }

  Campaign make(const std::vector<TrackRecord>& records) const {
    Campaign c;
    c.id = id;
    c.title = title.empty() ? id : title;
    c.instructions = instructions;
    c.batch_count = batches;
    c.start = timestamp_arg(start, "start");
    c.end = timestamp_arg(end, "end");
    // A bare end date covers that whole day.
    if (end.size() == 10) c.end += std::chrono::seconds(86399);
    for (const TrackRecord& r : records) c.item_ids.push_back(r.europeana_id);
    return c;
  }
};

inline void print_batches(std::ostream& out, const CampaignStore& store, const Campaign& c) {
  out << "campaign " << c.id << ": " << c.item_ids.size() << " items in " << c.batch_count
      << " batches (";
  for (std::size_t b = 1; b <= c.batch_count; ++b) {
    out << (b > 1 ? " " : "") << store.batch(c.id, b).size();
  }
  out << ")\n";
}

inline void wait_for_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
}

}  // namespace cli_detail

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Crowd-enriched music knowledge base", "crowdkb"};
  app.require_subcommand(1);
  std::optional<std::string> vocab_file;
  app.add_option("--vocab", vocab_file, "Vocabulary override file (category,id,label,uri)");

  // ingest
  std::string ingest_input, ingest_output;
  std::optional<std::string> ingest_rejected;
  std::int64_t max_duration_ms = CurationPolicy{}.max_duration_ms;
  auto* ingest = app.add_subcommand("ingest", "Load and curate a metadata CSV");
  ingest->add_option("--input", ingest_input, "Raw metadata CSV")->required();
  ingest->add_option("--output", ingest_output, "Curated dataset CSV")->required();
  ingest->add_option("--rejected", ingest_rejected, "Write rejected ids and reasons here");
  ingest->add_option("--max-duration-ms", max_duration_ms, "Longest accepted track")
      ->capture_default_str();

  // campaign
  auto* campaign = app.add_subcommand("campaign", "Create or simulate a campaign");
  campaign->require_subcommand(1);

  std::string create_dataset, create_data_dir = "data";
  CampaignArgs create_args;
  auto* create = campaign->add_subcommand("create", "Register a campaign in the data dir");
  create->add_option("--dataset", create_dataset, "Curated dataset CSV")->required();
  create->add_option("--data-dir", create_data_dir, "Service data directory")
      ->envname("DATA_DIR")
      ->capture_default_str();
  create_args.add_to(create);

  std::string sim_dataset, sim_out;
  std::optional<std::string> sim_data_dir;
  std::size_t sim_annotators = 0;
  std::uint64_t sim_seed = 1;
  CampaignArgs sim_args;
  sim_args.id = "simulated";
  AnnotatorBehavior behavior;
  auto* simulate = campaign->add_subcommand("simulate", "Run synthetic annotators");
  simulate->add_option("--dataset", sim_dataset, "Curated dataset CSV")->required();
  simulate->add_option("--annotators", sim_annotators, "Number of annotators")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", sim_out, "Directory for the raw export")->required();
  simulate->add_option("--data-dir", sim_data_dir, "Also persist into this data directory");
  simulate->add_option("--accuracy", behavior.accuracy, "Chance a perceived tag is true")
      ->capture_default_str();
  simulate->add_option("--recall", behavior.recall, "Chance a true tag is noticed")
      ->capture_default_str();
  simulate->add_option("--vote-agreement", behavior.vote_agreement,
                       "Chance a vote reflects the truth")
      ->capture_default_str();
  simulate->add_option("--vote-probability", behavior.vote_probability,
                       "Chance of voting on another tag")
      ->capture_default_str();
  simulate->add_option("--comment-probability", behavior.comment_probability,
                       "Chance of commenting per visit")
      ->capture_default_str();
  simulate->add_option("--items-per-annotator", behavior.items_per_annotator,
                       "Items each annotator visits")
      ->capture_default_str();
  sim_args.add_to(simulate);

  // export
  std::string export_data_dir = "data", export_campaign, export_out;
  auto* exp = app.add_subcommand("export", "Write a campaign's raw contributions");
  exp->add_option("--data-dir", export_data_dir, "Service data directory")
      ->envname("DATA_DIR")
      ->capture_default_str();
  exp->add_option("--campaign", export_campaign, "Campaign id")->required();
  exp->add_option("--out", export_out, "Output directory")->required();

  // moderate
  std::string mod_export, mod_dataset, mod_output;
  std::optional<std::string> mod_report;
  ModerationPolicy policy;
  auto* moderate = app.add_subcommand("moderate", "Filter crowd tags into enriched records");
  moderate->add_option("--export", mod_export, "Raw export directory")->required();
  moderate->add_option("--dataset", mod_dataset, "Curated dataset CSV")->required();
  moderate->add_option("--output", mod_output, "Enriched dataset CSV")->required();
  moderate->add_option("--report", mod_report, "Write the kept/dropped report here");
  moderate->add_option("--top-k", policy.top_k_emotion_genre, "Emotion/genre tags kept per item")
      ->capture_default_str();
  moderate->add_option("--min-score", policy.min_diff_emotion_genre,
                       "Least emotion/genre vote difference")
      ->capture_default_str();
  moderate->add_option("--instrument-above", policy.min_diff_instruments_exclusive,
                       "Instrument vote difference must exceed this")
      ->capture_default_str();

  // build-kg
  std::string kg_dataset, kg_output;
  std::optional<std::string> kg_facts;
  bool kg_no_axioms = false;
  auto* build = app.add_subcommand("build-kg", "Compile enriched records into a graph");
  build->add_option("--dataset", kg_dataset, "Enriched dataset CSV")->required();
  build->add_option("--output", kg_output, "Graph file")->required();
  build->add_option("--facts", kg_facts, "External facts (entity_iri,predicate_iri,object)");
  build->add_flag("--no-axioms", kg_no_axioms, "Skip derived classes");

  // query
  std::string q_graph;
  std::optional<std::string> q_file, q_text;
  auto* query = app.add_subcommand("query", "Run a graph-pattern query");
  query->add_option("--graph", q_graph, "Graph file")->required();
  auto* q_file_opt = query->add_option("-f,--file", q_file, "Query file");
  auto* q_text_opt = query->add_option("-e,--expr", q_text, "Query text");
  q_file_opt->excludes(q_text_opt);

  // mine
  std::string mine_dataset;
  double min_support = 0.13;
  auto* mine = app.add_subcommand("mine", "Frequent tag pairs");
  mine->add_option("--dataset", mine_dataset, "Enriched dataset CSV")->required();
  mine->add_option("--min-support", min_support, "Support threshold in (0, 1]")
      ->capture_default_str();

  // recommend
  std::string rec_dataset, rec_seed;
  std::size_t rec_k = 5;
  std::vector<double> rec_weights;
  auto* rec = app.add_subcommand("recommend", "Tracks most similar to a seed track");
  rec->add_option("--dataset", rec_dataset, "Enriched dataset CSV")->required();
  rec->add_option("--seed", rec_seed, "Europeana id of the seed track")->required();
  rec->add_option("-k", rec_k, "Number of results")->capture_default_str();
  rec->add_option("--weights", rec_weights, "Genre,emotion,instrument weights")
      ->expected(3)
      ->delimiter(',');

  // sentiment
  std::string sent_dataset;
  std::optional<std::string> sent_lexicon;
  auto* sentiment = app.add_subcommand("sentiment", "Mean comment sentiment per track");
  sentiment->add_option("--dataset", sent_dataset, "Enriched dataset CSV")->required();
  sentiment->add_option("--lexicon", sent_lexicon, "Lexicon file (token,valence)");

  // serve
  ServiceConfig serve_config;
  std::string serve_data_dir = "data";
  auto* srv = app.add_subcommand("serve", "Run the HTTP API");
  srv->add_option("--data-dir", serve_data_dir, "Data directory")
      ->envname("DATA_DIR")
      ->capture_default_str();
  srv->add_option("--port", serve_config.port, "Port (0 picks one)")
      ->envname("PORT")
      ->capture_default_str();
  srv->add_option("--host", serve_config.host, "Bind address")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*query && !q_file && !q_text) throw CLI::RequiredError("-f,--file or -e,--expr");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    Vocabularies vocab = load_vocabularies(
        vocab_file ? std::optional<std::filesystem::path>(*vocab_file) : std::nullopt);

    if (*ingest) {
      CurationPolicy cp;
      cp.max_duration_ms = max_duration_ms;
      auto records = read_records(ingest_input, vocab, err);
      CurationResult cur = apply_curation(records, cp);
      export_enriched(cur.kept, ingest_output, vocab);
      if (ingest_rejected) {
        std::ostringstream rej;
        csv::write_row(rej, {"europeana_id", "reasons"});
        for (const Rejection& r : cur.rejected) {
          std::string reasons;
          for (const RejectReason& why : r.reasons) {
            reasons += (reasons.empty() ? "" : ";") + why.to_string();
          }
          csv::write_row(rej, {r.record.europeana_id, reasons});
        }
        io::write_file(*ingest_rejected, rej.str());
      }
      out << "read " << records.size() << " records: " << cur.kept.size() << " kept, "
          << cur.rejected.size() << " rejected\n";
    } else if (*create) {
      auto records = read_records(create_dataset, vocab, err);
      PersistentStore ps(event_log(create_data_dir), vocab);
      Campaign c = create_args.make(records);
      ps.store().add_campaign(c, records);
      ps.flush();
      print_batches(out, ps.store(), c);
    } else if (*simulate) {
      auto records = read_records(sim_dataset, vocab, err);
      Campaign c = sim_args.make(records);
      std::unique_ptr<PersistentStore> ps;
      std::unique_ptr<CampaignStore> mem;
      CampaignStore* store = nullptr;
      if (sim_data_dir) {
        ps = std::make_unique<PersistentStore>(event_log(*sim_data_dir), vocab);
        store = &ps->store();
      } else {
        mem = std::make_unique<CampaignStore>(vocab);
        store = mem.get();
      }
      store->add_campaign(c, records);
      SimulationReport rep = simulate_annotators(*store, c.id, sim_annotators, sim_seed, behavior);
      write_export(store->export_annotations(c.id), sim_out);
      if (ps) ps->flush();
      out << rep.users.size() << " annotators: " << rep.annotations << " annotations, "
          << rep.votes << " votes, " << rep.comments << " comments\n";
    } else if (*exp) {
      PersistentStore ps(event_log(export_data_dir), vocab);
      CampaignExport e = ps.store().export_annotations(export_campaign);
      write_export(e, export_out);
      out << e.rows.size() << " annotations, " << e.comments.size() << " comments\n";
    } else if (*moderate) {
      CampaignExport e = read_export(mod_export);
      auto records = read_records(mod_dataset, vocab, err);
      ModerationResult result = moderate_campaign(e, policy, records);
      export_enriched(result.records, mod_output, vocab);
      std::string report = format_report(result.report);
      if (mod_report) {
        io::write_file(*mod_report, report);
      } else {
        out << report;
      }
    } else if (*build) {
      auto records = read_records(kg_dataset, vocab, err);
      rdf::Graph g = kg::build_graph(records, vocab);
      std::size_t base = g.size();
      std::size_t facts = 0;
      if (kg_facts) {
        auto resolver = kg::FixtureResolver::from_file(*kg_facts);
        std::set<rdf::Iri> entities = kg::members_of(g, kg::onto(kg::term::kComposer));
        auto songs = kg::members_of(g, kg::onto(kg::term::kSong));
        entities.insert(songs.begin(), songs.end());
        auto result = kg::integrate_external(
            std::move(g), resolver, std::vector<rdf::Iri>(entities.begin(), entities.end()));
        g = std::move(result.graph);
        facts = result.facts_added;
      }
      std::size_t before_axioms = g.size();
      if (!kg_no_axioms) g = kg::materialize_axioms(std::move(g), kg::default_axioms(vocab));
      rdf::serialize_graph(g, kg_output);
      out << g.size() << " triples (" << base << " from records, " << facts
          << " external facts, " << g.size() - before_axioms << " derived)\n";
    } else if (*query) {
      rdf::Graph g = rdf::parse_graph(q_graph);
      std::string text = q_file ? io::read_file(*q_file) : *q_text;
      out << query::format_table(query::run_query(text, g));
    } else if (*mine) {
      auto records = read_records(mine_dataset, vocab, err);
      out << format_support_report(frequent_pairs(transactions_from(records), min_support),
                                   vocab);
    } else if (*rec) {
      auto records = read_records(rec_dataset, vocab, err);
      SimilarityWeights w;
      if (!rec_weights.empty()) w = {rec_weights[0], rec_weights[1], rec_weights[2]};
      const TrackRecord& seed = find_record(records, rec_seed);
      csv::write_row(out, {"rank", "europeana_id", "title", "score"});
      std::size_t rank = 0;
      for (const Recommendation& r : recommend(seed, records, rec_k, w)) {
        csv::write_row(out, {std::to_string(++rank), r.record.europeana_id,
                             r.record.title.value_or(""), fixed(r.score, 4)});
      }
    } else if (*sentiment) {
      auto records = read_records(sent_dataset, vocab, err);
      SentimentLexicon lex = sent_lexicon ? load_lexicon(*sent_lexicon) : builtin_lexicon();
      csv::write_row(out, {"europeana_id", "comments", "sentiment"});
      for (const TrackRecord& r : records) {
        csv::write_row(out, {r.europeana_id, std::to_string(r.comments.size()),
                             fixed(track_sentiment(r, lex), 4)});
      }
    } else if (*srv) {
      serve_config.data_dir = serve_data_dir;
      if (vocab_file) serve_config.vocabulary_file = *vocab_file;
      // Block the signals before any server thread exists so only sigwait sees them.
      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);
      auto service = serve(serve_config);
      err << "listening on " << serve_config.host << ":" << service->port() << "\n";
      wait_for_signal();
      service->stop();
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace crowdkb
