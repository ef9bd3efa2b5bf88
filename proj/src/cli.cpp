#include "labelkit/cli.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "labelkit/backends.hpp"
#include "labelkit/config.hpp"
#include "labelkit/csv.hpp"
#include "labelkit/evaluation.hpp"
#include "labelkit/io.hpp"

namespace labelkit {

namespace {

nlohmann::json ledger_to_json(const RunLedger& ledger) {
  nlohmann::json exchanges = nlohmann::json::array();
  for (const auto& e : ledger.exchanges) {
    exchanges.push_back({{"batch_id", e.batch_id},
                         {"run", e.run},
                         {"attempt", e.attempt},
                         {"prompt_tokens", e.prompt_tokens},
                         {"completion_tokens", e.completion_tokens},
                         {"latency_ms", e.latency_ms},
                         {"outcome", std::string(exchange_outcome_name(e.outcome))},
                         {"reason", e.reason}});
  }
  return {{"exchanges", std::move(exchanges)},
          {"total_prompt_tokens", ledger.total_prompt_tokens},
          {"total_completion_tokens", ledger.total_completion_tokens},
          {"wall_time_s", ledger.wall_time_s}};
}

RunLedger ledger_from_json(const nlohmann::json& doc) {
  RunLedger ledger;
  // Totals recompute from the exchange list; wall time is carried verbatim.
  for (const auto& entry : doc.at("exchanges")) {
    LlmExchange e;
    e.batch_id = entry.at("batch_id").get<int>();
    e.run = entry.value("run", 1);
    e.attempt = entry.at("attempt").get<int>();
    e.prompt_tokens = entry.at("prompt_tokens").get<std::int64_t>();
    e.completion_tokens = entry.at("completion_tokens").get<std::int64_t>();
    e.latency_ms = entry.value("latency_ms", std::int64_t{0});
    e.reason = entry.value("reason", "");
    const std::string outcome = entry.value("outcome", "Accepted");
    e.outcome = outcome == "Accepted"       ? ExchangeOutcome::Accepted
                : outcome == "Rejected"     ? ExchangeOutcome::Rejected
                                            : ExchangeOutcome::TransportFailed;
    ledger.append(e);
  }
  ledger.wall_time_s = doc.value("wall_time_s", 0.0);
  return ledger;
}

LabelMap to_map(const std::vector<std::pair<std::string, Label>>& rows) {
  LabelMap map;
  for (const auto& [id, label] : rows) map[id] = label;
  return map;
}

struct LabelFlags {
  std::string config_path;
  std::string backend = "mock";
  std::vector<std::string> category_filter;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

int cmd_label(const LabelFlags& flags, std::ostream& out, std::ostream& err) {
  RunConfig config = load_run_config(flags.config_path);
  validate_run_config(config, flags.backend == "http");
  if (flags.seed) config.mock.mock.seed = *flags.seed;

  std::set<Category> wanted;
  for (const auto& name : flags.category_filter) {
    const auto category = parse_category(name);
    if (!category) throw ConfigError("unknown category filter '" + name + "'");
    wanted.insert(*category);
  }

  std::unique_ptr<ChatBackend> backend;
  if (flags.backend == "http") {
    backend = std::make_unique<HttpBackend>();
  } else if (flags.backend == "mock") {
    MockConfig mock = config.mock.mock;
    if (config.mock.policy_csv) {
      mock.policy = to_map(load_label_csv(*config.mock.policy_csv));
    }
    backend = std::make_unique<MockBackend>(std::move(mock));
  } else {
    throw ConfigError("unknown backend '" + flags.backend + "' (expected http or mock)");
  }

  const TokenEstimator estimator = heuristic_estimator(config.batching.safety_factor);
  RunLedger combined;
  std::vector<std::string> all_unlabeled;
  std::size_t total_items = 0;

  for (const auto& [category, cat] : config.categories) {
    if (!wanted.empty() && !wanted.contains(category)) continue;

    const Dataset dataset = load_dataset(cat.input_csv, config.schema, category);
    const PromptHeader header = load_header(cat.header_file, category);
    const std::int64_t header_tokens = estimator(render_preamble(header)).tokens;
    const BatchPlan plan = partition(dataset.items, header_tokens,
                                     config.batching.budget_tokens,
                                     config.batching.max_items, estimator);
    if (flags.verbose) {
      err << category_key(category) << ": " << dataset.items.size() << " items in "
          << plan.batches.size() << " batches\n";
    }

    LabelingResult result =
        label_dataset(*backend, dataset, header, plan, config.runs, config.backend);

    std::vector<std::pair<std::string, Label>> rows;
    rows.reserve(result.labels.size());
    for (const auto& item : dataset.items) {
      const auto it = result.labels.find(item.id);
      if (it != result.labels.end()) rows.emplace_back(item.id, it->second);
    }
    write_label_csv(rows, cat.output_csv);

    for (const auto& e : result.ledger.exchanges) combined.append(e);
    combined.wall_time_s += result.ledger.wall_time_s;
    all_unlabeled.insert(all_unlabeled.end(), result.unlabeled_ids.begin(),
                         result.unlabeled_ids.end());
    total_items += dataset.items.size();

    out << category_key(category) << ": labeled " << rows.size() << "/"
        << dataset.items.size() << " -> " << cat.output_csv.string() << "\n";
  }

  if (config.outputs.ledger_json) {
    write_text_file_atomic(*config.outputs.ledger_json, ledger_to_json(combined).dump(2) + "\n");
  }

  const Usd cost =
      compute_cost(combined, config.prices.input_per_1k, config.prices.output_per_1k);
  std::size_t retries = 0;
  for (const auto& e : combined.exchanges) {
    if (e.outcome != ExchangeOutcome::Accepted) retries++;
  }
  out << "tokens: " << combined.total_prompt_tokens << " in, "
      << combined.total_completion_tokens << " out; cost " << cost.display() << "; wall "
      << combined.wall_time_s << " s; retries " << retries << "\n";

  if (!all_unlabeled.empty()) {
    std::filesystem::path sidecar;
    if (config.outputs.unlabeled_sidecar) {
      sidecar = *config.outputs.unlabeled_sidecar;
    } else {
      sidecar = config.categories.begin()->second.output_csv;
      sidecar += ".unlabeled";
    }
    std::string body;
    for (const auto& id : all_unlabeled) body += id + "\n";
    write_text_file_atomic(sidecar, body);
    err << all_unlabeled.size() << " of " << total_items
        << " ids left unlabeled after retries; listed in " << sidecar.string() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

struct EvaluateFlags {
  std::vector<std::string> pred;
  std::vector<std::string> gold;
  std::vector<std::string> crowd;
  std::vector<std::string> names;
  std::optional<double> claimed_accuracy;
  std::string report_path;
  std::string matrix_csv_path;
  std::string crowd_matrix_csv_path;
  std::string ledger_path;
  double price_in = 0.01;
  double price_out = 0.03;
};

int cmd_evaluate(const EvaluateFlags& flags, std::ostream& out, std::ostream& err) {
  if (flags.pred.size() != flags.gold.size() || flags.pred.empty()) {
    throw ConfigError("--pred and --gold must be given the same number of times");
  }
  if (!flags.crowd.empty() && flags.crowd.size() != flags.pred.size()) {
    throw ConfigError("--crowd must be given once per --pred when used");
  }
  if (!flags.names.empty() && flags.names.size() != flags.pred.size()) {
    throw ConfigError("--name must be given once per --pred when used");
  }

  std::vector<LabeledSlice> slices;
  for (std::size_t i = 0; i < flags.pred.size(); ++i) {
    LabeledSlice slice;
    slice.name = !flags.names.empty()
                     ? flags.names[i]
                     : (flags.pred.size() == 1
                            ? "all"
                            : std::filesystem::path(flags.pred[i]).stem().string());
    slice.pred = to_map(load_label_csv(flags.pred[i]));
    slice.gold = to_map(load_label_csv(flags.gold[i]));
    if (!flags.crowd.empty()) slice.crowd = to_map(load_label_csv(flags.crowd[i]));
    slices.push_back(std::move(slice));
  }

  ReportOptions options;
  options.claimed_accuracy_pct = flags.claimed_accuracy;
  RunLedger ledger;
  if (!flags.ledger_path.empty()) {
    ledger = ledger_from_json(nlohmann::json::parse(read_text_file(flags.ledger_path)));
    options.ledger = &ledger;
    options.price_in_per_1k = flags.price_in;
    options.price_out_per_1k = flags.price_out;
  }

  const EvalReport report = build_report(slices, options);

  if (!flags.report_path.empty()) {
    write_text_file_atomic(flags.report_path, report_to_json(report).dump(2) + "\n");
  }
  if (!flags.matrix_csv_path.empty()) {
    if (report.categories.size() != 1) {
      throw ConfigError("--matrix-csv requires exactly one input section");
    }
    write_text_file_atomic(flags.matrix_csv_path,
                           matrix_csv(report.categories.front().pred_vs_gold.confusion));
  }
  if (!flags.crowd_matrix_csv_path.empty()) {
    if (report.categories.size() != 1 || !report.categories.front().crowd_vs_gold) {
      throw ConfigError("--crowd-matrix-csv requires one section with --crowd");
    }
    write_text_file_atomic(flags.crowd_matrix_csv_path,
                           matrix_csv(report.categories.front().crowd_vs_gold->confusion));
  }

  for (const auto& section : report.categories) {
    out << section.name << ": accuracy " << section.pred_vs_gold.accuracy_pct() << "% over "
        << section.n_items << " items";
    if (section.crowd_vs_gold) {
      out << " (crowd " << section.crowd_vs_gold->accuracy_pct() << "%)";
    }
    out << "\n";
  }
  out << "total accuracy: " << report.total_accuracy_pct() << "%";
  if (report.crowd_total_accuracy) {
    std::int64_t diag = 0;
    std::int64_t total = 0;
    for (const auto& section : report.categories) {
      if (section.crowd_vs_gold) {
        diag += section.crowd_vs_gold->confusion.diagonal();
        total += section.crowd_vs_gold->confusion.total();
      }
    }
    out << " (crowd " << percent_2dp(diag, total) << "%)";
  }
  out << "\n";

  if (report.claim && !report.claim->consistent) {
    err << "warning: claimed accuracy " << report.claim->claimed_accuracy_pct
        << "% differs from computed " << report.claim->computed_accuracy_pct << "%\n";
  }
  return kExitOk;
}

struct VoteFlags {
  std::vector<std::string> inputs;
  std::string out_path;
};

int cmd_vote(const VoteFlags& flags, std::ostream& out, std::ostream& err) {
  (void)err;
  std::vector<std::vector<std::pair<std::string, Label>>> files;
  files.reserve(flags.inputs.size());
  for (const auto& path : flags.inputs) files.push_back(load_label_csv(path));

  std::vector<LabelMap> maps;
  maps.reserve(files.size());
  for (const auto& rows : files) maps.push_back(to_map(rows));
  for (std::size_t i = 1; i < maps.size(); ++i) {
    std::vector<std::string> missing;
    std::vector<std::string> extra;
    for (const auto& [id, label] : maps[0]) {
      (void)label;
      if (!maps[i].contains(id)) missing.push_back(id);
    }
    for (const auto& [id, label] : maps[i]) {
      (void)label;
      if (!maps[0].contains(id)) extra.push_back(id);
    }
    if (!missing.empty() || !extra.empty()) {
      throw IdMismatchError(std::move(missing), std::move(extra));
    }
  }

  std::vector<std::pair<std::string, Label>> result;
  result.reserve(files[0].size());
  for (const auto& [id, first] : files[0]) {
    std::vector<Label> votes{first};
    for (std::size_t i = 1; i < maps.size(); ++i) votes.push_back(maps[i].at(id));
    result.emplace_back(id, majority_vote(votes));
  }
  write_label_csv(result, flags.out_path);
  out << "voted " << result.size() << " ids -> " << flags.out_path << "\n";
  return kExitOk;
}

struct EstimateFlags {
  std::string config_path;
};

int cmd_estimate(const EstimateFlags& flags, std::ostream& out, std::ostream& err) {
  (void)err;
  RunConfig config = load_run_config(flags.config_path);
  validate_run_config(config, /*http_backend=*/false);

  const TokenEstimator estimator = heuristic_estimator(config.batching.safety_factor);
  std::size_t total_batches = 0;
  std::int64_t prompt_tokens_per_run = 0;
  std::int64_t reply_bound_per_run = 0;

  for (const auto& [category, cat] : config.categories) {
    const Dataset dataset = load_dataset(cat.input_csv, config.schema, category);
    const PromptHeader header = load_header(cat.header_file, category);
    const std::int64_t header_tokens = estimator(render_preamble(header)).tokens;
    const BatchPlan plan = partition(dataset.items, header_tokens,
                                     config.batching.budget_tokens,
                                     config.batching.max_items, estimator);

    std::int64_t prompt_tokens = 0;
    for (const auto& batch : plan.batches) {
      prompt_tokens += header_tokens + batch.item_tokens;
    }
    const std::int64_t reply_bound =
        static_cast<std::int64_t>(dataset.items.size()) * kReplyTokensPerItem;

    out << category_key(category) << ": " << plan.batches.size() << " batches, "
        << dataset.items.size() << " items, " << prompt_tokens
        << " prompt tokens/run, " << reply_bound << " reply-token bound/run\n";

    total_batches += plan.batches.size();
    prompt_tokens_per_run += prompt_tokens;
    reply_bound_per_run += reply_bound;
  }

  const std::int64_t runs = config.runs;
  const std::int64_t prompt_total = prompt_tokens_per_run * runs;
  const std::int64_t reply_total = reply_bound_per_run * runs;
  const Usd low = compute_cost_tokens(prompt_total, 0, config.prices.input_per_1k,
                                      config.prices.output_per_1k);
  const Usd high = compute_cost_tokens(prompt_total, reply_total,
                                       config.prices.input_per_1k,
                                       config.prices.output_per_1k);
  out << "total: " << total_batches << " batches/run, " << runs << " run(s), "
      << prompt_total << " prompt tokens, " << reply_total << " reply-token bound\n";
  out << "projected cost: " << low.display() << " to " << high.display() << " at $"
      << config.prices.input_per_1k << "/1K in, $" << config.prices.output_per_1k
      << "/1K out\n";
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"batch zero-shot text labeling via a chat-completion endpoint"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "run config JSON (label, estimate)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "override the mock seed");
  bool verbose = false;
  app.add_flag("--verbose", verbose, "progress to stderr");

  LabelFlags label_flags;
  auto* label = app.add_subcommand("label", "run the labeling pipeline");
  label->fallthrough();
  label->add_option("--backend", label_flags.backend, "http or mock")
      ->check(CLI::IsMember({"http", "mock"}));
  label->add_option("--category", label_flags.category_filter,
                    "only process these categories");

  EvaluateFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "compare label files against a gold set");
  evaluate->fallthrough();
  evaluate->add_option("--pred", eval_flags.pred, "predicted labels CSV")->required();
  evaluate->add_option("--gold", eval_flags.gold, "gold labels CSV")->required();
  evaluate->add_option("--crowd", eval_flags.crowd, "crowd labels CSV (side-by-side section)");
  evaluate->add_option("--name", eval_flags.names, "section name per --pred");
  double claimed = 0.0;
  auto* claimed_opt = evaluate->add_option(
      "--claimed-accuracy", claimed, "externally claimed accuracy %, checked against computed");
  evaluate->add_option("--report", eval_flags.report_path, "write report JSON here");
  evaluate->add_option("--matrix-csv", eval_flags.matrix_csv_path, "write 3x3 matrix CSV");
  evaluate->add_option("--crowd-matrix-csv", eval_flags.crowd_matrix_csv_path,
                       "write crowd 3x3 matrix CSV");
  evaluate->add_option("--ledger", eval_flags.ledger_path, "ledger JSON from a label run");
  evaluate->add_option("--price-in", eval_flags.price_in, "dollars per 1K prompt tokens");
  evaluate->add_option("--price-out", eval_flags.price_out, "dollars per 1K reply tokens");

  VoteFlags vote_flags;
  auto* vote = app.add_subcommand("vote", "majority-vote label files");
  vote->fallthrough();
  vote->add_option("inputs", vote_flags.inputs, "label CSVs (odd count)")
      ->expected(3)
      ->required();
  vote->add_option("--out", vote_flags.out_path, "output label CSV")->required();

  EstimateFlags estimate_flags;
  auto* estimate = app.add_subcommand("estimate", "dry-run batch and cost projection");
  estimate->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("labelkit");
  for (const auto& arg : args) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*label) {
      if (config_path.empty()) throw ConfigError("label requires --config");
      label_flags.config_path = config_path;
      if (*seed_opt) label_flags.seed = seed_value;
      label_flags.verbose = verbose;
      return cmd_label(label_flags, out, err);
    }
    if (*evaluate) {
      if (*claimed_opt) eval_flags.claimed_accuracy = claimed;
      return cmd_evaluate(eval_flags, out, err);
    }
    if (*vote) return cmd_vote(vote_flags, out, err);
    if (*estimate) {
      if (config_path.empty()) throw ConfigError("estimate requires --config");
      estimate_flags.config_path = config_path;
      return cmd_estimate(estimate_flags, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  err << "no subcommand selected\n";
  return kExitConfig;
}

}  // namespace labelkit
