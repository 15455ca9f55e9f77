#include "mstool/cli.hpp"

#include "mstool/backfit.hpp"
#include "mstool/config.hpp"
#include "mstool/eeg_io.hpp"
#include "mstool/error.hpp"
#include "mstool/evalmetrics.hpp"
#include "mstool/features.hpp"
#include "mstool/microstate.hpp"
#include "mstool/parallel.hpp"
#include "mstool/pipeline_io.hpp"
#include "mstool/plot.hpp"
#include "mstool/preprocess.hpp"
#include "mstool/promptgen.hpp"
#include "mstool/synthquality.hpp"
#include "mstool/text.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <mutex>
#include <set>

#ifndef MSTOOL_VERSION
#define MSTOOL_VERSION "0.0.0"
#endif

namespace mstool {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Context {
  PipelineConfig config;
  fs::path out_dir;
  int jobs = 1;
  std::ostream& err;
  std::mutex err_mutex;

  void warn(const std::string& msg) {
    std::lock_guard lock(err_mutex);
    err << "warning: " << msg << '\n';
  }
};

// Deterministic record of how an output was produced. Deliberately holds no
// timestamps, job counts or output directories so reruns compare bytewise.
void write_provenance(const Context& ctx, const std::string& name, const std::string& command,
                      const std::vector<fs::path>& inputs, const std::vector<std::string>& outputs, const ojson& notes) {
  ojson j;
  j["tool"] = "mstool";
  j["version"] = MSTOOL_VERSION;
  j["command"] = command;
  auto& in = j["inputs"];
  in = ojson::array();
  for (const auto& p : inputs) in.push_back({{"path", p.generic_string()}, {"fnv1a64", file_checksum(p)}});
  j["outputs"] = outputs;
  j["config"] = to_json(ctx.config);
  j["notes"] = notes;
  write_text_file(ctx.out_dir / (name + ".provenance.json"), j.dump(2) + '\n');
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed, const char* command) {
  if (!seed) throw Error(std::string(command) + " needs an explicit --seed (or a seed in the config file)");
  return *seed;
}

void check_unique_stems(const std::vector<std::string>& inputs) {
  std::set<std::string> stems;
  for (const auto& p : inputs)
    if (!stems.insert(fs::path(p).stem().string()).second)
      throw Error("two inputs share the file stem '" + fs::path(p).stem().string() + "'");
}

// Runs one job per input; nested work gets the remaining parallelism only
// when there is a single input.
template <typename Fn>
void for_each_input(Context& ctx, const std::vector<std::string>& inputs, Fn&& fn) {
  check_unique_stems(inputs);
  const int inner = inputs.size() == 1 ? ctx.jobs : 1;
  parallel_for(inputs.size(), ctx.jobs, [&](std::size_t i) { fn(fs::path(inputs[i]), inner); });
}

fs::path sibling(const fs::path& dir, const fs::path& input, const std::string& suffix) {
  return dir / (input.stem().string() + suffix);
}

void cmd_preprocess(Context& ctx, const std::vector<std::string>& inputs, const std::string& format) {
  const auto& cfg = ctx.config.preprocess;
  const Reference ref = Reference::parse(cfg.reference);
  for_each_input(ctx, inputs, [&](const fs::path& in, int inner) {
    const auto in_format = format_from_extension(in);
    const auto out_format = format.empty() ? in_format : parse_format(format);
    const auto out = ctx.out_dir / (in.stem().string() + (out_format == RecordingFormat::csv ? ".csv" : ".eegr"));
    if (fs::exists(out) && fs::equivalent(out, in))
      throw Error("preprocess would overwrite its input " + in.string() + "; choose another --out-dir");
    const EegRecording rec = load_recording(in, in_format);
    const EegRecording filtered = bandpass(rereference(rec, ref), cfg.filter, inner);
    save_recording(filtered, out, out_format);
    write_provenance(ctx, in.stem().string() + ".preprocess", "preprocess", {in},
                     {out.filename().string(), sidecar_path(out).filename().string()},
                     {{"reference", ref.describe()},
                      {"filter", "Butterworth bandpass, prototype order " + std::to_string(cfg.filter.order) +
                                     ", bilinear transform with prewarped edges, applied forward-backward (zero phase)"},
                      {"edge_padding", "odd reflection of " + std::to_string(padding_length(cfg.filter.order)) +
                                           " samples, steady-state initial conditions"}});
  });
}

void cmd_segment(Context& ctx, const std::vector<std::string>& inputs) {
  const auto& cfg = ctx.config.segment;
  const auto seed = require_seed(cfg.seed, "segment");
  for_each_input(ctx, inputs, [&](const fs::path& in, int inner) {
    const EegRecording rec = load_recording(in);
    Eigen::MatrixXd samples;
    std::size_t n_peaks = 0;
    if (cfg.use_full_signal) {
      samples = rec.data;
    } else {
      const auto peaks = find_gfp_peaks(gfp(rec), cfg.min_peak_distance_ms);
      n_peaks = peaks.size();
      samples = gather_samples(rec, peaks);
    }
    ModKMeansOptions opts{cfg.k, cfg.n_init, cfg.max_iter, cfg.tol, seed, inner};
    const auto fit = mod_kmeans_fit(samples, opts);
    const auto model = order_maps(fit.model, rec);
    const auto out = sibling(ctx.out_dir, in, ".model.json");
    write_text_file(out, to_json(model).dump(2) + '\n');
    write_provenance(ctx, in.stem().string() + ".segment", "segment", {in}, {out.filename().string()},
                     {{"cluster_source", cfg.use_full_signal ? "full_signal" : "gfp_peaks"},
                      {"clustered_samples", samples.cols()},
                      {"gfp_peaks", n_peaks},
                      {"best_restart", fit.best_restart},
                      {"map_order", "descending per-state GEV on the recording; sign set so the largest-magnitude weight is positive"}});
  });
}

fs::path model_path_for(const fs::path& in, const std::string& explicit_model, const fs::path& model_dir) {
  return explicit_model.empty() ? sibling(model_dir, in, ".model.json") : fs::path(explicit_model);
}

void cmd_backfit(Context& ctx, const std::vector<std::string>& inputs, const std::string& model_file, const std::string& from) {
  if (!model_file.empty() && inputs.size() > 1) throw Error("--model applies to a single recording; use --from for batches");
  const fs::path model_dir = from.empty() ? ctx.out_dir : fs::path(from);
  const double min_ms = ctx.config.backfit.min_duration_ms;
  for_each_input(ctx, inputs, [&](const fs::path& in, int) {
    const EegRecording rec = load_recording(in);
    const auto model_path = model_path_for(in, model_file, model_dir);
    const MicrostateModel model = load_model(model_path);
    LabelSequence seq = backfit(rec, model);
    if (seq.constant_samples > 0)
      ctx.warn(in.string() + ": " + std::to_string(seq.constant_samples) + " samples with zero spatial variance labelled " +
               model.labels[0] + " with correlation 0");
    seq = smooth_labels(seq, min_ms);
    const GevReport report = gev(rec, model, seq);
    const auto labels_out = sibling(ctx.out_dir, in, ".labels.csv");
    const auto gev_out = sibling(ctx.out_dir, in, ".gev.json");
    write_text_file(labels_out, labels_csv(seq, model));
    write_text_file(gev_out, to_json(report, model).dump(2) + '\n');
    write_provenance(ctx, in.stem().string() + ".backfit", "backfit", {in, model_path},
                     {labels_out.filename().string(), gev_out.filename().string()},
                     {{"gev_scope", "per recording; no pooling across subjects or conditions"},
                      {"constant_samples", seq.constant_samples},
                      {"smoothing_min_duration_ms", min_ms}});
  });
}

void cmd_features(Context& ctx, const std::vector<std::string>& inputs, const std::string& from) {
  const fs::path dir = from.empty() ? ctx.out_dir : fs::path(from);
  for_each_input(ctx, inputs, [&](const fs::path& in, int) {
    const EegRecording rec = load_recording(in);
    const auto model_path = sibling(dir, in, ".model.json");
    const auto labels_path = sibling(dir, in, ".labels.csv");
    const MicrostateModel model = load_model(model_path);
    const LabelSequence seq = load_labels_csv(labels_path, model, rec.sampling_rate_hz);
    const FeatureTable table = extract_features(rec, model, seq);
    const auto csv_out = sibling(ctx.out_dir, in, ".features.csv");
    const auto json_out = sibling(ctx.out_dir, in, ".features.json");
    write_text_file(csv_out, features_csv(table));
    write_text_file(json_out, to_json(table).dump(2) + '\n');
    write_provenance(ctx, in.stem().string() + ".features", "features", {in, model_path, labels_path},
                     {csv_out.filename().string(), json_out.filename().string()},
                     {{"timecov", "emitted as a fraction and in seconds"},
                      {"mean_corr", "mean absolute spatial correlation"},
                      {"edge_runs", "runs touching the recording edges count as full runs"}});
  });
}

void cmd_prompts(Context& ctx, const std::vector<std::string>& inputs, const std::vector<std::string>& imports) {
  const auto& cfg = ctx.config.prompts;
  const auto seed = require_seed(cfg.seed, "prompts");
  std::vector<FeatureTable> tables(inputs.size());
  parallel_for(inputs.size(), ctx.jobs, [&](std::size_t i) {
    tables[i] = feature_table_from_json(nlohmann::json::parse(read_text_file(inputs[i])));
  });
  std::vector<std::size_t> order(tables.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = tables[a].subject;
    const auto& sb = tables[b].subject;
    return std::tie(sa.subject_id, sa.condition) < std::tie(sb.subject_id, sb.condition);
  });
  std::vector<PromptRecord> records;
  ojson durations = ojson::array();
  for (const auto i : order) {
    records.push_back(render_prompt(tables[i]));
    durations.push_back(tables[i].duration_s);
  }
  std::vector<fs::path> all_inputs(inputs.begin(), inputs.end());
  std::size_t imported = 0, off_template = 0;
  for (const auto& path : imports) {
    for (auto& r : read_jsonl(path)) {
      if (!has_template_structure(r)) ++off_template;
      records.push_back(std::move(r));
      ++imported;
    }
    all_inputs.emplace_back(path);
  }
  if (off_template > 0)
    ctx.warn(std::to_string(off_template) + " imported records do not follow the four-microstate query layout");
  const auto summary = write_dataset(records, cfg.train_fraction, seed, ctx.out_dir, cfg.stratify);
  write_provenance(ctx, "prompts", "prompts", all_inputs, {"train.jsonl", "test.jsonl", "summary.json"},
                   {{"period", "the description states each recording's actual duration"},
                    {"recording_durations_s", durations},
                    {"imported_records", imported},
                    {"n_train", summary.n_train},
                    {"n_test", summary.n_test}});
}

void cmd_synth_gen(Context& ctx, const std::string& input, const std::string& output) {
  const auto& cfg = ctx.config.synth;
  const auto seed = require_seed(cfg.seed, "synth-gen");
  const Table orig = read_table_csv(input);
  std::string warning;
  const Table synth = baseline_synthesize(orig, cfg.n, seed, &warning);
  if (!warning.empty()) ctx.warn(warning);
  const fs::path out = output.empty() ? sibling(ctx.out_dir, input, ".synth.csv") : ctx.out_dir / output;
  write_text_file(out, table_csv(synth));
  write_provenance(ctx, out.stem().string() + ".synth-gen", "synth-gen", {input}, {out.filename().string()},
                   {{"synthesizer", "Gaussian copula over empirical marginals"}, {"rows", cfg.n}});
}

void cmd_synth_score(Context& ctx, const std::string& orig_path, const std::string& synth_path, const std::string& output) {
  const Table orig = read_table_csv(orig_path);
  const Table synth = read_table_csv(synth_path);
  const QualityReport report = score_quality(orig, synth, ctx.config.synth.quality);
  if (report.correlation_pairs_skipped > 0)
    ctx.warn(std::to_string(report.correlation_pairs_skipped) + " field pairs skipped (constant column)");
  const fs::path out = ctx.out_dir / (output.empty() ? "quality.json" : output);
  write_text_file(out, to_json(report).dump(2) + '\n');
  write_provenance(ctx, out.stem().string() + ".synth-score", "synth-score", {orig_path, synth_path},
                   {out.filename().string()},
                   {{"distribution", "100 * (1 - mean JS distance), base-2 logarithms"},
                    {"correlation", "100 * (1 - mean |corr_orig - corr_synth| / 2)"},
                    {"structure", "100 * (1 - mean JS distance of principal-component scores)"}});
}

std::vector<Condition> aligned_predictions(const std::vector<PromptRecord>& truth, const fs::path& path) {
  const auto preds = read_predictions(path);
  if (preds.size() != truth.size())
    throw Error(path.string() + ": " + std::to_string(preds.size()) + " predictions for " + std::to_string(truth.size()) +
                " test records");
  std::vector<Condition> out;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].subject_id != truth[i].user)
      throw Error(path.string() + ": prediction " + std::to_string(i + 1) + " is for '" + preds[i].subject_id +
                  "' but the test record is '" + truth[i].user + "'");
    out.push_back(preds[i].label);
  }
  return out;
}

void cmd_eval(Context& ctx, const std::string& truth_path, const std::string& pred_path, const std::string& before_path,
              const std::string& output) {
  const auto positive = parse_condition(ctx.config.eval.positive_class);
  const auto truth_records = read_jsonl(truth_path);
  std::vector<Condition> truth;
  for (const auto& r : truth_records) truth.push_back(condition_of_answer(r.answer));
  const auto counts = confusion(aligned_predictions(truth_records, pred_path), truth, positive);
  const auto report = metrics(counts);
  ojson j;
  j["positive_class"] = to_string(positive);
  j["confusion"] = to_json(counts);
  j["metrics"] = to_json(report);
  std::vector<fs::path> inputs{truth_path, pred_path};
  if (!before_path.empty()) {
    const auto before_counts = confusion(aligned_predictions(truth_records, before_path), truth, positive);
    const auto before = metrics(before_counts);
    j["before"] = {{"confusion", to_json(before_counts)}, {"metrics", to_json(before)}};
    j["comparison"] = to_json(compare_reports(before, report));
    inputs.emplace_back(before_path);
  }
  const fs::path out = ctx.out_dir / (output.empty() ? "metrics.json" : output);
  write_text_file(out, j.dump(2) + '\n');
  write_provenance(ctx, out.stem().string() + ".eval", "eval", inputs, {out.filename().string()},
                   {{"undefined_metrics", "zero denominators are reported as null"}});
}

void cmd_plot(Context& ctx, const std::string& kind, const std::vector<std::string>& inputs, const std::string& from) {
  if (kind != "gfp" && kind != "segmentation") throw Error("plot kind must be gfp or segmentation");
  const auto& cfg = ctx.config.plot;
  const fs::path dir = from.empty() ? ctx.out_dir : fs::path(from);
  for_each_input(ctx, inputs, [&](const fs::path& in, int) {
    const EegRecording rec = load_recording(in);
    const GfpSeries series = gfp(rec);
    const PlotWindow window{cfg.start_s, cfg.duration_s};
    std::string svg;
    std::vector<fs::path> used{in};
    if (kind == "gfp") {
      svg = gfp_svg(series, find_gfp_peaks(series, cfg.min_peak_distance_ms), window);
    } else {
      const auto model_path = sibling(dir, in, ".model.json");
      const auto labels_path = sibling(dir, in, ".labels.csv");
      const auto model = load_model(model_path);
      svg = segmentation_svg(series, load_labels_csv(labels_path, model, rec.sampling_rate_hz), model.labels, window);
      used.push_back(model_path);
      used.push_back(labels_path);
    }
    const auto out = sibling(ctx.out_dir, in, "." + kind + ".svg");
    write_text_file(out, svg);
    write_provenance(ctx, in.stem().string() + "." + kind + "-plot", "plot", used, {out.filename().string()},
                     {{"kind", kind}});
  });
}

template <typename T>
void override_if(const CLI::Option* opt, T& dst, const T& value) {
  if (opt->count() > 0) dst = value;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"EEG microstate segmentation, feature extraction and prompt dataset toolkit", "mstool"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", MSTOOL_VERSION);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--config", config_path, "JSON pipeline configuration")->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "Directory for outputs (created if missing)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every seeded stage without its own seed");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  PipelineConfig defaults;
  std::vector<std::string> inputs;

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Re-reference and bandpass-filter recordings");
  double low_hz = 0, high_hz = 0;
  int order = 0;
  std::string reference, format;
  pre->add_option("inputs", inputs, "Recordings (.csv or raw_f64)")->required();
  auto* low_opt = pre->add_option("--low-hz", low_hz, "Low cutoff (Hz)");
  auto* high_opt = pre->add_option("--high-hz", high_hz, "High cutoff (Hz)");
  auto* order_opt = pre->add_option("--order", order, "Butterworth prototype order");
  auto* ref_opt = pre->add_option("--reference", reference, "fz, avg, or a channel label");
  pre->add_option("--format", format, "Output format: csv or raw_f64 (default: same as input)");

  // segment
  auto* seg = app.add_subcommand("segment", "Fit microstate maps with modified K-means");
  std::size_t k = 0;
  int n_init = 0, max_iter = 0;
  double tol = 0, min_peak_ms = 0;
  std::uint64_t seg_seed = 0;
  bool full_signal = false;
  seg->add_option("inputs", inputs, "Recordings")->required();
  auto* k_opt = seg->add_option("--k", k, "Number of microstates");
  auto* ninit_opt = seg->add_option("--n-init", n_init, "Random restarts");
  auto* maxit_opt = seg->add_option("--max-iter", max_iter, "Iterations per restart");
  auto* tol_opt = seg->add_option("--tol", tol, "Relative explained-variance convergence threshold");
  auto* segseed_opt = seg->add_option("--seed", seg_seed, "Clustering seed");
  auto* peakdist_opt = seg->add_option("--min-peak-distance-ms", min_peak_ms, "Minimum spacing of GFP peaks");
  auto* full_opt = seg->add_flag("--use-full-signal", full_signal, "Cluster every sample instead of GFP peaks");

  // backfit
  auto* bf = app.add_subcommand("backfit", "Label every sample and compute GEV");
  double min_duration = 0;
  std::string model_file, from;
  bf->add_option("inputs", inputs, "Recordings")->required();
  bf->add_option("--model", model_file, "Model file (single recording)");
  bf->add_option("--from", from, "Directory holding <stem>.model.json (default: --out-dir)");
  auto* mindur_opt = bf->add_option("--min-duration-ms", min_duration, "Merge runs shorter than this (0 = off)");

  // features
  auto* feat = app.add_subcommand("features", "Extract per-state microstate features");
  feat->add_option("inputs", inputs, "Recordings")->required();
  feat->add_option("--from", from, "Directory holding model and labels files (default: --out-dir)");

  // prompts
  auto* pr = app.add_subcommand("prompts", "Render prompts and write the train/test JSONL split");
  double train_fraction = 0;
  std::uint64_t prompt_seed = 0;
  bool stratify = false;
  std::vector<std::string> imports;
  pr->add_option("inputs", inputs, "Feature tables (<stem>.features.json)");
  auto* frac_opt = pr->add_option("--train-fraction", train_fraction, "Fraction of records used for training");
  auto* prseed_opt = pr->add_option("--seed", prompt_seed, "Shuffle seed");
  auto* strat_opt = pr->add_flag("--stratify", stratify, "Split each class separately");
  pr->add_option("--import", imports, "Existing prompt JSONL file to include (repeatable)")->allow_extra_args(false);

  // synth-gen
  auto* sg = app.add_subcommand("synth-gen", "Baseline Gaussian-copula synthesizer");
  std::string table_in, output;
  std::size_t n_rows = 0;
  std::uint64_t synth_seed = 0;
  sg->add_option("input", table_in, "Original table CSV")->required();
  auto* n_opt = sg->add_option("--n", n_rows, "Rows to generate");
  auto* sgseed_opt = sg->add_option("--seed", synth_seed, "Sampling seed");
  sg->add_option("--output", output, "Output file name inside --out-dir");

  // synth-score
  auto* ss = app.add_subcommand("synth-score", "Score synthetic data against the original");
  std::string orig_in, synth_in, weights_text;
  int bins = 0;
  double var_threshold = 0;
  ss->add_option("original", orig_in, "Original table CSV")->required();
  ss->add_option("synthetic", synth_in, "Synthetic table CSV")->required();
  auto* bins_opt = ss->add_option("--bins", bins, "Histogram bins for numeric fields");
  auto* weights_opt = ss->add_option("--weights", weights_text, "Composite weights w1,w2,w3");
  auto* var_opt = ss->add_option("--variance-threshold", var_threshold, "Cumulative variance kept by the PCA");
  ss->add_option("--output", output, "Report file name inside --out-dir");

  // eval
  auto* ev = app.add_subcommand("eval", "Classification metrics from prediction files");
  std::string truth_in, pred_in, before_in, positive;
  ev->add_option("--truth", truth_in, "Test split JSONL")->required();
  ev->add_option("--predictions", pred_in, "subject_id,label per line")->required();
  ev->add_option("--before", before_in, "Predictions before fine-tuning, for comparison");
  auto* pos_opt = ev->add_option("--positive-class", positive, "Rest or Load");
  ev->add_option("--output", output, "Report file name inside --out-dir");

  // plot
  auto* pl = app.add_subcommand("plot", "SVG plots of GFP and segmentation");
  std::string kind;
  double start_s = 0, duration_s = 0, plot_peak_ms = 0;
  pl->add_option("kind", kind, "gfp or segmentation")->required()->check(CLI::IsMember({"gfp", "segmentation"}));
  pl->add_option("inputs", inputs, "Recordings")->required();
  pl->add_option("--from", from, "Directory holding model and labels files (default: --out-dir)");
  auto* start_opt = pl->add_option("--start-s", start_s, "Window start (s)");
  auto* dur_opt = pl->add_option("--duration-s", duration_s, "Window length (s)");
  auto* plpeak_opt = pl->add_option("--min-peak-distance-ms", plot_peak_ms, "Minimum spacing of plotted peaks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  Context ctx{defaults, out_dir, jobs, err, {}};
  try {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed_opt->count() > 0) {
      cfg.segment.seed = seed;
      cfg.prompts.seed = seed;
      cfg.synth.seed = seed;
    }
    override_if(low_opt, cfg.preprocess.filter.low_hz, low_hz);
    override_if(high_opt, cfg.preprocess.filter.high_hz, high_hz);
    override_if(order_opt, cfg.preprocess.filter.order, order);
    override_if(ref_opt, cfg.preprocess.reference, reference);
    override_if(k_opt, cfg.segment.k, k);
    override_if(ninit_opt, cfg.segment.n_init, n_init);
    override_if(maxit_opt, cfg.segment.max_iter, max_iter);
    override_if(tol_opt, cfg.segment.tol, tol);
    if (segseed_opt->count() > 0) cfg.segment.seed = seg_seed;
    override_if(peakdist_opt, cfg.segment.min_peak_distance_ms, min_peak_ms);
    override_if(full_opt, cfg.segment.use_full_signal, full_signal);
    override_if(mindur_opt, cfg.backfit.min_duration_ms, min_duration);
    override_if(frac_opt, cfg.prompts.train_fraction, train_fraction);
    if (prseed_opt->count() > 0) cfg.prompts.seed = prompt_seed;
    override_if(strat_opt, cfg.prompts.stratify, stratify);
    override_if(n_opt, cfg.synth.n, n_rows);
    if (sgseed_opt->count() > 0) cfg.synth.seed = synth_seed;
    override_if(bins_opt, cfg.synth.quality.bins, bins);
    override_if(var_opt, cfg.synth.quality.variance_threshold, var_threshold);
    if (weights_opt->count() > 0) {
      const auto parts = split(weights_text, ',');
      if (parts.size() != 3) throw Error("--weights needs three comma-separated values");
      for (std::size_t i = 0; i < 3; ++i)
        if (!parse_double(parts[i], cfg.synth.quality.weights[i])) throw Error("--weights: cannot parse '" + parts[i] + "'");
    }
    override_if(pos_opt, cfg.eval.positive_class, positive);
    override_if(start_opt, cfg.plot.start_s, start_s);
    override_if(dur_opt, cfg.plot.duration_s, duration_s);
    override_if(plpeak_opt, cfg.plot.min_peak_distance_ms, plot_peak_ms);
    cfg.validate();
    ctx.config = cfg;

    fs::create_directories(ctx.out_dir);
    if (pre->parsed())
      cmd_preprocess(ctx, inputs, format);
    else if (seg->parsed())
      cmd_segment(ctx, inputs);
    else if (bf->parsed())
      cmd_backfit(ctx, inputs, model_file, from);
    else if (feat->parsed())
      cmd_features(ctx, inputs, from);
    else if (pr->parsed())
      cmd_prompts(ctx, inputs, imports);
    else if (sg->parsed())
      cmd_synth_gen(ctx, table_in, output);
    else if (ss->parsed())
      cmd_synth_score(ctx, orig_in, synth_in, output);
    else if (ev->parsed())
      cmd_eval(ctx, truth_in, pred_in, before_in, output);
    else if (pl->parsed())
      cmd_plot(ctx, kind, inputs, from);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mstool
