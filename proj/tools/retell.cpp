// Command-line front end: materials, pipeline, feedback, eval and serve.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "retell/backends/registry.hpp"
#include "retell/eval/compare.hpp"
#include "retell/feedback/calibration.hpp"
#include "retell/feedback/scoring.hpp"
#include "retell/image/workflow.hpp"
#include "retell/materials/generate.hpp"
#include "retell/service/config.hpp"
#include "retell/service/http.hpp"
#include "retell/text/preprocess.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace retell;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_argument, p.string() + ": " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + p.string());
  out << s;
}

// "-" or empty means stdout.
void emit(const std::string& out, const json& j) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text(out, j.dump(2) + "\n");
  }
}

backends::Backends backends_from(const std::string& config_path) {
  if (config_path.empty()) return backends::make_backends(backends::apply_env_overrides({}));
  return backends::make_backends(service::load_config(config_path).adapters);
}

std::vector<materials::Story> load_corpus(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<materials::Story> out;
  for (const auto& f : files) out.push_back(read_json(f).get<materials::Story>());
  return out;
}

std::vector<text::Variant> parse_variants(const std::string& s) {
  std::vector<text::Variant> out;
  for (const auto& v : text::split(s, ',')) out.push_back(text::variant_from_string(v));
  return out;
}

httplib::Server* running_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vocabulary retelling practice: stories, images, feedback and evaluation"};
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config, "Service/backends JSON config");

  // materials
  auto* materials_cmd = app.add_subcommand("materials", "Create and validate stories");
  materials_cmd->require_subcommand(1);
  std::string words, out;
  int max_words = 60;
  auto* gen = materials_cmd->add_subcommand("generate", "Generate a story containing the target words");
  gen->add_option("--words", words, "Comma-separated target words")->required();
  gen->add_option("--max-words", max_words, "Word cap")->check(CLI::PositiveNumber);
  gen->add_option("--out", out, "Output story JSON (default stdout)");
  std::string story_path;
  auto* val = materials_cmd->add_subcommand("validate", "Report missing words and length");
  val->add_option("story", story_path, "Story JSON")->required()->check(CLI::ExistingFile);

  // pipeline
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Image generation workflow");
  pipeline_cmd->require_subcommand(1);
  std::string variant = "sentence";
  std::int64_t seed = 0;
  auto* pre = pipeline_cmd->add_subcommand("preprocess", "Sentences, coreference and prompts");
  pre->add_option("story", story_path, "Story JSON")->required()->check(CLI::ExistingFile);
  pre->add_option("--variant", variant, "sentence | keyword | whole_story");
  pre->add_option("--out", out, "Output JSON (default stdout)");
  auto* run = pipeline_cmd->add_subcommand("run", "Generate, select and stylize images");
  run->add_option("--story", story_path, "Story JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--variant", variant, "sentence | keyword | whole_story");
  run->add_option("--seed", seed, "Generation seed");
  std::string out_dir;
  run->add_option("--out", out_dir, "Output directory (manifest.json, images/)")->required();

  // feedback
  auto* feedback_cmd = app.add_subcommand("feedback", "Retelling feedback");
  feedback_cmd->require_subcommand(1);
  std::string transcript_path;
  double threshold = 0.7;
  auto* score = feedback_cmd->add_subcommand("score", "Score a transcript against a story");
  score->add_option("--story", story_path, "Story JSON")->required()->check(CLI::ExistingFile);
  score->add_option("--transcript", transcript_path, "Transcript text file")->required()->check(CLI::ExistingFile);
  score->add_option("--threshold", threshold, "Correctness threshold");
  std::string labeled_path;
  auto* calibrate = feedback_cmd->add_subcommand("calibrate", "Choose a threshold from labeled similarities");
  calibrate->add_option("--labeled", labeled_path, "CSV of similarity,label")->required()->check(CLI::ExistingFile);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Offline evaluation");
  eval_cmd->require_subcommand(1);
  std::string corpus_dir, variants = "sentence,keyword,whole_story", csv_path;
  auto* compare = eval_cmd->add_subcommand("compare", "Compare visualization variants over a corpus");
  compare->add_option("--corpus", corpus_dir, "Directory of story JSON files")->required()->check(CLI::ExistingDirectory);
  compare->add_option("--variants", variants, "Comma-separated variants");
  compare->add_option("--seed", seed, "Generation seed");
  compare->add_option("--out", out, "Report JSON (default stdout)");
  compare->add_option("--csv", csv_path, "Per-story CSV");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "Listen address (overrides config)");
  serve->add_option("--port", port, "Listen port (overrides config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      auto ws = materials::make_word_set(text::split(words, ','));
      auto be = backends_from(config);
      materials::GenerateOptions opts;
      opts.max_words = max_words;
      emit(out, materials::generate_story(ws, *be.text_generator, opts));
    } else if (val->parsed()) {
      auto story = read_json(story_path).get<materials::Story>();
      auto report = materials::validate_story(story);
      std::cout << materials::to_json(report).dump(2) << "\n";
      return report.ok() ? 0 : 3;
    } else if (pre->parsed()) {
      auto story = read_json(story_path).get<materials::Story>();
      auto be = backends_from(config);
      auto p = text::preprocess(story.text, *be.coref);
      auto prompts = text::build_prompts(p.sentences, text::variant_from_string(variant), story.text);
      json jp = json::array();
      for (const auto& s : prompts) jp.push_back(s);
      emit(out, {{"story_id", story.id}, {"degraded", p.degraded}, {"sentences", p.sentences}, {"prompts", jp}});
    } else if (run->parsed()) {
      auto story = read_json(story_path).get<materials::Story>();
      auto be = backends_from(config);
      image::FileBlobStore blobs(fs::path(out_dir) / "images");
      auto m = image::run_workflow(story, text::variant_from_string(variant), seed, be, blobs);
      write_text(fs::path(out_dir) / "manifest.json", json(m).dump(2) + "\n");
      std::cout << m.id << "\n";
    } else if (score->parsed()) {
      auto story = read_json(story_path).get<materials::Story>();
      auto be = backends_from(config);
      feedback::FeedbackConfig cfg{threshold};
      auto report = feedback::score_retelling(story, text::segment_sentences(story.text), read_text(transcript_path),
                                              cfg, *be.sentence_embedder);
      std::cout << json(report).dump(2) << "\n";
    } else if (calibrate->parsed()) {
      auto cal = feedback::calibrate_threshold(feedback::parse_labeled_csv(read_text(labeled_path)));
      std::cout << json(cal).dump(2) << "\n";
    } else if (compare->parsed()) {
      auto be = backends_from(config);
      image::MemoryBlobStore blobs;
      auto report = eval::compare_variants(load_corpus(corpus_dir), parse_variants(variants), seed, be, blobs);
      emit(out, eval::to_json(report));
      if (!csv_path.empty()) write_text(csv_path, eval::to_csv(report));
    } else if (serve->parsed()) {
      auto cfg = config.empty() ? service::config_from_json(json::object()) : service::load_config(config);
      if (!host.empty()) cfg.host = host;
      if (port >= 0) cfg.port = port;
      service::Service svc(cfg);
      httplib::Server server;
      service::install_routes(server, svc);
      running_server = &server;
      std::signal(SIGINT, [](int) { running_server->stop(); });
      std::signal(SIGTERM, [](int) { running_server->stop(); });
      std::cerr << "listening on " << cfg.host << ":" << cfg.port << "\n";
      if (!server.listen(cfg.host, cfg.port)) {
        std::cerr << "error: cannot listen on " << cfg.host << ":" << cfg.port << "\n";
        return 1;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
