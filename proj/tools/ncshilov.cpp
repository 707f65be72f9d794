#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "ncshilov/problem.hpp"

using namespace ncshilov;

namespace {

int fail(int code, const std::string& kind, const std::string& message, const std::string& pointer = {}) {
  json err{{"error", kind}, {"message", message}};
  if (!pointer.empty()) err["pointer"] = pointer;
  std::cerr << err.dump(2) << "\n";
  return code;
}

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') throw SchemaError(origin, "expected a non-negative integer seed");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Envelopes, multipliers and oplications of concrete operator spaces"};
  std::string input, gallery, task, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_norm, tol_rank;
  std::optional<std::size_t> level_cap;
  bool human = false;
  app.add_option("problem", input, "problem file (JSON), or - for stdin");
  app.add_option("--gallery", gallery, "run a named fixture instead of a file");
  app.add_option("--task", task, "override the task of the problem");
  app.add_option("--seed", seed, "random seed (beats NCSHILOV_SEED and the file)");
  app.add_option("--tol-norm", tol_norm, "norm tolerance");
  app.add_option("--tol-rank", tol_rank, "rank tolerance");
  app.add_option("--level-cap", level_cap, "highest matrix level searched")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_flag("--human", human, "plain-text tables instead of JSON");
  CLI11_PARSE(app, argc, argv);

  try {
    if (input.empty() == gallery.empty()) throw SchemaError("/", "give exactly one of a problem file and --gallery");
    ProblemFile p;
    if (!gallery.empty()) {
      p = gallery_problem(gallery);
      if (!task.empty()) p.task = task;
    } else {
      std::string text;
      if (input == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
      } else {
        std::ifstream f(input);
        if (!f) return fail(2, "InputError", "cannot read " + input);
        text.assign(std::istreambuf_iterator<char>(f), {});
      }
      json j = json::parse(text);
      if (!task.empty() && j.is_object()) j["task"] = task;
      p = parse_problem(j);
    }
    if (!task.empty() && std::find(task_names().begin(), task_names().end(), task) == task_names().end())
      throw SchemaError("/task", "unknown task \"" + task + "\"");
    if (const char* env = std::getenv("NCSHILOV_SEED"); env && *env) p.seed = parse_seed(env, "NCSHILOV_SEED");
    if (seed) p.seed = *seed;
    if (tol_norm) p.tol.norm_eps = *tol_norm;
    if (tol_rank) p.tol.rank_eps = *tol_rank;
    if (level_cap) p.level_cap = *level_cap;

    const json report = run(p);
    const std::string text = human ? human_report(report) : report.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path);
      if (!f) return fail(2, "InputError", "cannot write " + out_path);
      f << text;
    }
    return 0;
  } catch (const json::exception& e) {
    return fail(2, "ParseError", e.what());
  } catch (const SchemaError& e) {
    return fail(2, "SchemaError", e.what(), e.pointer());
  } catch (const NumericsAlarm& e) {
    return fail(3, "NumericsAlarm", e.what());
  } catch (const Error& e) {
    return fail(2, "InputError", e.what());
  }
}
