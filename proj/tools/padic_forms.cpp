// padic-forms: command-line front end.
//
// Exit codes: 0 isotropic / pass, 1 anisotropic / fail, 2 inconclusive,
// 3 budget exceeded, 64 parse or usage error, 65 precision error,
// 66 unreadable input, 70 internal error, 73 unwritable output.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "padicforms/io.hpp"

namespace fs = std::filesystem;
using namespace padicforms;

namespace {

enum Exit : int {
  kIsotropic = 0,
  kAnisotropic = 1,
  kInconclusive = 2,
  kBudget = 3,
  kParse = 64,
  kPrecision = 65,
  kNoInput = 66,
  kInternal = 70,
  kCantCreate = 73,
};

struct IoError : std::runtime_error {
  int code;
  IoError(const std::string& what, int c) : std::runtime_error(what), code(c) {}
};

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'", kNoInput);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw IoError("cannot write '" + out + "'", kCantCreate);
  f << text << '\n';
}

AdditiveForm load_form(const std::string& path, int precision) {
  AdditiveForm f = read_form(slurp(path));
  if (precision != 0) {
    check_precision(precision);
    if (precision < f.precision) {
      throw PrecisionError("--precision " + std::to_string(precision) + " is below the form's precision " +
                           std::to_string(f.precision));
    }
    f = f.with_precision(precision);
  }
  return f;
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::kIsotropic: return kIsotropic;
    case Verdict::kAnisotropic: return kAnisotropic;
    case Verdict::kInconclusive: return kInconclusive;
  }
  return kInternal;
}

SweepMode parse_mode(const std::string& s) {
  if (s == "exhaustive") return SweepMode::kExhaustive;
  if (s == "sampled") return SweepMode::kSampled;
  throw ParseError("--mode must be exhaustive or sampled");
}

struct Common {
  std::string out;
  int precision = 0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 42;
  bool timings = false;
};

void add_output(CLI::App* app, Common& c) {
  app->add_option("--out,-o", c.out, "Write JSON here instead of stdout");
  app->add_flag("--timings", c.timings, "Include wall-clock timings (output is no longer byte-stable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isotropy of additive forms of degree d = 2m (m odd) over Q2(sqrt 5)"};
  app.require_subcommand(1);
  Common c;

  // solve
  std::string form_path;
  bool no_oracle = false, no_descent = false;
  auto* solve = app.add_subcommand("solve", "Decide isotropy; exit 0 isotropic, 1 anisotropic, 2 inconclusive");
  solve->add_option("form", form_path, "Form file (plain text or JSON), '-' for stdin")->required();
  solve->add_option("--precision", c.precision, "Raise the form's precision K");
  solve->add_option("--budget", c.budget, "Certificate search node budget");
  solve->add_flag("--no-oracle", no_oracle, "Skip the exhaustive oracle");
  solve->add_flag("--no-descent", no_descent, "Skip the window descent");
  add_output(solve, c);

  // oracle
  std::string oracle_path;
  int modulus = 0;
  bool primitive = false;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive decision modulo 2^M");
  oracle->add_option("form", oracle_path, "Form file, '-' for stdin")->required();
  oracle->add_option("--precision", c.precision, "Raise the form's precision K");
  oracle->add_option("--budget", c.budget, "Work budget (sum-set operations)");
  oracle->add_option("--modulus,-M", modulus, "Only search primitive zeros modulo 2^M");
  oracle->add_flag("--primitive", primitive, "With -M: any unit variable counts, not only liftable ones");
  add_output(oracle, c);

  // witness verify
  std::string wform_path, witness_path;
  auto* witness = app.add_subcommand("witness", "Witness tools");
  witness->require_subcommand(1);
  auto* wverify = witness->add_subcommand("verify", "Check a witness; exit 0 valid, 1 invalid");
  wverify->add_option("form", wform_path, "Form file")->required();
  wverify->add_option("witness", witness_path, "Witness JSON (a bare witness or a solve result)")->required();
  add_output(wverify, c);

  // lemma verify / list
  std::string lemma_id, mode_name;
  int degree = 0;
  std::uint64_t samples = 100'000;
  int extra_digits = 2;
  auto* lemma = app.add_subcommand("lemma", "Contraction lemma sweeps");
  lemma->require_subcommand(1);
  auto* lverify = lemma->add_subcommand("verify", "Sweep one lemma; exit 0 when every configuration has a certificate");
  lverify->add_option("id", lemma_id, "Lemma id (see 'lemma list')")->required();
  lverify->add_option("--d", degree, "Degree (default: the lemma's first degree)");
  lverify->add_option("--mode", mode_name, "exhaustive|sampled");
  lverify->add_option("--samples,--trials", samples, "Samples in sampled mode");
  lverify->add_option("--seed", c.seed, "Sampling seed");
  lverify->add_option("--precision", c.precision, "Ring precision of the leaves");
  lverify->add_option("--budget", c.budget, "Search node budget per configuration");
  lverify->add_option("--extra-digits", extra_digits, "Digits a failing configuration may learn (0: none)");
  add_output(lverify, c);
  auto* llist = lemma->add_subcommand("list", "List registered lemmas");

  // paper reproduce / form
  int paper_degree = 6;
  std::uint64_t trials = 1000;
  auto* paper = app.add_subcommand("paper", "Lower-bound forms and the full reproduction battery");
  paper->require_subcommand(1);
  auto* reproduce_cmd = paper->add_subcommand("reproduce", "Run every check for one degree; exit 0 when all pass");
  reproduce_cmd->add_option("--d", paper_degree, "Degree");
  reproduce_cmd->add_option("--trials", trials, "Random forms at the isotropy threshold");
  reproduce_cmd->add_option("--samples", samples, "Samples per sampled sweep");
  reproduce_cmd->add_option("--seed", c.seed, "Seed");
  add_output(reproduce_cmd, c);
  std::string form_name, form_format = "text";
  auto* pform = paper->add_subcommand("form", "Print G, H, F or I");
  pform->add_option("name", form_name, "G|H|F|I")->required();
  pform->add_option("--d", paper_degree, "Degree");
  pform->add_option("--precision", c.precision, "Precision K (default d + 4)");
  pform->add_option("--format", form_format, "text|json");
  pform->add_option("--out,-o", c.out, "Output file");

  // gamma
  int s = 0;
  std::string archive;
  auto* gamma = app.add_subcommand("gamma", "Random forms with s variables through the solver");
  gamma->add_option("--d", degree, "Degree")->required();
  gamma->add_option("--s", s, "Variables per form")->required();
  gamma->add_option("--trials", trials, "Number of forms");
  gamma->add_option("--seed", c.seed, "Seed");
  gamma->add_option("--precision", c.precision, "Precision K (default d + 4)");
  gamma->add_option("--archive", archive, "Directory for anisotropic forms with s > 3d");
  add_output(gamma, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kParse;
  }

  try {
    if (solve->parsed()) {
      const AdditiveForm f = load_form(form_path, c.precision);
      SolverConfig cfg;
      if (c.budget) cfg.search.node_budget = c.budget;
      cfg.use_oracle = !no_oracle;
      cfg.use_descent = !no_descent;
      const IsotropyResult r = decide_isotropy(f, cfg);
      emit(c.out, to_json(r, c.timings).dump(2));
      return verdict_code(r.verdict);
    }
    if (oracle->parsed()) {
      const AdditiveForm f = load_form(oracle_path, c.precision);
      OraclePolicy policy;
      if (c.budget) policy.max_work = static_cast<double>(c.budget);
      Json j;
      int code = kInconclusive;
      if (modulus > 0) {
        const ZeroSearch z =
            primitive_zero_mod(f, modulus, primitive ? PrimitivityMode::kPrimitive : PrimitivityMode::kLiftable, policy);
        j["modulus"] = modulus;
        j["mode"] = primitive ? "primitive" : "liftable";
        j["zero"] = z.zero.has_value();
        if (z.zero) {
          Json x = Json::array();
          for (const auto& v : z.zero->x) x.push_back(to_json(v));
          j["assignment"] = std::move(x);
          j["unit_index"] = z.zero->unit_index;
        }
        j["statesVisited"] = z.states_visited;
        code = z.zero ? kIsotropic : kAnisotropic;
      } else {
        const ExhaustiveDecision d = decide_isotropy_exhaustive(f, policy);
        j["verdict"] = d.isotropic ? "isotropic" : "anisotropic";
        if (d.witness) j["witness"] = to_json(*d.witness);
        if (d.certificate) j["certificate"] = to_json(*d.certificate);
        code = d.isotropic ? kIsotropic : kAnisotropic;
      }
      emit(c.out, j.dump(2));
      return code;
    }
    if (wverify->parsed()) {
      const AdditiveForm f = load_form(wform_path, 0);
      Json wj;
      try {
        wj = Json::parse(slurp(witness_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid witness JSON: ") + e.what());
      }
      if (wj.contains("witness")) wj = wj["witness"];
      const bool ok = verify_witness(f, witness_from_json(wj, f.precision));
      emit(c.out, Json{{"valid", ok}}.dump(2));
      return ok ? 0 : 1;
    }
    if (llist->parsed()) {
      for (const auto& l : lemma_registry()) {
        std::cout << std::left << std::setw(7) << l.id << std::setw(10) << l.type.to_string() << std::setw(12)
                  << to_string(l.default_mode) << l.statement << '\n';
      }
      return 0;
    }
    if (lverify->parsed()) {
      const LemmaSpec& spec = find_lemma(lemma_id);
      SweepOptions opts;
      opts.mode = mode_name.empty() ? spec.default_mode : parse_mode(mode_name);
      opts.samples = samples;
      opts.seed = c.seed;
      opts.precision = c.precision;
      opts.max_extra_digits = extra_digits;
      if (c.budget) opts.search.node_budget = c.budget;
      const SweepReport r = sweep_lemma(spec, degree == 0 ? spec.degrees.front() : degree, opts);
      emit(c.out, to_json(r, c.timings).dump(2));
      return r.passed() ? 0 : 1;
    }
    if (reproduce_cmd->parsed()) {
      ReproduceOptions opts;
      opts.seed = c.seed;
      opts.trials = trials;
      opts.samples = samples;
      Json rows = Json::array();
      bool all = true;
      reproduce(paper_degree, opts, [&](const ReproduceRow& row) {
        std::cout << (row.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(48) << row.item << row.detail;
        if (c.timings) std::cout << "  (" << std::fixed << std::setprecision(1) << row.seconds << " s)";
        std::cout << std::endl;
        all = all && row.passed;
        rows.push_back(to_json(row, c.timings));
      });
      if (!c.out.empty()) emit(c.out, Json{{"degree", paper_degree}, {"passed", all}, {"rows", rows}}.dump(2));
      return all ? 0 : 1;
    }
    if (pform->parsed()) {
      const BlockForm b = build_named_form(parse_named_form(form_name), paper_degree, c.precision);
      if (form_format != "text" && form_format != "json") throw ParseError("--format must be text or json");
      emit(c.out, form_format == "json" ? to_json(b.form).dump() : format_form_text(b.form));
      return 0;
    }
    if (gamma->parsed()) {
      const GammaStats g = gamma_experiment(degree, s, trials, c.seed, {}, c.precision);
      if (!archive.empty() && !g.archived.empty()) {
        std::error_code ec;
        fs::create_directories(archive, ec);
        if (ec) throw IoError("cannot create '" + archive + "'", kCantCreate);
        for (std::size_t i = 0; i < g.archived.size(); ++i) {
          emit((fs::path(archive) / ("anisotropic_" + std::to_string(i) + ".json")).string(),
               to_json(g.archived[i]).dump());
        }
      }
      emit(c.out, to_json(g, c.timings).dump(2));
      return 0;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << '\n';
    return kPrecision;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
