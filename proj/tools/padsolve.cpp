#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "padsolve/checks.hpp"
#include "padsolve/congruence.hpp"
#include "padsolve/document.hpp"
#include "padsolve/hensel.hpp"
#include "padsolve/pipeline.hpp"
#include "padsolve/system.hpp"

namespace {

using namespace padsolve;
using nlohmann::json;

constexpr int kCertified = 0;
constexpr int kFailed = 1;
constexpr int kInvalid = 2;
constexpr int kPipeline = 3;

const char* status_name(pipeline::SolveStatus st) {
  switch (st) {
    case pipeline::SolveStatus::Certified: return "certified";
    case pipeline::SolveStatus::Unsolvable: return "unsolvable";
    case pipeline::SolveStatus::Rejected: return "rejected";
    case pipeline::SolveStatus::PipelineFailure: return "pipeline-failure";
  }
  return "unknown";
}

int status_code(pipeline::SolveStatus st) {
  switch (st) {
    case pipeline::SolveStatus::Certified: return kCertified;
    case pipeline::SolveStatus::Unsolvable: return kFailed;
    case pipeline::SolveStatus::Rejected: return kInvalid;
    case pipeline::SolveStatus::PipelineFailure: return kPipeline;
  }
  return kInvalid;
}

struct SolveFlags {
  std::string mode = "guaranteed";
  unsigned lift_to = 0;
  std::string log_path;
  std::string certificate_out;
  std::string solution_out;
  bool strict_constants = false;
  bool no_oracle = false;
};

pipeline::SolveOptions to_options(const SolveFlags& f) {
  pipeline::SolveOptions o;
  o.mode = f.mode == "opportunistic" ? pipeline::SolveMode::Opportunistic
                                     : pipeline::SolveMode::Guaranteed;
  o.strict_constants = f.strict_constants;
  o.allow_oracle_fallback = !f.no_oracle;
  return o;
}

void write_log(const std::string& path, const std::string& file,
               const pipeline::SolveResult& res) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  json head{{"record", "run"},
            {"file", file},
            {"status", status_name(res.status)},
            {"diagnostic", res.diagnostic}};
  if (res.certificate) head["support_size"] = res.certificate->support.size();
  out << head.dump() << "\n";
  for (const auto& n : res.log.notes) out << json{{"record", "note"}, {"text", n}}.dump() << "\n";
  for (const auto& c : res.log.contractions)
    out << json{{"record", "contraction"},
                {"stage", c.stage},
                {"kind", c.kind},
                {"level_from", c.level_from},
                {"level_to", c.level_to},
                {"inputs", c.inputs},
                {"witness", c.witness},
                {"va", c.va},
                {"vb", c.vb},
                {"node", c.node}}
               .dump()
        << "\n";
}

// Solves one file; returns the process exit code for it.
int solve_one(const std::string& path, const SolveFlags& flags, std::string& report) {
  doc::SystemDocument d;
  try {
    d = doc::read_system_file(path);
  } catch (const std::exception& e) {
    report = std::string("rejected ") + e.what();
    return kInvalid;
  }
  try {
    model::System sys = doc::to_system(d);
    pipeline::SolveResult res = pipeline::solve(sys, to_options(flags));
    if (!flags.log_path.empty()) write_log(flags.log_path, path, res);
    report = status_name(res.status);
    if (!res.diagnostic.empty()) report += ": " + res.diagnostic;
    if (res.certificate) {
      report += " (support " + std::to_string(res.certificate->support.size()) + " of " +
                std::to_string(sys.size()) + " columns)";
      if (!pipeline::verify(sys, *res.certificate))
        throw std::logic_error("returned certificate failed verification");
      if (!flags.certificate_out.empty())
        doc::write_certificate_file(flags.certificate_out, res.certificate->support);
      if (flags.lift_to > 0) {
        auto sol = hensel::lift(sys, *res.certificate, flags.lift_to);
        report += ", lifted to p^" + std::to_string(sol.precision);
        if (!flags.solution_out.empty()) {
          std::ofstream out(flags.solution_out, std::ios::binary);
          if (!out) throw std::runtime_error("cannot write " + flags.solution_out);
          out << "# solution precision " << sol.precision << "\n";
          for (std::size_t j = 0; j < sol.support.size(); ++j)
            out << sol.support[j] << " " << u128_to_string(sol.values[j]) << "\n";
        }
      }
    }
    return status_code(res.status);
  } catch (const std::invalid_argument& e) {
    report = std::string("rejected ") + e.what();
    return kInvalid;
  } catch (const std::exception& e) {
    report = std::string("pipeline-failure ") + e.what();
    return kPipeline;
  }
}

int cmd_solve(const std::string& path, bool batch, const SolveFlags& flags) {
  if (!batch) {
    std::string report;
    int code = solve_one(path, flags, report);
    std::cout << path << ": " << report << "\n";
    return code;
  }
  std::vector<std::string> files;
  try {
    for (const auto& entry : std::filesystem::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path().string());
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << path << ": no files\n";
    return kInvalid;
  }
  std::vector<std::string> reports(files.size());
  std::vector<int> codes(files.size(), kInvalid);
  std::atomic<std::size_t> next{0};
  unsigned nthreads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                      static_cast<unsigned>(files.size())));
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (unsigned w = 0; w < nthreads; ++w)
    workers.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= files.size()) break;
        SolveFlags f = flags;  // per-file outputs would collide; keep shared log only
        f.certificate_out.clear();
        f.solution_out.clear();
        codes[i] = solve_one(files[i], f, reports[i]);
      }
    });
  for (auto& w : workers) w.join();
  int worst = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::cout << files[i] << ": " << reports[i] << "\n";
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

int cmd_verify(const std::string& path, const std::string& cert_path) {
  try {
    model::System sys = doc::to_system(doc::read_system_file(path));
    auto support = doc::read_certificate_file(cert_path);
    pipeline::Certificate cert{std::move(support), sys.ring().pow_p(sys.tau() + 1)};
    if (pipeline::verify(sys, cert)) {
      std::cout << "verified: " << cert.support.size() << " columns, modulus p^"
                << sys.tau() + 1 << "\n";
      return kCertified;
    }
    std::cout << "verification failed\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  }
}

int cmd_normalize(const std::string& path, const std::string& out_path) {
  try {
    doc::SystemDocument d = doc::read_system_file(path);
    model::System sys = doc::to_system(d);
    auto nr = model::normalize(sys);
    doc::SystemDocument out = doc::from_system(nr.system);
    out.metadata = d.metadata;
    out.metadata.emplace_back("normalized", nr.bounds_ok ? "true" : "stalled");
    std::cerr << "moves applied: " << nr.trace.size() << "\n";
    if (auto t = model::theta(nr.system)) std::cerr << "theta: " << *t << "\n";
    if (!nr.bounds_ok) std::cerr << "bounds not reached: " << nr.diagnostic << "\n";
    if (out_path.empty())
      std::cout << doc::emit_system(out);
    else
      doc::write_system_file(out_path, out);
    return nr.bounds_ok ? kCertified : kFailed;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  }
}

int cmd_gen(const doc::GenOptions& opt, const std::string& out_path) {
  try {
    doc::SystemDocument d = doc::gen_random_system(opt);
    if (out_path.empty())
      std::cout << doc::emit_system(d);
    else
      doc::write_system_file(out_path, d);
    return kCertified;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  }
}

int cmd_lemma(const std::string& which, std::uint32_t p, bool exhaustive, std::uint64_t samples,
              std::uint64_t seed, bool strict) {
  try {
    checks::CheckReport rep;
    if (which == "olson")
      rep = exhaustive ? checks::check_olson_exhaustive(p)
                       : checks::check_olson_random(p, samples, seed);
    else if (which == "cd")
      rep = exhaustive ? checks::check_cd_exhaustive(p) : checks::check_cd_random(p, samples, seed);
    else if (which == "prop71")
      rep = exhaustive ? checks::check_prop71_exhaustive(p)
                       : checks::check_prop71_random(p, samples, seed);
    else if (which == "alon") {
      if (exhaustive) throw std::invalid_argument("the contraction check has no exhaustive mode");
      rep = checks::check_alon_random(p, samples, seed, strict);
    } else if (which == "davenport")
      rep = exhaustive ? checks::check_davenport_exhaustive(p)
                       : checks::check_davenport_random(p, samples, seed);
    else
      throw std::invalid_argument("unknown lemma: " + which);
    std::cout << rep.name << ": " << rep.trials << " trials, " << rep.failures << " failures\n";
    if (!rep.detail.empty()) std::cout << "first failure: " << rep.detail << "\n";
    return rep.ok() ? kCertified : kFailed;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  }
}

int cmd_oracle(const std::string& path, const std::string& cert_out) {
  try {
    model::System sys = doc::to_system(doc::read_system_file(path));
    auto sol = congr::oracle_subset_solution(sys);
    if (!sol) {
      std::cout << "no rank-2 subset solution mod p^" << sys.tau() + 1 << "\n";
      return kFailed;
    }
    pipeline::Certificate cert{*sol, sys.ring().pow_p(sys.tau() + 1)};
    if (!pipeline::verify(sys, cert)) throw std::logic_error("oracle certificate failed verification");
    std::cout << "solution with " << sol->size() << " columns\n";
    if (cert_out.empty())
      std::cout << doc::emit_certificate(*sol);
    else
      doc::write_certificate_file(cert_out, *sol);
    return kCertified;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact p-adic solver for pairs of diagonal forms of degree p^tau (p-1)"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run the contraction pipeline on a system file");
  std::string solve_path;
  bool batch = false;
  SolveFlags flags;
  solve->add_option("file", solve_path, "system file (or directory with --batch)")->required();
  solve->add_flag("--batch", batch, "treat the path as a directory of system files");
  solve->add_option("--mode", flags.mode, "guaranteed|opportunistic")
      ->check(CLI::IsMember({"guaranteed", "opportunistic"}));
  solve->add_option("--lift-to", flags.lift_to, "Hensel-lift the certificate to this precision");
  solve->add_option("--log", flags.log_path, "append line-delimited JSON run records here");
  solve->add_option("--certificate-out", flags.certificate_out, "write the certificate here");
  solve->add_option("--solution-out", flags.solution_out, "write the lifted solution here");
  solve->add_flag("--strict-constants", flags.strict_constants,
                  "use the conservative C = 9996 thresholds");
  solve->add_flag("--no-oracle-fallback", flags.no_oracle,
                  "opportunistic mode: never fall back to the subset oracle");

  // verify
  auto* verify = app.add_subcommand("verify", "check a certificate against a system file");
  std::string verify_path, verify_cert;
  verify->add_option("file", verify_path, "system file")->required();
  verify->add_option("--certificate", verify_cert, "certificate file")->required();

  // normalize
  auto* normalize = app.add_subcommand("normalize", "apply equivalence moves until the level bounds hold");
  std::string norm_path, norm_out;
  normalize->add_option("file", norm_path, "system file")->required();
  normalize->add_option("-o,--out", norm_out, "output file (default stdout)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random system");
  doc::GenOptions gopt;
  std::string gen_out;
  gen->add_option("--p", gopt.p, "odd prime")->required();
  gen->add_option("--tau", gopt.tau, "tau (degree is p^tau (p-1))")->required();
  gen->add_option("--s", gopt.s, "number of columns")->required();
  gen->add_option("--seed", gopt.seed, "RNG seed");
  gen->add_option("--profile", gopt.profile, "normalized|raw")
      ->check(CLI::IsMember({"normalized", "raw"}));
  gen->add_option("--precision", gopt.precision, "working precision K (default tau + 9)");
  gen->add_option("-o,--out", gen_out, "output file (default stdout)");

  // lemma
  auto* lemma = app.add_subcommand("lemma", "run a combinatorial lemma check suite");
  std::string lemma_name;
  std::uint32_t lemma_p = 3;
  bool lemma_exhaustive = false, lemma_strict = false;
  std::uint64_t lemma_samples = 10000, lemma_seed = 0;
  lemma->add_option("name", lemma_name, "olson|cd|prop71|alon|davenport")->required();
  lemma->add_option("--p", lemma_p, "prime (default 3)");
  lemma->add_flag("--exhaustive", lemma_exhaustive, "enumerate every input");
  lemma->add_option("--samples", lemma_samples, "number of random inputs");
  lemma->add_option("--seed", lemma_seed, "RNG seed");
  lemma->add_flag("--strict", lemma_strict, "use the conservative C = 9996 threshold");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact subset-solution search (small systems)");
  std::string oracle_path, oracle_out;
  oracle->add_option("file", oracle_path, "system file")->required();
  oracle->add_option("--certificate-out", oracle_out, "write the found support here");

  // Usage errors are invalid input; --help keeps CLI11's success exit.
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInvalid;
  }

  if (solve->parsed()) return cmd_solve(solve_path, batch, flags);
  if (verify->parsed()) return cmd_verify(verify_path, verify_cert);
  if (normalize->parsed()) return cmd_normalize(norm_path, norm_out);
  if (gen->parsed()) return cmd_gen(gopt, gen_out);
  if (lemma->parsed())
    return cmd_lemma(lemma_name, lemma_p, lemma_exhaustive, lemma_samples, lemma_seed, lemma_strict);
  if (oracle->parsed()) return cmd_oracle(oracle_path, oracle_out);
  return kInvalid;
}
