#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "qconcept/bell.hpp"
#include "qconcept/counts.hpp"
#include "qconcept/detail/json_numbers.hpp"
#include "qconcept/error.hpp"
#include "qconcept/hilbert.hpp"
#include "qconcept/landscape.hpp"
#include "qconcept/stats.hpp"

namespace fs = std::filesystem;
using namespace qconcept;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;

// Data files carry 12 significant digits, console reports 4 decimals.
constexpr int kDataDigits = 12;

double round12(double v) {
  const double r = std::stod(fmt::format("{:.12g}", v));
  return r == 0.0 ? 0.0 : r;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

void warn(const std::string& message) { fmt::print(stderr, "warning: {}\n", message); }

hilbert::DisjunctionData load_prepared(const fs::path& path) {
  std::vector<std::string> warnings;
  auto d = hilbert::prepare(hilbert::load_disjunction_csv(path), &warnings);
  for (const auto& w : warnings) warn(w);
  return d;
}

// ---- chsh

struct ChshOptions {
  std::string set;
  std::string report;
};

int cmd_chsh(const ChshOptions& o) {
  const auto set = counts::load_coincidence_set(o.set);
  const auto r = bell::chsh_from_set(set);
  fmt::print("E(AB)   = {:.4f}\n", r.e_ab);
  fmt::print("E(A'B)  = {:.4f}\n", r.e_apb);
  fmt::print("E(AB')  = {:.4f}\n", r.e_abp);
  fmt::print("E(A'B') = {:.4f}\n", r.e_apbp);
  fmt::print("S       = {:.4f}\n", r.s);
  fmt::print("class   = {}\n", bell::to_string(r.classification));
  if (!o.report.empty()) {
    nlohmann::ordered_json j;
    j["E_AB"] = round12(r.e_ab);
    j["E_ApB"] = round12(r.e_apb);
    j["E_ABp"] = round12(r.e_abp);
    j["E_ApBp"] = round12(r.e_apbp);
    j["S"] = round12(r.s);
    j["classification"] = std::string(bell::to_string(r.classification));
    write_text(o.report, qconcept::detail::shortest_floats(j.dump(2)) + "\n");
  }
  return kExitOk;
}

// ---- model

struct ModelOptions {
  std::string data;
  std::string out;
};

int cmd_model(const ModelOptions& o) {
  const auto d = load_prepared(o.data);
  const auto model = hilbert::build_model(d);
  const auto report = hilbert::verify_model(model, d);
  hilbert::write_model(model, o.out);
  fmt::print("exemplars        = {}\n", model.size());
  fmt::print("dominant m       = {} ({})\n", model.m + 1, model.labels[model.m]);
  fmt::print("c_m              = {:.4f}\n", model.c_m);
  fmt::print("beta_m           = {:.4f} deg\n", model.beta_deg[model.m]);
  fmt::print("|<A|B>|          = {:.3e}\n", report.inner_product_modulus);
  fmt::print("| ||A|| - 1 |    = {:.3e}\n", report.norm_a_deviation);
  fmt::print("| ||B|| - 1 |    = {:.3e}\n", report.norm_b_deviation);
  fmt::print("max residual     = {:.3e} ({})\n", report.max_residual, model.labels[report.worst_index]);
  fmt::print("verification     = {}\n", report.pass ? "pass" : "FAIL");
  return report.pass ? kExitOk : kExitInfeasible;
}

// ---- landscape

struct LandscapeOptions {
  std::string data;
  std::string model;
  std::string outdir;
  std::string grid = "400x300";
  std::string extent;
  std::string format = "csv";
  std::vector<double> center_a{landscape::kDefaultCenterA.x, landscape::kDefaultCenterA.y};
  std::vector<double> center_b{landscape::kDefaultCenterB.x, landscape::kDefaultCenterB.y};
  std::optional<double> constant_phase;
  unsigned threads = 0;
};

landscape::Resolution parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  landscape::Resolution r;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    r.nx = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    r.ny = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--grid", fmt::format("expected NXxNY, got '{}'", text));
  }
  if (r.nx < 2 || r.ny < 2) throw CLI::ValidationError("--grid", "resolution must be at least 2x2");
  return r;
}

landscape::Extent parse_extent(const std::string& text) {
  std::vector<double> v;
  std::size_t start = 0;
  try {
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      std::size_t used = 0;
      v.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--extent", fmt::format("expected x0,x1,y0,y1, got '{}'", text));
  }
  if (v.size() != 4) throw CLI::ValidationError("--extent", "expected four numbers x0,x1,y0,y1");
  return {v[0], v[1], v[2], v[3]};
}

int cmd_landscape(const LandscapeOptions& o) {
  const auto resolution = parse_grid(o.grid);
  const auto d = load_prepared(o.data);
  const auto model = hilbert::read_model(o.model);
  if (model.labels != d.labels) throw DataError("model labels do not match the data file");

  const auto fields = landscape::fit_fields(d, {o.center_a[0], o.center_a[1]}, {o.center_b[0], o.center_b[1]});
  const auto placements = landscape::place_exemplars(d, fields);
  std::size_t inexact = 0;
  for (std::size_t k = 0; k < placements.size(); ++k) {
    if (!placements.items[k].exact) {
      ++inexact;
      warn(fmt::format("{} placed by least squares (residual {:.3e})", placements.labels[k],
                       placements.items[k].residual));
    }
  }
  const auto phase = o.constant_phase ? landscape::PhaseField::constant(*o.constant_phase)
                                      : landscape::phase_field(placements, landscape::effective_phases(d, model));
  const auto extent = o.extent.empty() ? landscape::default_extent(placements, fields) : parse_extent(o.extent);

  fs::create_directories(o.outdir);
  const fs::path dir(o.outdir);
  const bool csv = o.format == "csv" || o.format == "both";
  const bool pgm = o.format == "pgm" || o.format == "both";
  for (auto kind : {landscape::GridKind::field_a, landscape::GridKind::field_b, landscape::GridKind::classical,
                    landscape::GridKind::quantum, landscape::GridKind::interference}) {
    const auto grid = landscape::render(fields, phase, extent, resolution, kind, o.threads);
    const std::string stem(landscape::to_string(kind));
    if (csv) landscape::export_grid(grid, landscape::ExportFormat::csv, dir / (stem + ".csv"), kDataDigits);
    if (pgm) landscape::export_grid(grid, landscape::ExportFormat::pgm, dir / (stem + ".pgm"));
  }
  landscape::write_placements(placements, dir / "placements.csv");

  fmt::print("sigma rule  = {}\n", fields.sigma_rule);
  fmt::print("sigma A, B  = {:.4f}, {:.4f}\n", fields.a.sigma, fields.b.sigma);
  fmt::print("exact       = {} of {}\n", placements.size() - inexact, placements.size());
  fmt::print("extent      = [{:.4f}, {:.4f}] x [{:.4f}, {:.4f}]\n", extent.xmin, extent.xmax, extent.ymin,
             extent.ymax);
  fmt::print("grid        = {}x{}\n", resolution.nx, resolution.ny);
  return kExitOk;
}

// ---- stats

struct StatsOptions {
  std::string observed;
  std::optional<unsigned> n;
  std::string report;
};

int cmd_stats(const StatsOptions& o) {
  const auto table = counts::load_count_table(o.observed);
  const auto obs = stats::observed_distribution(table, o.n);
  const auto mb = stats::maxwell_boltzmann(obs.n_total);
  const auto be = stats::bose_einstein(obs.n_total);
  const auto r = stats::closest_model(obs);

  fmt::print("{:>3}  {:<32} {:>12} {:>8} {:>8} {:>8}\n", "n", "label", "count", "obs", "BE", "MB");
  for (std::size_t n = 0; n < table.size(); ++n) {
    fmt::print("{:>3}  {:<32} {:>12} {:>8.4f} {:>8.4f} {:>8.4f}\n", n, table.entries()[n].label,
               table.entries()[n].count, obs.probs[n], be.probs[n], mb.probs[n]);
  }
  fmt::print("TV(obs, BE) = {:.4f}\n", r.tv_bose_einstein);
  fmt::print("TV(obs, MB) = {:.4f}\n", r.tv_maxwell_boltzmann);
  fmt::print("KL(obs, BE) = {:.4f}\n", r.kl_bose_einstein);
  fmt::print("KL(obs, MB) = {:.4f}\n", r.kl_maxwell_boltzmann);
  fmt::print("verdict     = {}\n", stats::to_string(r.verdict));

  if (!o.report.empty()) {
    nlohmann::ordered_json j;
    j["N"] = r.n_total;
    std::vector<double> po, pb, pm;
    for (std::size_t n = 0; n < obs.probs.size(); ++n) {
      po.push_back(round12(obs.probs[n]));
      pb.push_back(round12(be.probs[n]));
      pm.push_back(round12(mb.probs[n]));
    }
    j["observed"] = po;
    j["bose_einstein"] = pb;
    j["maxwell_boltzmann"] = pm;
    j["tv_bose_einstein"] = round12(r.tv_bose_einstein);
    j["tv_maxwell_boltzmann"] = round12(r.tv_maxwell_boltzmann);
    j["kl_bose_einstein"] = round12(r.kl_bose_einstein);
    j["kl_maxwell_boltzmann"] = round12(r.kl_maxwell_boltzmann);
    j["verdict"] = std::string(stats::to_string(r.verdict));
    write_text(o.report, qconcept::detail::shortest_floats(j.dump(2)) + "\n");
  }
  return kExitOk;
}

// ---- weights

int cmd_weights(const std::vector<std::uint64_t>& values) {
  if (values.size() < 2) throw CLI::ValidationError("--counts", "at least two counts are required");
  const auto w = counts::normalize(values);
  for (std::size_t i = 0; i < w.size(); ++i) fmt::print("w{} = {:.4f}\n", i + 1, w[i]);
  return kExitOk;
}

// ---- count

struct CountOptions {
  std::string corpus;
  std::string phrase;
  std::string provider;
  std::string param = "q";
  double timeout = 10.0;
  unsigned retries = 2;
  unsigned threads = 0;
};

int cmd_count(const CountOptions& o) {
  if (!o.corpus.empty()) {
    const auto c = counts::corpus_phrase_count(o.corpus, o.phrase, {o.threads});
    for (const auto& w : c.warnings) warn(w);
    fmt::print("{}\n", c.documents);
    fmt::print(stderr, "scanned {} files\n", c.scanned);
    return kExitOk;
  }
  if (o.provider.empty()) {
    throw CLI::ValidationError("count", fmt::format("give --corpus DIR or --provider URL (or set {})",
                                                    counts::kProviderEnvVar));
  }
  const counts::ProviderConfig config{o.provider, o.param, o.timeout, o.retries};
  fmt::print("{}\n", counts::provider_count(config, o.phrase));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-style models of concept combination data"};
  app.set_config("--config", "", "key=value file with option defaults; flags override it");
  app.require_subcommand(1);

  ChshOptions chsh_opts;
  auto* chsh = app.add_subcommand("chsh", "CHSH expectation values and S from a coincidence set");
  chsh->add_option("--set", chsh_opts.set, "coincidence-set JSON")->required();
  chsh->add_option("--report", chsh_opts.report, "write a JSON report here");

  ModelOptions model_opts;
  auto* model = app.add_subcommand("model", "build the disjunction vectors from label,muA,muB,muAB data");
  model->add_option("--data", model_opts.data, "disjunction CSV")->required();
  model->add_option("--out", model_opts.out, "model JSON output")->required();

  LandscapeOptions land_opts;
  auto* land = app.add_subcommand("landscape", "render field, classical, quantum and interference grids");
  land->add_option("--data", land_opts.data, "disjunction CSV")->required();
  land->add_option("--model", land_opts.model, "model JSON from `model`")->required();
  land->add_option("--outdir", land_opts.outdir, "output directory")->required();
  land->add_option("--grid", land_opts.grid, "resolution NXxNY")->capture_default_str();
  land->add_option("--extent", land_opts.extent, "x0,x1,y0,y1 (default: placements padded by 2 sigma)");
  land->add_option("--format", land_opts.format, "csv, pgm or both")
      ->check(CLI::IsMember({"csv", "pgm", "both"}))
      ->capture_default_str();
  land->add_option("--center-a", land_opts.center_a, "center of field A")->expected(2)->capture_default_str();
  land->add_option("--center-b", land_opts.center_b, "center of field B")->expected(2)->capture_default_str();
  land->add_option("--constant-phase", land_opts.constant_phase, "use this phase (deg) everywhere");
  land->add_option("--threads", land_opts.threads, "render threads, 0 = all cores");

  StatsOptions stats_opts;
  auto* st = app.add_subcommand("stats", "compare observed occupancy counts with BE and MB");
  st->add_option("--observed", stats_opts.observed, "label,count CSV with N+1 rows")->required();
  st->add_option("--n", stats_opts.n, "number of particles N (checked against the row count)");
  st->add_option("--report", stats_opts.report, "write a JSON report here");

  std::vector<std::uint64_t> weight_counts;
  auto* weights = app.add_subcommand("weights", "normalize counts into superposition weights");
  weights->add_option("--counts", weight_counts, "comma-separated counts")->required()->delimiter(',');

  CountOptions count_opts;
  auto* count = app.add_subcommand("count", "count documents containing a phrase");
  auto* corpus = count->add_option("--corpus", count_opts.corpus, "directory to scan recursively");
  count->add_option("--phrase", count_opts.phrase, "phrase to look for")->required();
  auto* provider =
      count->add_option("--provider", count_opts.provider, "http endpoint returning {\"count\": n}")
          ->envname(counts::kProviderEnvVar);
  corpus->excludes(provider);
  count->add_option("--param", count_opts.param, "query parameter name")->capture_default_str();
  count->add_option("--timeout", count_opts.timeout, "seconds per request")->capture_default_str();
  count->add_option("--retries", count_opts.retries, "extra attempts on transient failures")->capture_default_str();
  count->add_option("--threads", count_opts.threads, "scan threads, 0 = all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*chsh) return cmd_chsh(chsh_opts);
    if (*model) return cmd_model(model_opts);
    if (*land) return cmd_landscape(land_opts);
    if (*st) return cmd_stats(stats_opts);
    if (*weights) return cmd_weights(weight_counts);
    if (*count) return cmd_count(count_opts);
  } catch (const CLI::ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    fmt::print(stderr, "infeasible: {}\n", e.what());
    for (const auto& line : e.offenders()) fmt::print(stderr, "  {}\n", line);
    return kExitInfeasible;
  } catch (const ProviderError& e) {
    fmt::print(stderr, "provider error for '{}' at {}: {}\n", e.phrase(), e.endpoint(), e.what());
    return kExitData;
  } catch (const DataError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
