// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance            run all nine
//   acceptance --only N   run criterion N
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <sys/wait.h>
#include <unistd.h>

#include "qconcept/bell.hpp"
#include "qconcept/counts.hpp"
#include "qconcept/hilbert.hpp"
#include "qconcept/landscape.hpp"
#include "qconcept/stats.hpp"
#include "support/reference_data.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace qconcept;
namespace ref = qconcept::testing;

namespace {

// Tolerances, pinned.
constexpr double kTolPhraseS = 5e-4;
constexpr double kTolPairS = 5e-4;
constexpr double kTolProductS = 1e-3;
constexpr double kTolLemma = 1e-12;
constexpr double kTolLambda = 5e-4;
constexpr double kTolThetaDeg = 0.2;
constexpr double kTolCm = 0.01;
constexpr double kTolBetaMDeg = 2.5;
constexpr double kTolVecA = 5e-4;
constexpr double kTolExact = 1e-9;
constexpr double kTolStatsProb = 1e-4;
constexpr double kTolWeights = 1e-4;
constexpr double kBudgetChshMs = 1.0;
constexpr double kBudgetModelMs = 10.0;
constexpr double kBudgetStatsMs = 1.0;

const fs::path kCli = QCONCEPT_CLI;
const fs::path kData = QCONCEPT_DATA_DIR;

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string note) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "!! ") + std::move(note));
  }
};

// Median wall time of `reps` calls, in ms.
template <class F>
double median_ms(F&& f, int reps = 51) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  std::nth_element(t.begin(), t.begin() + reps / 2, t.end());
  return t[reps / 2];
}

const counts::CoincidenceSet kPhraseSet{{1550, 457, 4240, 125}, {768, 6, 0, 36}, {1040, 364, 29, 2}, {3, 9, 2, 423}};
const counts::CoincidenceSet kPairSet{{752000, 13400000, 7580000, 1240000},
                                      {12500000, 2270000, 2970000, 1370000},
                                      {25100000, 2180000, 7070000, 3370000},
                                      {12500000, 5680000, 1690000, 611000}};

Verdict c1() {
  Verdict v;
  const double s = bell::chsh_from_set(kPhraseSet).s;
  v.check(std::abs(s - 2.8614) <= kTolPhraseS, fmt::format("S = {:.6f}, want 2.8614 +- {}", s, kTolPhraseS));
  volatile double sink = 0.0;
  const double ms = median_ms([&] { sink = bell::chsh_from_set(kPhraseSet).s; });
  v.check(ms < kBudgetChshMs, fmt::format("{:.4f} ms (< {} ms)", ms, kBudgetChshMs));
  return v;
}

Verdict c2() {
  Verdict v;
  const double s = bell::chsh_from_set(kPairSet).s;
  v.check(std::abs(s - 2.0680) <= kTolPairS, fmt::format("pairs S = {:.6f}, want 2.0680 +- {}", s, kTolPairS));
  const auto m = [](std::uint64_t a, std::uint64_t b) { return bell::MarginalPair::from_counts(a, b); };
  const double p = bell::chsh_from_marginals(m(98'000'000, 68'200'000), m(227'000'000, 28'200'000),
                                             m(90'900'000, 116'000'000), m(291'000'000, 60'500'000))
                       .s;
  v.check(std::abs(p - 0.5557) <= kTolProductS, fmt::format("product S = {:.6f}, want 0.5557 +- {}", p, kTolProductS));
  return v;
}

Verdict c3() {
  Verdict v;
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    bell::MarginalPair ms[4];
    for (auto& x : ms) {
      const double p = u(rng);
      x = {p, 1.0 - p};
    }
    const double s = std::abs(bell::chsh_from_marginals(ms[0], ms[1], ms[2], ms[3]).s);
    worst = std::max(worst, s);
    bad += s > 2.0 + kTolLemma;
  }
  v.check(bad == 0, fmt::format("10000 product models, max |S| = {:.15f}, {} over bound", worst, bad));
  const double s = bell::chsh_from_set(counts::load_coincidence_set(kData / "vessels.json")).s;
  v.check(s == 4.0, fmt::format("vessels S = {}", s));
  return v;
}

Verdict c4() {
  Verdict v;
  const auto d = ref::fruit_vegetable();
  const auto model = hilbert::build_model(d);

  int sign_miss = 0;
  double lambda_worst = 0.0, theta_worst = 0.0;
  std::string theta_label;
  std::vector<std::string> theta_misses;
  for (std::size_t k = 0; k < 24; ++k) {
    const auto& row = ref::kFruitVegetable[k];
    sign_miss += (model.signs[k] < 0) != (row.lambda < 0);
    lambda_worst = std::max(lambda_worst, std::abs(model.lambda[k] - row.lambda));
    if (k == model.m) continue;
    const double dt = std::abs(model.beta_deg[k] - row.theta_deg);
    if (dt > theta_worst) {
      theta_worst = dt;
      theta_label = std::string(row.label);
    }
    if (dt > kTolThetaDeg)
      theta_misses.push_back(fmt::format("{} {:.4f} vs {:.4f}", row.label, model.beta_deg[k], row.theta_deg));
  }
  v.check(sign_miss == 0, fmt::format("signs: {} of 24 differ", sign_miss));
  v.check(lambda_worst <= kTolLambda, fmt::format("lambda worst |diff| = {:.2e} (<= {})", lambda_worst, kTolLambda));
  v.check(theta_misses.empty(), fmt::format("theta worst |diff| = {:.4f} deg at {} (<= {}){}", theta_worst, theta_label,
                                            kTolThetaDeg,
                                            theta_misses.empty() ? "" : "; misses: " + fmt::to_string(fmt::join(theta_misses, ", "))));
  v.check(model.m == ref::kTomato, fmt::format("m = {} ({})", model.m + 1, model.labels[model.m]));
  v.check(std::abs(model.c_m - ref::kPublishedCm) <= kTolCm, fmt::format("c_m = {:.4f}, want {} +- {}", model.c_m, ref::kPublishedCm, kTolCm));
  const double beta_m = model.beta_deg[model.m];
  v.check(std::abs(beta_m - ref::kPublishedBetaM) <= kTolBetaMDeg,
          fmt::format("beta_m = {:.4f}, want {} +- {}", beta_m, ref::kPublishedBetaM, kTolBetaMDeg));
  double vec_worst = 0.0;
  for (std::size_t k = 0; k < 25; ++k)
    vec_worst = std::max(vec_worst, std::abs(model.vec_a[k] - std::complex<double>(ref::kPublishedVecA[k], 0.0)));
  v.check(vec_worst <= kTolVecA, fmt::format("|A> worst |diff| = {:.2e} (<= {})", vec_worst, kTolVecA));

  const auto raw = ref::fruit_vegetable_raw();
  volatile double sink = 0.0;
  const double ms = median_ms([&] { sink = hilbert::build_model(hilbert::prepare(raw)).c_m; });
  v.check(ms < kBudgetModelMs, fmt::format("{:.4f} ms (< {} ms)", ms, kBudgetModelMs));
  return v;
}

Verdict c5() {
  Verdict v;
  const auto d = ref::fruit_vegetable();
  const auto model = hilbert::build_model(d);
  const double na = std::abs(hilbert::norm(model.vec_a) - 1.0), nb = std::abs(hilbert::norm(model.vec_b) - 1.0);
  const double ip = std::abs(hilbert::inner_product(model.vec_a, model.vec_b));
  double res = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k)
    res = std::max(res, std::abs(hilbert::reconstruct_disjunction(model, k) - d.mu_ab[k]));
  v.check(na <= kTolExact && nb <= kTolExact, fmt::format("norm deviations {:.1e}, {:.1e}", na, nb));
  v.check(ip <= kTolExact, fmt::format("|<A|B>| = {:.1e}", ip));
  v.check(res <= kTolExact, fmt::format("max reconstruction residual {:.1e}", res));

  std::mt19937_64 rng(99);
  int failed = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = hilbert::prepare(ref::synthetic(rng));
    const auto r = hilbert::verify_model(hilbert::build_model(s), s);
    worst = std::max({worst, r.max_residual, r.inner_product_modulus, r.norm_a_deviation, r.norm_b_deviation});
    failed += !r.pass;
  }
  v.check(failed == 0, fmt::format("1000 synthetic round trips: {} failed, worst {:.1e}", failed, worst));
  return v;
}

Verdict c6() {
  using namespace landscape;
  Verdict v;
  const auto d = ref::fruit_vegetable();
  const auto model = hilbert::build_model(d);
  const auto fields = fit_fields(d);
  const auto placements = place_exemplars(d, fields);
  const auto field = phase_field(placements, effective_phases(d, model));

  const auto at = [&](std::string_view label) {
    const auto it = std::find(placements.labels.begin(), placements.labels.end(), label);
    return placements.items[static_cast<std::size_t>(it - placements.labels.begin())].position;
  };
  const Point apple = at("Apple"), broccoli = at("Broccoli");
  v.check(distance(apple, {0, 0}) <= kTolExact, fmt::format("Apple at ({:.9f}, {:.9f})", apple.x, apple.y));
  v.check(distance(broccoli, {10, 4}) <= kTolExact, fmt::format("Broccoli at ({:.9f}, {:.9f})", broccoli.x, broccoli.y));

  std::size_t exact = 0;
  double wq = 0.0, wc = 0.0;
  for (std::size_t k = 0; k < placements.size(); ++k) {
    if (!placements.items[k].exact) continue;
    ++exact;
    const Point p = placements.items[k].position;
    wq = std::max(wq, std::abs(quantum_intensity(fields, field, p) - d.mu_ab[k]));
    wc = std::max(wc, std::abs(classical_intensity(fields, p) - 0.5 * (d.mu_a[k] + d.mu_b[k])));
  }
  v.check(exact > 0, fmt::format("{} of {} placements exact", exact, placements.size()));
  v.check(wq <= kTolExact, fmt::format("quantum vs mu(A or B) worst {:.1e}", wq));
  v.check(wc <= kTolExact, fmt::format("classical vs average worst {:.1e}", wc));

  const auto flat_field = phase_field(placements, std::vector<double>(placements.size(), 90.0));
  const auto extent = default_extent(placements, fields);
  const auto q = render(fields, flat_field, extent, {400, 300}, GridKind::quantum);
  const auto c = render(fields, flat_field, extent, {400, 300}, GridKind::classical);
  v.check(q.values == c.values, "theta = 90 everywhere: quantum grid == classical grid (400x300, bitwise)");
  return v;
}

Verdict c7() {
  Verdict v;
  const auto mb = stats::maxwell_boltzmann(11);
  const auto be = stats::bose_einstein(11);
  bool counts_ok = true;
  double pw = 0.0, bw = 0.0;
  for (unsigned n = 0; n <= 11; ++n) {
    counts_ok = counts_ok && stats::binomial_exact(11, n) == ref::kBinomial11[n] &&
                stats::binomial_row(11)[n] == static_cast<double>(ref::kBinomial11[n]);
    pw = std::max(pw, std::abs(mb.probs[n] - ref::kBinomial11Probs[n]));
    bw = std::max(bw, std::abs(be.probs[n] - 0.0833));
  }
  v.check(counts_ok, "MB(11) counts exact");
  v.check(pw <= kTolStatsProb, fmt::format("MB(11) probabilities worst {:.1e}", pw));
  v.check(bw <= kTolStatsProb, fmt::format("BE(11) worst |p - 0.0833| {:.1e}", bw));

  const auto table = counts::load_count_table(kData / "table2_google.csv");
  const auto report = stats::closest_model(stats::observed_distribution(table, 11u));
  v.check(report.tv_bose_einstein < report.tv_maxwell_boltzmann,
          fmt::format("TV(obs, BE) = {:.4f} < TV(obs, MB) = {:.4f}", report.tv_bose_einstein, report.tv_maxwell_boltzmann));

  volatile double sink = 0.0;
  const double ms = median_ms([&] {
    const auto obs = stats::observed_distribution(table, 11u);
    sink = stats::closest_model(obs).tv_bose_einstein;
  });
  v.check(ms < kBudgetStatsMs, fmt::format("{:.4f} ms (< {} ms)", ms, kBudgetStatsMs));
  return v;
}

Verdict c8() {
  Verdict v;
  const auto w = counts::normalize(std::vector<std::uint64_t>{495000, 29400});
  v.check(std::abs(w[0] - 0.9439) <= kTolWeights && std::abs(w[1] - 0.0561) <= kTolWeights,
          fmt::format("weights ({:.6f}, {:.6f})", w[0], w[1]));
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict c9() {
  Verdict v;
  const fs::path dir = fs::temp_directory_path() / fmt::format("qconcept_accept_{}", ::getpid());
  fs::create_directories(dir / "corpus" / "sub");
  std::ofstream(dir / "corpus" / "a.txt") << "The cat eats grass.";
  std::ofstream(dir / "corpus" / "sub" / "b.txt") << "the Cat  eats\ngrass";
  std::ofstream(dir / "corpus" / "c.txt") << "the horse eats grass";

  const auto data = [](const char* f) { return (kData / f).string(); };
  struct Case {
    std::string name;
    std::string args;            // `{out}` expands to the per-run output dir
    std::vector<std::string> files;
  };
  const std::vector<Case> cases{
      {"chsh", fmt::format("chsh --set {} --report {{out}}/r.json", data("sentences.json")), {"r.json"}},
      {"model", fmt::format("model --data {} --out {{out}}/model.json", data("table1.csv")), {"model.json"}},
      {"landscape",
       fmt::format("landscape --data {} --model {} --outdir {{out}}/grid --format both", data("table1.csv"),
                   (dir / "model.json").string()),
       {"grid/field_a.csv", "grid/field_b.csv", "grid/classical.csv", "grid/quantum.csv", "grid/interference.csv",
        "grid/field_a.pgm", "grid/field_b.pgm", "grid/classical.pgm", "grid/quantum.pgm", "grid/interference.pgm",
        "grid/placements.csv"}},
      {"stats", fmt::format("stats --observed {} --n 11 --report {{out}}/s.json", data("table2_google.csv")), {"s.json"}},
      {"weights", "weights --counts 495000,29400", {}},
      {"count", fmt::format("count --corpus {} --phrase 'cat eats grass' --threads 4", (dir / "corpus").string()), {}},
  };

  // landscape reads a model produced up front
  const int setup = std::system(fmt::format("'{}' model --data {} --out {} > /dev/null 2>&1", kCli.string(), data("table1.csv"),
                          (dir / "model.json").string())
                  .c_str());
  v.check(setup == 0, "model for the landscape case written");

  for (const auto& c : cases) {
    std::string first_out;
    std::vector<std::string> first_files;
    bool same = true;
    int code = 0;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / fmt::format("run{}", run);
      fs::create_directories(out);
      std::string args = c.args;
      for (std::size_t pos; (pos = args.find("{out}")) != std::string::npos;) args.replace(pos, 5, out.string());
      const int status =
          std::system(fmt::format("'{}' {} > '{}' 2>/dev/null", kCli.string(), args, (out / "stdout").string()).c_str());
      code = std::max(code, WIFEXITED(status) ? WEXITSTATUS(status) : 255);
      const auto stdout_text = slurp(out / "stdout");
      if (run == 0) {
        first_out = stdout_text;
        for (const auto& f : c.files) first_files.push_back(slurp(out / f));
      } else {
        same = same && stdout_text == first_out;
        for (std::size_t i = 0; i < c.files.size(); ++i) same = same && slurp(out / c.files[i]) == first_files[i];
      }
    }
    std::size_t bytes = first_out.size();
    for (const auto& f : first_files) bytes += f.size();
    v.check(code == 0 && same && bytes > 0,
            fmt::format("{}: exit {}, {} bytes compared, {}", c.name, code, bytes, same ? "identical" : "DIFFER"));
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return v;
}

struct Criterion {
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"CHSH phrase pipeline", c1},
      {"CHSH pair and product-marginal pipelines", c2},
      {"product models respect the bound; vessels S = 4", c3},
      {"disjunction model on the fruit/vegetable table", c4},
      {"model self-consistency and synthetic round trips", c5},
      {"landscape placement and intensity properties", c6},
      {"occupancy statistics", c7},
      {"exemplar weights", c8},
      {"CLI determinism", c9},
  };
  std::size_t only = 0;
  if (argc == 3 && std::string(argv[1]) == "--only") only = std::strtoul(argv[2], nullptr, 10);
  if (argc != 1 && (only == 0 || only > all.size())) {
    fmt::print(stderr, "usage: acceptance [--only N]   (1 <= N <= {})\n", all.size());
    return 1;
  }

  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only != 0 && only != i + 1) continue;
    Verdict v;
    try {
      v = all[i].run();
    } catch (const std::exception& e) {
      v.check(false, fmt::format("threw: {}", e.what()));
    }
    failed += !v.pass;
    fmt::print("{} C{} {}\n", v.pass ? "PASS" : "FAIL", i + 1, all[i].title);
    for (const auto& n : v.notes) fmt::print("       {}\n", n);
  }
  return failed == 0 ? 0 : 1;
}
