#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pal/bernoulli.hpp"
#include "pal/cli.hpp"
#include "pal/dpi.hpp"
#include "pal/errors.hpp"
#include "pal/gibbs.hpp"
#include "pal/parallel.hpp"
#include "pal/stein.hpp"
#include "pal/transport.hpp"
#include "pal/ustat.hpp"

namespace pal::cli {

namespace {

using json = nlohmann::json;

struct Outcome {
  json result = json::object();
  // rows for --format csv; empty means "one row of the scalar fields"
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  bool pass = true;
  std::string summary;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string csv_cell(const json& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string render_csv(const Outcome& o) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  };
  if (!o.csv_header.empty()) {
    line(o.csv_header);
    for (const auto& r : o.csv_rows) line(r);
    return os.str();
  }
  std::vector<std::string> head, row;
  for (const auto& [k, v] : o.result.items()) {
    if (v.is_structured()) continue;
    head.push_back(k);
    row.push_back(csv_cell(v));
  }
  line(head);
  line(row);
  return os.str();
}

json envelope(const std::string& command) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}};
}

int execute(const std::string& command, const CommonOptions& opt, const std::vector<std::string>& argv,
            const std::function<Outcome()>& body) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.threads > 0) set_thread_count(opt.threads);
  auto meta = [&](const std::string& status) {
    return json{{"command", command},
                {"argv", argv},
                {"status", status},
                {"threads", thread_count()},
                {"started_utc", started},
                {"finished_utc", utc_now()},
                {"elapsed_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  };
  auto fail = [&](const std::string& what) {
    std::cerr << command << ": error: " << what << "\n";
    json r = envelope(command);
    r["status"] = "failed";
    r["error"] = what;
    try {
      if (opt.format == Format::kCsv)
        emit(opt, "status,error\nfailed," + json(what).dump() + "\n", meta("failed"));
      else
        emit(opt, dump_json(r), meta("failed"));
    } catch (const std::exception& e) {
      std::cerr << command << ": " << e.what() << "\n";
    }
    return kExitUsage;
  };
  try {
    Outcome o = body();
    json r = envelope(command);
    r["status"] = "ok";
    r["verdict"] = o.pass ? "PASS" : "FAIL";
    r.update(o.result);
    o.result = r;
    emit(opt, opt.format == Format::kCsv ? render_csv(o) : dump_json(o.result), meta("ok"));
    std::cerr << command << ": " << (o.pass ? "PASS" : "FAIL") << (o.summary.empty() ? "" : " " + o.summary)
              << "\n";
    return o.pass ? kExitPass : kExitCheckFailed;
  } catch (const ConfigError& e) {
    return fail(e.what());
  } catch (const ParameterError& e) {
    return fail(e.what());
  } catch (const json::exception& e) {
    return fail(std::string("bad model file: ") + e.what());
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

std::string fmt(double v) { return format_number(v); }

// ---- model pieces ---------------------------------------------------------

PointPattern pattern_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("points must be an array of coordinate arrays");
  PointPattern p;
  for (const auto& x : j) p.points.push_back(x.get<Point>());
  return p;
}

std::vector<PartitionSpec> partitions_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("'partitions' must be a non-empty array");
  std::vector<PartitionSpec> out;
  for (const auto& p : j) out.push_back(partition_from_json(p));
  return out;
}

// grids with 1, 2 and 4 cells per axis
std::vector<PartitionSpec> default_grids(const Box& w) {
  std::vector<PartitionSpec> out;
  for (int c : {1, 2, 4}) out.push_back(grid_partition(w, std::vector<int>(w.dim(), c)));
  return out;
}

CountSource ustat_source(std::shared_ptr<const UStatModel> model) {
  return CountSource::sampled([model](Rng& rng) {
    return build_ustat_process(sample_poisson_process(model->base(), rng), *model);
  });
}

CountSource ustat_poisson_target(std::shared_ptr<const UStatModel> model, double eps) {
  return CountSource::poisson(
      [model](const Region& r) {
        const auto* b = std::get_if<Box>(&r);
        if (!b) throw ParameterError("U-statistic partitions must consist of boxes");
        return model->intensity(*b);
      },
      model->total_intensity(), eps);
}

CountSource source_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("source must be an object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : j.items())
      if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end())
        throw ConfigError("source '" + kind + "': unknown key '" + k + "'");
    for (const char* k : keys)
      if (!j.contains(k)) throw ConfigError("source '" + kind + "': missing key '" + std::string(k) + "'");
  };
  if (kind == "fixed") {
    only({"kind", "points"});
    return CountSource::fixed(pattern_from_json(j.at("points")));
  }
  if (kind == "poisson") {
    only({"kind", "intensity"});
    return CountSource::poisson(IntensityMeasure::from_json(j.at("intensity")));
  }
  if (kind == "gibbs") {
    only({"kind", "model"});
    const GibbsModel g = GibbsModel::from_json(j.at("model"));
    return CountSource::sampled([g](Rng& rng) { return sample_gibbs(g, rng); });
  }
  if (kind == "ustat") {
    only({"kind", "model"});
    return ustat_source(ustat_model_from_json(j.at("model")));
  }
  throw ConfigError("unknown source kind '" + kind + "'");
}

json partition_rows(const DpiEstimate& e, Outcome& o) {
  json rows = json::array();
  o.csv_header = {"partition", "wasserstein", "wasserstein_truncation", "total_variation",
                  "total_variation_truncation"};
  for (std::size_t i = 0; i < e.per_partition.size(); ++i) {
    const auto& p = e.per_partition[i];
    rows.push_back({{"wasserstein", p.wasserstein},
                    {"wasserstein_truncation", p.wasserstein_truncation},
                    {"total_variation", p.total_variation},
                    {"total_variation_truncation", p.total_variation_truncation}});
    o.csv_rows.push_back({std::to_string(i), fmt(p.wasserstein), fmt(p.wasserstein_truncation),
                          fmt(p.total_variation), fmt(p.total_variation_truncation)});
  }
  return rows;
}

bool tv_below_w(const DpiEstimate& e) {
  for (const auto& p : e.per_partition)
    if (p.total_variation > p.wasserstein + p.total_variation_truncation + 1e-9) return false;
  return true;
}

BernoulliArrayModel bernoulli_from_options(const std::string& model_path, const std::string& random,
                                           std::uint64_t seed) {
  if (model_path.empty() == random.empty()) throw ConfigError("give exactly one of --model and --random");
  if (!model_path.empty()) {
    const json j = load_model(model_path, {"n", "d", "p", "m", "family_params"}, {"n", "d", "p", "m"});
    return bernoulli_model_from_json(j);
  }
  int n = 0, d = 0, m = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(random);
  if (!(is >> n >> c1 >> d >> c2 >> m) || c1 != ':' || c2 != ':' || !is.eof() || n < 1 || d < 1 || m < 0)
    throw ConfigError("--random must look like n:d:m");
  // rows with sum uniform in [0, 0.4], split by uniform weights
  Rng rng = make_stream(seed, 0);
  ProbMatrix p(n, std::vector<double>(d));
  for (auto& row : p) {
    double s = 0.0;
    for (auto& v : row) s += (v = uniform01(rng) + 1e-3);
    const double total = 0.4 * uniform01(rng);
    for (auto& v : row) v *= total / s;
  }
  return make_sliding_min_model(std::move(p), m);
}

// ---- subcommands ----------------------------------------------------------

Outcome stein_check(const CommonOptions& opt, const std::string& grid_spec, const std::string& g_spec, int range,
                    double tol_magic, double tol_residual) {
  const std::vector<double> grid = parse_grid(grid_spec);
  const int g_count = parse_random_count(g_spec);
  for (double l : grid)
    if (!(l > 0.0)) throw ConfigError("lambda grid values must be > 0");
  const auto rows = stein_check_grid(grid, g_count, range, opt.seed, Exec::kParallel);
  Outcome o;
  double max_abs = 0.0, max_delta = 0.0, max_res = 0.0;
  json jrows = json::array();
  o.csv_header = {"lambda", "g_id", "sup_abs", "sup_delta", "residual"};
  for (const auto& r : rows) {
    max_abs = std::max(max_abs, r.sup_abs);
    max_delta = std::max(max_delta, r.sup_delta);
    max_res = std::max(max_res, r.residual);
    jrows.push_back({{"lambda", r.lambda},
                     {"g_id", r.g_id},
                     {"sup_abs", r.sup_abs},
                     {"sup_delta", r.sup_delta},
                     {"residual", r.residual}});
    o.csv_rows.push_back({fmt(r.lambda), std::to_string(r.g_id), fmt(r.sup_abs), fmt(r.sup_delta), fmt(r.residual)});
  }
  o.pass = max_abs <= 1.0 + tol_magic && max_delta <= 1.0 + tol_magic && max_res <= tol_residual;
  o.result = {{"seed", opt.seed},          {"range", range},          {"g_count", g_count},
              {"lambdas", grid},           {"max_sup_abs", max_abs},  {"max_sup_delta", max_delta},
              {"max_residual", max_res},   {"tol_magic", tol_magic},  {"tol_residual", tol_residual},
              {"rows", jrows}};
  o.summary = "max sup|ghat| " + fmt(max_abs) + ", max sup|dghat| " + fmt(max_delta);
  return o;
}

Outcome bernoulli_bound(const CommonOptions& opt, const std::string& model_path, const std::string& random) {
  const BernoulliArrayModel model = bernoulli_from_options(model_path, random, opt.seed);
  QOptions qo;
  qo.seed = opt.seed;
  if (opt.reps > 0) qo.mc_samples = opt.reps;
  const auto q = q_factors(model, qo, Exec::kParallel);
  Outcome o;
  json qv = json::array(), qse = json::array();
  bool exact = true;
  o.csv_header = {"k", "Q", "Q_std_error"};
  for (std::size_t k = 0; k < q.size(); ++k) {
    qv.push_back(q[k].value);
    qse.push_back(q[k].std_error);
    exact = exact && q[k].exact;
    o.csv_rows.push_back({std::to_string(k + 1), fmt(q[k].value), fmt(q[k].std_error)});
  }
  const double bound = mdep_bound(model, q), cor = corollary_bound(model.p);
  o.result = {{"n", model.n},         {"d", model.d},   {"m", model.m},        {"bound", bound},
              {"corollary_bound", cor}, {"Q", qv},      {"Q_std_error", qse},  {"Q_exact", exact}};
  o.summary = "bound " + fmt(bound);
  return o;
}

Outcome bernoulli_verify(const CommonOptions& opt, const std::string& model_path, const std::string& random,
                         int bootstrap) {
  const BernoulliArrayModel model = bernoulli_from_options(model_path, random, opt.seed);
  const PoissonVectorParams lam = model.lambdas();
  QOptions qo;
  qo.seed = derive_seed(opt.seed, 3);
  const double bound = mdep_bound(model, q_factors(model, qo, Exec::kParallel));
  const double cor = corollary_bound(model.p);
  Outcome o;
  double distance, err = 0.0, se = 0.0;
  bool exact = model.m == 0;
  if (exact) {
    const DistanceResult w = wasserstein_l1(bernoulli_sum_pmf(model.p), poisson_vector_pmf(lam, 1e-12));
    distance = w.value;
    err = w.truncation_error;
    o.pass = distance <= bound + err;
  } else {
    const std::uint64_t reps = opt.reps > 0 ? opt.reps : 100000;
    const SampleBatch batch = sample_mdep_sums(model, reps, derive_seed(opt.seed, 1), Exec::kParallel);
    const EmpiricalDistance d = empirical_poisson_distance(batch, lam, bootstrap, derive_seed(opt.seed, 2));
    distance = d.value;
    err = d.truncation_error;
    se = d.std_error;
    o.pass = distance <= bound + 3.0 * se + err;
  }
  o.result = {{"n", model.n},
              {"d", model.d},
              {"m", model.m},
              {"exact", exact},
              {"distance", distance},
              {"distance_truncation", err},
              {"std_error", se},
              {"bound", bound},
              {"corollary_bound", cor},
              {"lambdas", lam.lambdas}};
  o.summary = "d_W " + fmt(distance) + " vs bound " + fmt(bound);
  return o;
}

Outcome ustat_bound_cmd(const CommonOptions& opt, const std::string& model_path, int bootstrap) {
  const json j = load_model(model_path, {"model", "partitions"}, {"model"});
  const auto model = ustat_model_from_json(j.at("model"));
  const UStatBound b = ustat_bound(*model);
  const auto parts = j.contains("partitions") ? partitions_from_json(j.at("partitions")) : default_grids(model->y_window());
  DpiOptions d;
  d.reps = opt.reps > 0 ? opt.reps : 20000;
  d.seed = opt.seed;
  d.bootstrap = bootstrap;
  const DpiEstimate e = dpi_lower_bound(ustat_source(model), ustat_poisson_target(model, 1e-10), parts, d);
  Outcome o;
  const json rows = partition_rows(e, o);
  o.pass = e.estimate <= b.value + b.error + 3.0 * e.std_error;
  o.result = {{"order", model->order()},
              {"R", b.r.value},
              {"R_error", b.r.error},
              {"R_per_split", b.r.per_split},
              {"bound", b.value},
              {"bound_error", b.error},
              {"intensity_total", model->total_intensity()},
              {"estimate", e.estimate},
              {"std_error", e.std_error},
              {"best_partition", e.best_partition},
              {"reps", d.reps},
              {"per_partition", rows}};
  o.summary = "estimate " + fmt(e.estimate) + " vs bound " + fmt(b.value);
  return o;
}

Outcome papangelou_bound_cmd(const CommonOptions& opt, const std::string& model_path, int bootstrap) {
  const json j = load_model(model_path, {"gibbs", "target", "partitions"}, {"gibbs"});
  const GibbsModel g = GibbsModel::from_json(j.at("gibbs"));
  const IntensityMeasure f =
      j.contains("target") ? IntensityMeasure::from_json(j.at("target")) : IntensityMeasure::constant(g.window, g.beta);
  const auto parts = j.contains("partitions") ? partitions_from_json(j.at("partitions")) : default_grids(g.window);
  const std::uint64_t reps = opt.reps > 0 ? opt.reps : 10000;
  PapangelouOptions po;
  po.reps = reps;
  po.seed = derive_seed(opt.seed, 1);
  const PapangelouReport b = papangelou_bound(g, f, po);
  DpiOptions d;
  d.reps = reps;
  d.seed = derive_seed(opt.seed, 2);
  d.bootstrap = bootstrap;
  const DpiEstimate e =
      dpi_lower_bound(CountSource::sampled([g](Rng& rng) { return sample_gibbs(g, rng); }), CountSource::poisson(f), parts, d);
  Outcome o;
  const json rows = partition_rows(e, o);
  const double slack = 3.0 * std::hypot(e.std_error, b.std_error) + b.quadrature_error;
  o.pass = e.estimate <= b.estimate + slack;
  o.result = {{"bound", b.estimate},
              {"bound_std_error", b.std_error},
              {"bound_quadrature_error", b.quadrature_error},
              {"estimate", e.estimate},
              {"std_error", e.std_error},
              {"best_partition", e.best_partition},
              {"reps", reps},
              {"per_partition", rows}};
  o.summary = "estimate " + fmt(e.estimate) + " vs bound " + fmt(b.estimate);
  return o;
}

Outcome gnz_check_cmd(const CommonOptions& opt, const std::string& model_path, double threshold, int inner) {
  const json j = load_model(model_path, {"gibbs", "test_function"}, {"gibbs"});
  const GibbsModel g = GibbsModel::from_json(j.at("gibbs"));
  const GnzTestFunction u =
      gnz_test_from_json(j.contains("test_function") ? j.at("test_function") : json{{"kind", "one"}});
  GnzOptions go;
  go.reps = opt.reps > 0 ? opt.reps : 100000;
  go.seed = opt.seed;
  go.inner_points = inner;
  const GnzReport r = gnz_check(g, u, go);
  Outcome o;
  o.pass = std::abs(r.z_score) <= threshold;
  o.result = {{"lhs", r.lhs},           {"rhs", r.rhs},     {"std_error", r.std_error}, {"z_score", r.z_score},
              {"threshold", threshold}, {"reps", go.reps}};
  o.summary = "z " + fmt(r.z_score);
  return o;
}

Outcome dpi_estimate_cmd(const CommonOptions& opt, const std::string& model_path, int bootstrap) {
  const json j = load_model(model_path, {"xi", "eta", "partitions"}, {"xi", "eta", "partitions"});
  DpiOptions d;
  d.reps = opt.reps > 0 ? opt.reps : 20000;
  d.seed = opt.seed;
  d.bootstrap = bootstrap;
  const DpiEstimate e =
      dpi_lower_bound(source_from_json(j.at("xi")), source_from_json(j.at("eta")), partitions_from_json(j.at("partitions")), d);
  Outcome o;
  const json rows = partition_rows(e, o);
  o.pass = tv_below_w(e);
  o.result = {{"estimate", e.estimate},
              {"std_error", e.std_error},
              {"best_partition", e.best_partition},
              {"mean_shift", e.mean_shift},
              {"exact", e.exact},
              {"lower_bound_only", true},
              {"per_partition", rows}};
  o.summary = "d_pi >= " + fmt(e.estimate);
  return o;
}

Outcome distance_cmd(const CommonOptions&, const std::string& model_path, const std::string& flow_path) {
  const json j = load_model(model_path, {"p", "q"}, {"p", "q"});
  const LatticePmf p = lattice_pmf_from_json(j.at("p")), q = lattice_pmf_from_json(j.at("q"));
  TransportOptions to;
  to.want_flow = !flow_path.empty();
  const DistanceResult w = wasserstein_l1(p, q, to);
  const DistanceResult tv = total_variation(p, q);
  if (!flow_path.empty()) {
    std::ofstream f(flow_path);
    if (!f) throw ConfigError("cannot write '" + flow_path + "'");
    write_flow_csv(f, *w.flow);
  }
  Outcome o;
  o.pass = tv.value <= w.value + tv.truncation_error + 1e-9;
  o.result = {{"wasserstein", w.value},
              {"wasserstein_truncation", w.truncation_error},
              {"total_variation", tv.value},
              {"total_variation_truncation", tv.truncation_error}};
  o.summary = "d_W " + fmt(w.value);
  return o;
}

void add_common(CLI::App* sub, CommonOptions& opt, bool reps = true) {
  sub->add_option("--seed", opt.seed, "64-bit seed")->capture_default_str();
  if (reps) sub->add_option("--reps", opt.reps, "Monte Carlo replicates (0: command default)")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", opt.out, "output file (default stdout); timing goes to <out>.meta.json");
  sub->add_option("--format", opt.format, "json or csv")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"json", Format::kJson}, {"csv", Format::kCsv}}));
  sub->add_option("--threads", opt.threads, "worker threads (default PAL_THREADS, else all)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Poisson approximation bounds, exact distances and point process checks"};
  app.require_subcommand(1);
  const std::vector<std::string> args(argv, argv + argc);
  CommonOptions opt;
  std::string model, random, flow;
  int bootstrap = 20;
  std::function<int()> action;

  auto* stein = app.add_subcommand("stein-check", "solve the Stein equation over a (lambda, g) grid");
  add_common(stein, opt, false);
  std::string grid = "0.1:10:25", gspec = "random:200";
  int range = 300;
  double tol_magic = 1e-12, tol_residual = 1e-10;
  stein->add_option("--lambda-grid", grid, "a:b:n")->capture_default_str();
  stein->add_option("--g", gspec, "random:K")->capture_default_str();
  stein->add_option("--range", range, "largest argument N of g")->capture_default_str()->check(CLI::PositiveNumber);
  stein->add_option("--tol-magic", tol_magic)->capture_default_str();
  stein->add_option("--tol-residual", tol_residual)->capture_default_str();
  stein->callback([&] {
    action = [&] { return execute("stein-check", opt, args, [&] {
      return stein_check(opt, grid, gspec, range, tol_magic, tol_residual);
    }); };
  });

  for (const char* name : {"bernoulli-bound", "bernoulli-verify"}) {
    auto* sub = app.add_subcommand(name, std::string(name) == "bernoulli-bound"
                                             ? "m-dependent and independent-row bounds for a Bernoulli array"
                                             : "compare the bound with d_W (exact for m = 0, sampled otherwise)");
    add_common(sub, opt);
    sub->add_option("--model", model, "model JSON file");
    sub->add_option("--random", random, "random instance n:d:m with row sums <= 0.4");
    if (std::string(name) == "bernoulli-verify") sub->add_option("--bootstrap", bootstrap)->capture_default_str();
    const std::string cmd = name;
    sub->callback([&, cmd] {
      action = [&, cmd] { return execute(cmd, opt, args, [&] {
        return cmd == "bernoulli-bound" ? bernoulli_bound(opt, model, random)
                                        : bernoulli_verify(opt, model, random, bootstrap);
      }); };
    });
  }

  double threshold = 4.0;
  int inner = 64;
  for (const char* name : {"ustat-bound", "papangelou-bound", "dpi-estimate", "gnz-check", "distance"}) {
    const std::string cmd = name;
    auto* sub = app.add_subcommand(cmd);
    add_common(sub, opt, cmd != "distance");
    sub->add_option("--model", model, "model JSON file")->required();
    if (cmd == "ustat-bound" || cmd == "papangelou-bound" || cmd == "dpi-estimate")
      sub->add_option("--bootstrap", bootstrap)->capture_default_str();
    if (cmd == "gnz-check") {
      sub->add_option("--z-threshold", threshold)->capture_default_str();
      sub->add_option("--inner-points", inner)->capture_default_str()->check(CLI::PositiveNumber);
    }
    if (cmd == "distance") sub->add_option("--flow", flow, "write the optimal flow as CSV");
    sub->callback([&, cmd] {
      action = [&, cmd] { return execute(cmd, opt, args, [&]() -> Outcome {
        if (cmd == "ustat-bound") return ustat_bound_cmd(opt, model, bootstrap);
        if (cmd == "papangelou-bound") return papangelou_bound_cmd(opt, model, bootstrap);
        if (cmd == "dpi-estimate") return dpi_estimate_cmd(opt, model, bootstrap);
        if (cmd == "gnz-check") return gnz_check_cmd(opt, model, threshold, inner);
        return distance_cmd(opt, model, flow);
      }); };
    });
  }
  app.get_subcommand("ustat-bound")->description("U-statistic process: 2^{k+1} R / k! against sampled d_W");
  app.get_subcommand("papangelou-bound")->description("Gibbs process: int E|c - f| against sampled d_W");
  app.get_subcommand("dpi-estimate")->description("lower bound on d_pi over a family of partitions");
  app.get_subcommand("gnz-check")->description("both sides of the GNZ equation with a z-score");
  app.get_subcommand("distance")->description("exact d_W and d_TV between two lattice pmfs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  return action ? action() : kExitUsage;
}

}  // namespace pal::cli
