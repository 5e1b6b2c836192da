// zinfer: falsification, compatibility bounds, and sensitivity analysis for
// zero-inflated categorical data with an indicator proxy.
//
// Verbs: falsify | bounds | sensitivity | simulate | verify | nonid-demo
// Exit codes: 0 success / constraints pass, 1 input error, 2 model falsified
// or incompatible.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zinfer/bounds.hpp"
#include "zinfer/downstream.hpp"
#include "zinfer/estimate.hpp"
#include "zinfer/graph.hpp"
#include "zinfer/restore.hpp"
#include "zinfer/simulate.hpp"

using json = nlohmann::ordered_json;
using namespace zinfer;

namespace {

int g_precision = 6;

// round to the requested number of significant digits so reports are stable
// across runs and readable by default; --precision 17 keeps full precision
double rounded(double value) {
  if (g_precision >= 17 || value == 0.0 || !std::isfinite(value)) return value;
  std::ostringstream s;
  s.precision(g_precision);
  s << value;
  return std::stod(s.str());
}

std::string format_csv_value(double value) {
  std::ostringstream s;
  s.precision(g_precision);
  s << value;
  return s.str();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZViolation:
    case ErrorCode::SingularFactor:
    case ErrorCode::SingularChannel:
    case ErrorCode::IncompatibleChannel:
    case ErrorCode::FalsifiedModel:
    case ErrorCode::PositivityViolation:
    case ErrorCode::IncompatibleR0:
    case ErrorCode::DegenerateInterval:
    case ErrorCode::NoFeasiblePoint:
    case ErrorCode::EmptyInterval:
    case ErrorCode::DegenerateInit:
    case ErrorCode::InvalidM:
      return 2;
    default:
      return 1;
  }
}

// ---------------------------------------------------------------------------
// input loading
// ---------------------------------------------------------------------------

struct LoadedInput {
  std::optional<ObservedLaw> table_law;  // table input
  std::optional<RecordSet> records;      // record input
  bool is_records() const { return records.has_value(); }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  out.push_back(field);
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
  }
  return out;
}

int parse_int_field(const std::string& field, int lineno) {
  try {
    std::size_t used = 0;
    int value = std::stoi(field, &used);
    if (used != field.size() || value < 0)
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad value '" + field + "'");
    return value;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad value '" + field + "'");
  }
}

RecordSet load_records_csv(const std::string& path, int min_cell_count) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, path + " is empty (header required)");
  std::vector<std::string> header = split_csv_line(line);
  int x_col = -1, w_col = -1;
  std::vector<int> c_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = header[i];
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (name == "x")
      x_col = static_cast<int>(i);
    else if (name == "w")
      w_col = static_cast<int>(i);
    else if (!name.empty() && name.front() == 'c')
      c_cols.push_back(static_cast<int>(i));
    else
      fail(ErrorCode::ParseError, "unknown column '" + header[i] + "' (want x, w, c...)");
  }
  if (x_col < 0 || w_col < 0)
    fail(ErrorCode::ParseError, "header must name the x and w columns");

  std::vector<int> xs, ws;
  std::vector<std::vector<int>> cs(c_cols.size());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": wrong field count");
    xs.push_back(parse_int_field(fields[static_cast<std::size_t>(x_col)], lineno));
    ws.push_back(parse_int_field(fields[static_cast<std::size_t>(w_col)], lineno));
    for (std::size_t j = 0; j < c_cols.size(); ++j)
      cs[j].push_back(parse_int_field(fields[static_cast<std::size_t>(c_cols[j])], lineno));
  }
  if (xs.empty()) fail(ErrorCode::EmptyData, path + " has no data rows");

  RecordSet records;
  records.provenance = "external";
  records.x_card = std::max(2, *std::max_element(xs.begin(), xs.end()) + 1);
  records.w_card = 2;
  for (int w : ws)
    if (w > 1) fail(ErrorCode::ParseError, "w must be binary");

  // flatten covariate columns, first column most significant
  std::vector<int> cards(c_cols.size(), 1);
  for (std::size_t j = 0; j < c_cols.size(); ++j)
    cards[j] = *std::max_element(cs[j].begin(), cs[j].end()) + 1;
  int c_card = 1;
  for (int card : cards) c_card *= card;
  records.c_card = std::max(1, c_card);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    int flat = 0;
    for (std::size_t j = 0; j < c_cols.size(); ++j) flat = flat * cards[j] + cs[j][i];
    records.rows.push_back({xs[i], ws[i], flat});
  }

  // pool strata that are too small to estimate, with an explicit warning
  if (min_cell_count > 0 && records.c_card > 1) {
    std::vector<long> counts(static_cast<std::size_t>(records.c_card), 0);
    for (const auto& row : records.rows) ++counts[static_cast<std::size_t>(row.c)];
    std::vector<int> remap(static_cast<std::size_t>(records.c_card), -1);
    int next = 0;
    std::vector<int> pooled;
    for (int c = 0; c < records.c_card; ++c) {
      if (counts[static_cast<std::size_t>(c)] >= min_cell_count)
        remap[static_cast<std::size_t>(c)] = next++;
      else
        pooled.push_back(c);
    }
    if (!pooled.empty() && next > 0) {
      int pool_index = next;
      for (int c : pooled) remap[static_cast<std::size_t>(c)] = pool_index;
      for (auto& row : records.rows) row.c = remap[static_cast<std::size_t>(row.c)];
      records.c_card = pool_index + 1;
      std::ostringstream warning;
      warning << "warning: pooled " << pooled.size() << " strata with fewer than "
              << min_cell_count << " records into stratum " << pool_index;
      std::cerr << warning.str() << "\n";
    }
  }
  records.validate();
  return records;
}

ObservedLaw load_table_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    fail(ErrorCode::ParseError, std::string("bad JSON: ") + e.what());
  }
  if (!doc.contains("axes") || !doc.contains("probs"))
    fail(ErrorCode::ParseError, "table JSON needs 'axes' and 'probs'");
  std::vector<CategoricalSpace> axes;
  int xi = 0, wi = 0, ci = 0;
  for (const auto& axis : doc["axes"]) {
    std::string kind = axis.value("kind", "");
    int card = axis.value("cardinality", 0);
    if (card < 1) fail(ErrorCode::ParseError, "axis cardinality must be positive");
    if (kind == "recorded" || kind == "x")
      axes.push_back(CategoricalSpace::recorded(++xi, card));
    else if (kind == "proxy" || kind == "w")
      axes.push_back(CategoricalSpace::proxy(++wi));
    else if (kind == "covariate" || kind == "c")
      axes.push_back(CategoricalSpace::covariate(card, "C" + std::to_string(++ci)));
    else
      fail(ErrorCode::ParseError, "axis kind must be recorded | proxy | covariate");
    if (kind == "proxy" || kind == "w") {
      if (card != 2) fail(ErrorCode::ParseError, "proxy axes are binary");
    }
  }
  std::vector<double> probs;
  for (const auto& v : doc["probs"]) {
    if (!v.is_number()) fail(ErrorCode::ParseError, "probs must be numbers");
    probs.push_back(v.get<double>());
  }
  return build_observed_law(ProbTable(std::move(axes), std::move(probs)));
}

LoadedInput load_input(const std::string& path, int min_cell_count) {
  LoadedInput input;
  bool looks_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  if (!looks_json && !(path.size() > 4 && path.substr(path.size() - 4) == ".csv")) {
    std::ifstream sniff(path);
    char first = 0;
    sniff >> first;
    looks_json = first == '{';
  }
  if (looks_json)
    input.table_law = load_table_json(path);
  else
    input.records = load_records_csv(path, min_cell_count);
  return input;
}

// ---------------------------------------------------------------------------
// report rendering
// ---------------------------------------------------------------------------

json falsification_to_json(const FalsificationReport& report, long n) {
  json out;
  out["model"] = model_tag_name(report.model);
  out["tol"] = rounded(report.tol);
  if (n > 0) out["n"] = n;
  out["pass"] = report.pass;
  out["max_residual"] = rounded(report.max_residual());
  json checks = json::array();
  for (const auto& c : report.checks) {
    json item;
    item["id"] = c.constraint_id;
    item["indicator"] = c.indicator;
    if (c.stratum >= 0) item["stratum"] = c.stratum;
    item["residual"] = rounded(c.residual);
    checks.push_back(std::move(item));
  }
  out["checks"] = std::move(checks);
  out["skipped_cells"] = report.skipped_cells;
  return out;
}

json interval_to_json(const BoundInterval& iv) {
  json out;
  out["interval"] = {rounded(iv.lower), rounded(iv.upper)};
  out["lower_open"] = iv.lower_open;
  out["upper_open"] = iv.upper_open;
  out["no_inflation"] = iv.no_inflation;
  if (iv.excluded_point) out["excluded_point"] = rounded(*iv.excluded_point);
  out["sharp"] = iv.sharp;
  return out;
}

// Stratum slice of a law as a law of its own (for per-stratum p(R=0) bounds).
ObservedLaw stratum_law(const ObservedLaw& law, int c) {
  ProbTable slice = law.table().slice("C", c).normalized();
  return ObservedLaw::build(std::move(slice));
}

json bound_report_to_json(const ObservedLaw& law, const BoundReport& report, long n) {
  json out;
  out["model"] = model_tag_name(report.model);
  out["sharp"] = report.sharp;
  json entries = json::array();
  for (const auto& entry : report.entries) {
    json item;
    item["indicator"] = entry.indicator;
    if (entry.stratum >= 0) item["stratum"] = entry.stratum;
    item["q_w0_r1"] = rounded(entry.q_w0_r1);
    item.update(interval_to_json(entry.interval));
    try {
      const ObservedLaw& base = report.model == ModelTag::Mnar
                                    ? law  // handled below via reduction
                                    : law;
      BoundInterval r0;
      if (report.model == ModelTag::MarStratified)
        r0 = r0_bounds_from_channel_bounds(stratum_law(base, entry.stratum), entry.interval);
      else if (report.model == ModelTag::Mnar)
        r0 = r0_bounds_from_channel_bounds(reduce_to_indicator(base, entry.indicator),
                                           entry.interval);
      else
        r0 = r0_bounds_from_channel_bounds(base, entry.interval);
      item["r0_interval"] = {rounded(r0.lower), rounded(r0.upper)};
    } catch (const Error&) {
      item["r0_interval"] = nullptr;
    }
    entries.push_back(std::move(item));
  }
  out["entries"] = std::move(entries);
  // single-interval models also carry the flat fields
  if (report.entries.size() == 1 && report.entries.front().stratum < 0) {
    const auto& entry = report.entries.front();
    out["q_w0_r1"] = rounded(entry.q_w0_r1);
    out["interval"] = {rounded(entry.interval.lower), rounded(entry.interval.upper)};
    if (entry.interval.no_inflation) out["no_inflation"] = true;
    if (out["entries"][0].contains("r0_interval"))
      out["r0_interval"] = out["entries"][0]["r0_interval"];
  }
  out["falsification"] = falsification_to_json(report.falsification, n);
  return out;
}

void emit(const json& doc, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream out(output_path);
    if (!out) fail(ErrorCode::ParseError, "cannot write " + output_path);
    out << doc.dump(2) << "\n";
  }
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

struct CommonOptions {
  std::string input;
  std::string model = "mcar";
  double tol = kInputTol;
  bool force = false;
  std::string output;
  std::string format = "json";
  int min_cell_count = 5;
};

struct PreparedLaw {
  ObservedLaw law;
  long n = 0;  // records behind the law; 0 for a table
};

PreparedLaw prepare_law_counting(const CommonOptions& options) {
  LoadedInput input = load_input(options.input, options.min_cell_count);
  if (input.is_records()) {
    long n = static_cast<long>(input.records->rows.size());
    return {mle_counting(*input.records), n};
  }
  return {*input.table_law, 0};
}

int cmd_falsify(const CommonOptions& options) {
  ModelTag model = model_tag_from_string(options.model);
  PreparedLaw prepared = prepare_law_counting(options);
  FalsificationReport report = falsify(prepared.law, model, options.tol, prepared.n);
  json out;
  out["command"] = "falsify";
  out.update(falsification_to_json(report, prepared.n));
  emit(out, options.output);
  return report.pass ? 0 : 2;
}

int cmd_bounds(const CommonOptions& options) {
  ModelTag model = model_tag_from_string(options.model);
  PreparedLaw prepared = prepare_law_counting(options);
  BoundOptions bopts;
  bopts.tol = options.tol;
  bopts.n_for_se = prepared.n;
  bopts.force = options.force;
  BoundReport report = bound_for_model(prepared.law, model, bopts);
  json out;
  out["command"] = "bounds";
  out.update(bound_report_to_json(prepared.law, report, prepared.n));
  emit(out, options.output);
  return report.falsification.pass || options.force ? 0 : 2;
}

int cmd_sensitivity(const CommonOptions& options, int grid_n, std::uint64_t seed) {
  ModelTag model = model_tag_from_string(options.model);
  LoadedInput input = load_input(options.input, options.min_cell_count);

  ObservedLaw law = [&]() {
    if (!input.is_records()) return *input.table_law;
    // records flow through the constrained likelihood fit first
    EmConfig config;
    config.seed = seed;
    EmFit fit = em_fit(*input.records, model == ModelTag::Mnar ? ModelTag::MarShared : model,
                       config);
    return fit.fitted_observed_law();
  }();

  BoundOptions bopts;
  bopts.tol = options.tol;
  bopts.force = options.force;
  SensitivityCurve curve = sensitivity_curve(law, model, grid_n, bopts);

  // plot-ready CSV
  bool stratified = curve.tracks.size() > 1 || curve.tracks.front().stratum >= 0;
  int x_card = static_cast<int>(curve.target_min.size());
  std::ostringstream csv;
  if (stratified) csv << "stratum,";
  csv << "q_w0_r0,p_r0";
  for (int x = 0; x < x_card; ++x) csv << ",target_" << x;
  csv << ",feasible\r\n";
  for (const auto& track : curve.tracks)
    for (const auto& point : track.points) {
      if (stratified) csv << track.stratum << ",";
      csv << format_csv_value(point.q) << "," << format_csv_value(point.p_r0);
      for (int x = 0; x < x_card; ++x)
        csv << ","
            << (point.feasible ? format_csv_value(point.target[static_cast<std::size_t>(x)])
                               : std::string(""));
      csv << "," << (point.feasible ? 1 : 0) << "\r\n";
    }

  json summary;
  summary["command"] = "sensitivity";
  summary["model"] = model_tag_name(model);
  summary["grid_n"] = grid_n;
  summary["n_tracks"] = curve.tracks.size();
  json mins = json::array(), maxs = json::array();
  for (int x = 0; x < x_card; ++x) {
    mins.push_back(rounded(curve.target_min[static_cast<std::size_t>(x)]));
    maxs.push_back(rounded(curve.target_max[static_cast<std::size_t>(x)]));
  }
  summary["target_min"] = std::move(mins);
  summary["target_max"] = std::move(maxs);

  if (!options.output.empty()) {
    std::ofstream out(options.output);
    if (!out) fail(ErrorCode::ParseError, "cannot write " + options.output);
    out << csv.str();
    summary["csv"] = options.output;
    std::cout << summary.dump(2) << "\n";
  } else if (options.format == "csv") {
    std::cout << csv.str();
  } else {
    json points = json::array();
    for (const auto& track : curve.tracks)
      for (const auto& point : track.points) {
        json item;
        if (stratified) item["stratum"] = track.stratum;
        item["q_w0_r0"] = rounded(point.q);
        item["p_r0"] = rounded(point.p_r0);
        json target = json::array();
        for (double t : point.target) target.push_back(rounded(t));
        item["target"] = std::move(target);
        item["feasible"] = point.feasible;
        points.push_back(std::move(item));
      }
    summary["points"] = std::move(points);
    std::cout << summary.dump(2) << "\n";
  }
  return 0;
}

int cmd_simulate(const std::string& model_name, long n_dgps, int grid_n, std::uint64_t seed,
                 const std::string& output) {
  HarnessOptions options;
  options.model = dgp_model_from_string(model_name);
  options.n_dgps = n_dgps;
  options.grid_n = grid_n;
  options.seed = seed;
  HarnessReport report = validate_bounds_harness(options);

  json out;
  out["command"] = "simulate";
  out["model"] = std::string(dgp_model_name(report.model));
  out["n_dgps"] = report.n_dgps;
  out["grid_n"] = report.grid_n;
  out["seed"] = report.seed;
  out["n_pass"] = report.n_pass;
  out["pass_rate"] = rounded(static_cast<double>(report.n_pass) /
                             static_cast<double>(report.n_dgps));
  out["channel_redraws"] = report.redraws;
  json worst;
  worst["identification"] = rounded(report.worst_id_residual);
  worst["falsification"] = rounded(report.worst_falsify_residual);
  worst["roundtrip"] = rounded(report.worst_roundtrip_residual);
  out["worst_residuals"] = std::move(worst);
  json failures = json::array();
  for (const auto& f : report.failures) {
    json item;
    item["seed"] = f.dgp_seed;
    item["check"] = f.check;
    item["value"] = rounded(f.value);
    failures.push_back(std::move(item));
  }
  out["failures"] = std::move(failures);
  emit(out, output);
  return report.all_pass() ? 0 : 2;
}

int cmd_verify(const CommonOptions& options, int grid_n) {
  ModelTag model = model_tag_from_string(options.model);
  PreparedLaw prepared = prepare_law_counting(options);
  BoundOptions bopts;
  bopts.tol = options.tol;
  bopts.n_for_se = prepared.n;
  bopts.force = options.force;
  BoundReport analytic = bound_for_model(prepared.law, model, bopts);
  auto oracle = grid_feasibility_oracle(prepared.law, model, grid_n);
  if (oracle.size() != analytic.entries.size())
    fail(ErrorCode::ShapeMismatch, "oracle and analytic reports disagree on entries");

  double threshold = 2.0 / grid_n;
  double max_gap = 0.0;
  json rows = json::array();
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const BoundInterval& a = analytic.entries[i].interval;
    const BoundInterval& h = oracle[i].hull;
    double gap_lb = std::abs(a.lower - h.lower);
    double gap_ub = std::abs(a.upper - h.upper);
    double gap = std::max(gap_lb, gap_ub);
    max_gap = std::max(max_gap, gap);
    json row;
    row["indicator"] = analytic.entries[i].indicator;
    if (analytic.entries[i].stratum >= 0) row["stratum"] = analytic.entries[i].stratum;
    row["lb"] = rounded(a.lower);
    row["ub"] = rounded(a.upper);
    row["num_lb"] = rounded(h.lower);
    row["num_ub"] = rounded(h.upper);
    row["n_feasible"] = oracle[i].n_feasible;
    row["max_gap"] = rounded(gap);
    rows.push_back(std::move(row));
  }
  json out;
  out["command"] = "verify";
  out["model"] = model_tag_name(model);
  out["grid_n"] = grid_n;
  out["rows"] = std::move(rows);
  out["max_gap"] = rounded(max_gap);
  out["threshold"] = rounded(threshold);
  bool pass = max_gap <= threshold;
  out["pass"] = pass;
  emit(out, options.output);
  return pass ? 0 : 2;
}

int cmd_nonid_demo(double m, std::optional<std::uint64_t> seed, const std::string& output) {
  Dgp base = seed ? sample_dgp(DgpModel::Mcar, *seed) : fixtures::mcar();
  Dgp scaled = nonid_pair(base, m);
  ProbTable base_xc = forward_observed_xc(base);
  ProbTable scaled_xc = forward_observed_xc(scaled);
  std::vector<double> base_target = forward_target_law(base);
  std::vector<double> scaled_target = forward_target_law(scaled);

  json out;
  out["command"] = "nonid-demo";
  out["m"] = rounded(m);
  if (seed) out["seed"] = *seed;
  out["observed_max_diff"] = rounded(base_xc.max_abs_diff(scaled_xc));
  out["target_diff"] = rounded(std::abs(base_target[1] - scaled_target[1]));
  out["base_target"] = {rounded(base_target[0]), rounded(base_target[1])};
  out["scaled_target"] = {rounded(scaled_target[0]), rounded(scaled_target[1])};
  out["base_p_r0"] = rounded(base.scalar().p_r0[0]);
  out["scaled_p_r0"] = rounded(scaled.scalar().p_r0[0]);
  emit(out, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Restores zero-inflated categorical laws from an indicator proxy, computes"
      " sharp compatibility bounds for the proxy-indicator channel, and runs"
      " end-to-end sensitivity analyses."};
  app.require_subcommand(1);

  CommonOptions common;
  int grid_n = 200;
  long n_dgps = 10000;
  std::uint64_t seed = 1;
  double m_scale = 0.9;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd, bool with_input) {
    if (with_input)
      cmd->add_option("input", common.input, "record CSV or table JSON")->required();
    cmd->add_option("--model", common.model, "mcar | mar-stratified | mar-shared | mnar");
    cmd->add_option("--tol", common.tol, "constraint tolerance")->check(CLI::PositiveNumber);
    cmd->add_flag("--force", common.force, "proceed despite a failed falsification");
    cmd->add_option("--output", common.output, "write the report here instead of stdout");
    cmd->add_option("--format", common.format, "json | csv (stdout format)")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--precision", g_precision, "significant digits in numeric output")
        ->check(CLI::Range(1, 17));
    cmd->add_option("--min-cell-count", common.min_cell_count,
                    "pool covariate strata with fewer records");
  };

  CLI::App* falsify_cmd = app.add_subcommand("falsify", "test the observed-law constraints");
  add_common(falsify_cmd, true);

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "compatibility bounds for the channel");
  add_common(bounds_cmd, true);

  CLI::App* sensitivity_cmd =
      app.add_subcommand("sensitivity", "target-law curve over the compatible set");
  add_common(sensitivity_cmd, true);
  sensitivity_cmd->add_option("--grid", grid_n, "grid points over the interval")
      ->check(CLI::Range(2, 10000000));
  sensitivity_cmd->add_option("--seed", seed, "seed for the likelihood fit on records");

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "random-process validation harness");
  simulate_cmd->add_option("--model", common.model,
                           "mcar | mar-stratified | mar-shared | block-parallel");
  simulate_cmd->add_option("--n-dgps", n_dgps, "number of processes")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--grid", grid_n, "interior restoration points per interval")
      ->check(CLI::Range(2, 1000000));
  simulate_cmd->add_option("--seed", seed, "master seed");
  simulate_cmd->add_option("--output", common.output, "write the report here");
  simulate_cmd->add_option("--precision", g_precision, "significant digits")
      ->check(CLI::Range(1, 17));

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "analytic endpoints against the grid feasibility oracle");
  add_common(verify_cmd, true);
  verify_cmd->add_option("--grid", grid_n, "oracle grid resolution")
      ->check(CLI::Range(100, 100000000));

  CLI::App* nonid_cmd =
      app.add_subcommand("nonid-demo", "two processes, same observed p(X), different targets");
  nonid_cmd->add_option("--m", m_scale, "scaling factor of the construction")
      ->check(CLI::Range(0.0, 1.0));
  nonid_cmd->add_option("--seed", seed, "sample the base process instead of the fixture")
      ->each([&](const std::string&) { seed_given = true; });
  nonid_cmd->add_option("--output", common.output, "write the report here");
  nonid_cmd->add_option("--precision", g_precision, "significant digits")
      ->check(CLI::Range(1, 17));

  // defaults differ per command
  simulate_cmd->parse_complete_callback([&]() {
    if (simulate_cmd->count("--grid") == 0) grid_n = 101;
  });
  verify_cmd->parse_complete_callback([&]() {
    if (verify_cmd->count("--grid") == 0) grid_n = 100000;
  });

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(falsify_cmd)) return cmd_falsify(common);
    if (app.got_subcommand(bounds_cmd)) return cmd_bounds(common);
    if (app.got_subcommand(sensitivity_cmd)) return cmd_sensitivity(common, grid_n, seed);
    if (app.got_subcommand(simulate_cmd))
      return cmd_simulate(common.model, n_dgps, grid_n, seed, common.output);
    if (app.got_subcommand(verify_cmd)) return cmd_verify(common, grid_n);
    if (app.got_subcommand(nonid_cmd))
      return cmd_nonid_demo(m_scale,
                            seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt,
                            common.output);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
